// Copyright 2026 The procmat developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "pmx/herm_op.hpp"
#include "pmx/process.hpp"

namespace pmx {

// One operator per prefix length of a repeated experiment: elements[k] covers
// the first k+1 trials and lives on replicate_trials(trial_layout, k+1).
struct TrialSequence {
    SpaceLayout trial_layout;
    std::vector<HermOp> elements;
};

// Checked constructor; every element must sit on the replicated trial layout
// for its length and be Hermitian.
TrialSequence make_sequence(const SpaceLayout& trial_layout, std::vector<HermOp> elements);

// Element covering n trials (1-based); throws when the sequence is shorter.
const HermOp& sequence_element(const TrialSequence& seq, int n);

// Unitary that moves whole trials: conjugating an n-trial operator by the
// result carries the content of trial slot sigma[p] into slot p, matching
// permute_trials. sigma must be a bijection on {0..n-1}.
Mat trial_permutation(int n, const std::vector<int>& sigma, const SpaceLayout& trial_layout);

// Average of w over all n! trial permutations. A projector that leaves the
// trace unchanged; n is capped at 7 to keep the enumeration tractable.
HermOp symmetrize(const HermOp& w, int n);

// max over trial transpositions of the max-entry change under the swap; zero
// exactly when w is invariant under every trial permutation.
double symmetry_residual(const HermOp& w, int n);

// ||element(n) - tr_{last trial} element(n+1)||_max.
double state_extendibility_residual(const TrialSequence& seq, int n);

// max over probes of ||element(n) - tr_last[element(n+1) (1 (x) probe)]||_max,
// contracting the probe against the last trial of the longer element. A probe
// covers one trial with every input factor before every output factor; its
// joint dimensions must match the trial layout. The overload without probes
// uses cptp_affine_span on the trial's joint dimensions, so a zero residual
// bounds the gap for every trace-preserving map at once.
double process_extendibility_residual(const TrialSequence& seq, int n,
                                      const std::vector<HermOp>& probes);
double process_extendibility_residual(const TrialSequence& seq, int n);

// The same contraction for one fixed map, which must be completely positive
// and trace preserving.
double weak_extendibility_residual(const TrialSequence& seq, int n,
                                   const ChoiMap& fixed_map);

// Extendibility under trace-and-re-prepare probes only: each state rho on the
// trial's joint output induces the probe 1_in (x) rho^T. The overload without
// states uses spanning_states on the joint output dimension.
double channel_extendibility_residual(const TrialSequence& seq, int n,
                                      const std::vector<Mat>& probe_states);
double channel_extendibility_residual(const TrialSequence& seq, int n);

// d^2 pure states spanning the Hermitian operators on dimension d: basis
// projectors plus equal-weight real and imaginary pair superpositions.
std::vector<Mat> spanning_states(long d);

}  // namespace pmx
