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

#include <functional>
#include <string>
#include <vector>

#include "pmx/herm_op.hpp"

namespace pmx {

enum class MapKind { cp, cptp };

// A completely positive map in its operator representation: for a map acting
// as X -> M(X), the stored operator is [sum_{jk} |j><k| (x) M(|j><k|)]^T on
// the (input, output) factor pair.
struct ChoiMap {
    HermOp op;
    MapKind kind = MapKind::cp;
};

// A collection of CP maps, one per outcome, summing to a trace-preserving map.
struct Instrument {
    std::vector<ChoiMap> outcomes;
};

// A positive operator over all site factors whose trace equals the product of
// the output dimensions.
struct ProcessMatrix {
    HermOp op;
    long d_out = 1;
};

struct ValidityReport {
    double psd_residual = 0.0;
    double trace_residual = 0.0;
    double normalization_residual = 0.0;
    bool verdict = false;
    // True when the probe tuples were randomized instead of enumerated.
    bool sampled = false;
    long tuples_checked = 0;
};

struct InstrumentReport {
    std::vector<double> outcome_min_eigs;
    double tp_residual = 0.0;
    bool valid = false;
};

// The (input, output) factor pair of one site within one trial.
struct ProcessSlot {
    std::string site;
    int trial = 1;
    std::vector<int> in_positions;
    std::vector<int> out_positions;
    long d_in = 1;
    long d_out = 1;
};

// Slots present in a layout, ordered by (trial, first factor position).
std::vector<ProcessSlot> process_slots(const SpaceLayout& lay);
std::vector<ProcessSlot> process_slots(const SpaceLayout& lay,
                                       const std::vector<std::string>& sites);

enum class StandardChoi { identity, unitary, depolarizing, measure_prepare, trace_prepare };

struct ChoiParams {
    Mat unitary;  // unitary kind
    Mat effect;   // measure_prepare: POVM element
    Mat state;    // measure_prepare / trace_prepare: prepared state
};

// Operator representation of an explicit map function on the given
// (input, output) slot layout. The map must preserve Hermiticity.
HermOp choi_of_map(const SpaceLayout& slot, const std::function<Mat(const Mat&)>& map);

ChoiMap build_standard_choi(StandardChoi kind, const SpaceLayout& slot,
                            const ChoiParams& params = {});

InstrumentReport validate_instrument(const Instrument& ins, double atol = kDefaultAtol);

// Hermitian operators with output partial trace = identity whose affine hull
// is the whole trace-preserving hyperplane: the maximally depolarizing element
// followed by its shifts along every (input basis) x (traceless output basis)
// direction. Size 1 + d_in^2 (d_out^2 - 1).
std::vector<HermOp> cptp_affine_span(long d_in, long d_out);

// Wraps an operator as a process matrix, reading the output dimension off the
// layout. No validation beyond Hermiticity is performed here.
ProcessMatrix make_process(const HermOp& op);

// Positivity, trace, and normalization checks. Normalization contracts the
// process with every tuple of per-slot affine-span probes (or with randomized
// affine combinations once the tuple count exceeds max_tuples) and records
// the worst deviation of the resulting probability from one.
ValidityReport validate_process(const HermOp& w, const std::vector<std::string>& sites,
                                double atol = kDefaultAtol, long max_tuples = 100000,
                                unsigned seed = 7);

// tr[(M_1 (x) ... (x) M_m) W]. The maps must jointly cover every factor of W;
// factors are matched by (site, trial, role).
double born_probability(const ProcessMatrix& w, const std::vector<ChoiMap>& maps);

// Contract one site/trial slot with a trace-preserving map, returning the
// process on the remaining factors.
HermOp reduced_process(const ProcessMatrix& w, const std::string& site, int trial,
                       const ChoiMap& map);

// Seed-deterministic random CPTP map, built by orthonormalizing a Gaussian
// matrix into an isometry onto output (x) environment and tracing out the
// environment. Labels are "in"/"out" on site "M".
ChoiMap random_cptp(long d_in, long d_out, unsigned seed);

}  // namespace pmx
