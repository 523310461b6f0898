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

#include "pmx/layout.hpp"

namespace pmx {

// A Hermitian operator on a labeled tensor-factor space.
struct HermOp {
    SpaceLayout layout;
    Mat mat;
};

// Checked constructor: dimension must match the layout and the matrix must be
// Hermitian within atol.
HermOp herm_op(const SpaceLayout& layout, const Mat& mat, double atol = kDefaultAtol);

HermOp identity_op(const SpaceLayout& layout);

// Tensor product; layouts are concatenated, labels must stay distinct.
HermOp kron(const HermOp& a, const HermOp& b);

// Trace out the named factors; the remaining factors keep their order.
HermOp partial_trace(const HermOp& a, const std::vector<std::string>& traced);

// Replace the named factors x by identity/d_x after tracing them out. Trace
// preserving and idempotent; the layout is unchanged.
HermOp trace_and_replace(const HermOp& a, const std::vector<std::string>& replaced);

// Conjugation by the factor-permutation unitary. Destination position p takes
// the factor previously at position perm[p]; the layout is permuted alongside.
HermOp permute_factors(const HermOp& a, const std::vector<int>& perm);

// Hilbert-Schmidt inner product tr(a^dag b); real for Hermitian arguments.
double hs_inner(const HermOp& a, const HermOp& b);

// Extend a Hermitian operator to a larger layout by tensoring identity onto
// every factor of `big` that `a` does not cover. Factors are matched by label.
HermOp embed(const HermOp& a, const SpaceLayout& big);

// tr[(a (x) 1) b] where a covers a label subset of b's layout.
cxd trace_with_embedded(const HermOp& b, const HermOp& a);

// Partial application: tr_covered[(a (x) 1) b]; returns an operator on the
// factors of b not covered by a (complex-linear in both arguments, so the
// result is not validated as Hermitian).
Mat partial_apply(const HermOp& b, const HermOp& a);

// Content of trial `src` moved to trial slot p = perm[p] source; layout kept.
// Requires all per-trial layouts to have identical factor dim sequences.
HermOp permute_trials(const HermOp& a, const std::vector<int>& perm);

// Same entries on a different layout with matching per-factor dimensions.
HermOp relabel(const HermOp& a, const SpaceLayout& target);

// Smallest eigenvalue of a Hermitian operator.
double min_eig(const HermOp& a);

// Trace norm (sum of absolute eigenvalues) of a Hermitian operator.
double trace_norm(const HermOp& a);

}  // namespace pmx
