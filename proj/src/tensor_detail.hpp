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

namespace pmx::detail {

// Regrouping between a D x D matrix and the flat slot tensor whose slot g
// holds the pair index (i_g * d_g + j_g) for a partition of the factors into
// contiguous groups with dims d_g (row-major over groups).
//
// row_contrib[i] + col_contrib[j] gives the flat index of entry (i, j).
struct PairRegroup {
    std::vector<long> row_contrib, col_contrib;
    std::vector<long> group_dims;  // d_g
    long flat_size = 1;            // product of d_g^2
};

// groups: [first, last) factor ranges covering the whole layout in order.
PairRegroup make_pair_regroup(const SpaceLayout& lay,
                              const std::vector<std::pair<int, int>>& groups);

std::vector<cxd> regroup_matrix(const Mat& m, const PairRegroup& rg);
Mat ungroup_matrix(const std::vector<cxd>& x, const PairRegroup& rg, long D);

// y[..., a, ...] = sum_p M(a, p) x[..., p, ...] over slot k of a flat tensor
// with slot sizes `sizes` (row-major). Returns the new slot-size vector entry.
std::vector<cxd> mode_apply(const Mat& M, const std::vector<cxd>& x,
                            const std::vector<long>& sizes, int k);

}  // namespace pmx::detail
