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

namespace pmx {

// Orthonormal Hermitian basis of d x d matrices under the Hilbert-Schmidt
// inner product. Element 0 is identity/sqrt(d); the rest are traceless
// (normalized generalized Gell-Mann matrices). Coordinates of Hermitian
// operators in this basis are real, so superoperator matrices are real and
// the adjoint is the transpose.
const std::vector<Mat>& herm_basis(int d);

// Coordinates of an operator over a layout use the product basis: the tensor
// products of per-factor basis elements, indexed mixed-radix in factor order
// (factor 0 most significant). The coordinate map is an isometry from the
// Hilbert-Schmidt inner product to the Euclidean one.
RVec op_coords(const HermOp& a);
HermOp op_from_coords(const RVec& c, const SpaceLayout& lay);

// Complex-linear extension (arbitrary matrices, complex coordinates).
Vec op_coords_complex(const Mat& m, const SpaceLayout& lay);
Mat op_from_coords_complex(const Vec& c, const SpaceLayout& lay);

// All product-basis elements of a layout, materialized in coordinate order.
// Intended for small layouts (single trials); D^2 matrices of size D x D.
std::vector<Mat> product_basis(const SpaceLayout& lay);

// Transform from flattened matrix entries (row-major, index r*D + c) to
// product-basis coordinates: coords = transform * vec(S). Shape D^2 x D^2.
// Intended for small layouts; used by the superoperator machinery.
Mat coords_transform(const SpaceLayout& lay);

}  // namespace pmx
