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
#include <optional>
#include <vector>

#include "pmx/basis.hpp"
#include "pmx/herm_op.hpp"

namespace pmx {

// Complex-linear action on matrices over the input layout, returning a matrix
// over the output layout. Used as a fast evaluation path for superoperators
// whose action is cheaper than a dense coordinate matrix-vector product
// (partial traces, trace-and-replace and friends).
using SuperOpKernel = std::function<Mat(const Mat&)>;

// Linear map between operator coordinate spaces. The matrix is real because
// coordinates live in the orthonormal Hermitian product basis; the adjoint
// with respect to the Hilbert-Schmidt pairing is the matrix transpose.
class SuperOp {
  public:
    SuperOp() = default;

    long in_dim() const { return mat_.cols(); }
    long out_dim() const { return mat_.rows(); }
    const RMat& matrix() const { return mat_; }
    const std::optional<SpaceLayout>& in_layout() const { return in_; }
    const std::optional<SpaceLayout>& out_layout() const { return out_; }
    const SuperOpKernel& kernel() const { return kernel_; }

    // Complex-linear application to an arbitrary matrix over the input layout.
    Vec apply_complex(const Mat& m) const;

    friend SuperOp superop_from_matrix(const SpaceLayout&, const RMat&,
                                       const std::optional<SpaceLayout>&);
    friend SuperOp superop_from_kernel(const SpaceLayout&, const SpaceLayout&,
                                       const SuperOpKernel&);
    friend SuperOp superop_abstract(const RMat&);
    friend SuperOp superop_adjoint(const SuperOp&);
    friend SuperOp superop_compose(const SuperOp&, const SuperOp&);

  private:
    RMat mat_;
    std::optional<SpaceLayout> in_, out_;
    SuperOpKernel kernel_;
};

SuperOp superop_identity(const SpaceLayout& lay);
SuperOp superop_from_matrix(const SpaceLayout& in, const RMat& mat,
                            const std::optional<SpaceLayout>& out = std::nullopt);
// Builds the coordinate matrix by applying the kernel to every basis element;
// keeps the kernel for fast tensor-power evaluation.
SuperOp superop_from_kernel(const SpaceLayout& in, const SpaceLayout& out,
                            const SuperOpKernel& kernel);
// Coordinate-space map with no operator-space identification on either side.
SuperOp superop_abstract(const RMat& mat);
// Scalar-valued map rho -> tr(r rho).
SuperOp superop_trace_with(const HermOp& r);

RVec superop_apply(const SuperOp& op, const HermOp& a);
SuperOp superop_tensor(const SuperOp& a, const SuperOp& b);
SuperOp superop_adjoint(const SuperOp& op);
SuperOp superop_compose(const SuperOp& after, const SuperOp& before);

// ---------------------------------------------------------------------------
// Trial-slot tensors: an n-trial operator regrouped so each trial holds one
// flat slot (its matrix entries, pair-indexed), which lets a single-trial
// superoperator act on one slot at a time. The n-fold tensor power of L
// applied to rho^(n) is n successive slot applications.
// ---------------------------------------------------------------------------

struct SlotTensor {
    // Per-slot flat sizes; slot k is either matrix entries (size = t_k^2, with
    // matrix_dim = t_k) or output coordinates (matrix_dim = 0).
    struct Slot {
        long size = 1;
        long matrix_dim = 0;
    };
    std::vector<Slot> slots;
    std::vector<cxd> data;

    long total_size() const;
};

// Regroup an n-trial operator into per-trial slots (entries, not coordinates).
SlotTensor to_slot_tensor(const HermOp& a);

// Apply a single-trial superoperator to one slot. Uses the kernel when
// available (slot stays in matrix-entry form), otherwise the coordinate
// matrix (slot becomes output coordinates).
void apply_to_slot(SlotTensor& st, int slot, const SuperOp& op);

double slot_tensor_norm(const SlotTensor& st);
// acc += w * x; shapes must agree.
void slot_axpy(SlotTensor& acc, const SlotTensor& x, double w);
SlotTensor slot_zeros_like(const SlotTensor& st);

}  // namespace pmx
