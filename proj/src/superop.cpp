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

#include "pmx/superop.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

#include "tensor_detail.hpp"

namespace pmx {

namespace {

// Columns are the flattened (row-major) entries of the product-basis elements.
Mat entries_transform(const SpaceLayout& lay) {
    long D = lay.total_dim();
    const auto basis = product_basis(lay);
    Mat e(D * D, D * D);
    for (long a = 0; a < D * D; ++a)
        for (long r = 0; r < D; ++r)
            for (long c = 0; c < D; ++c) e(r * D + c, a) = basis[(size_t)a](r, c);
    return e;
}

}  // namespace

Vec SuperOp::apply_complex(const Mat& m) const {
    if (!in_) fail_input("superop has no operator-space domain");
    if (m.rows() != in_->total_dim() || m.cols() != in_->total_dim())
        fail_input("superop input dimension mismatch");
    if (kernel_) {
        Mat out = kernel_(m);
        return op_coords_complex(out, *out_);
    }
    Vec c = op_coords_complex(m, *in_);
    Vec r = (mat_ * c.real()).cast<cxd>();
    r += cxd(0, 1) * (mat_ * c.imag()).cast<cxd>();
    return r;
}

SuperOp superop_identity(const SpaceLayout& lay) {
    long m = lay.total_dim() * lay.total_dim();
    SuperOp op;
    return superop_from_matrix(lay, RMat::Identity(m, m), lay);
}

SuperOp superop_from_matrix(const SpaceLayout& in, const RMat& mat,
                            const std::optional<SpaceLayout>& out) {
    long m = in.total_dim() * in.total_dim();
    if (mat.cols() != m) fail_input("superop matrix has wrong column count");
    if (out && mat.rows() != out->total_dim() * out->total_dim())
        fail_input("superop matrix has wrong row count for the output layout");
    SuperOp op;
    op.mat_ = mat;
    op.in_ = in;
    op.out_ = out;
    return op;
}

SuperOp superop_from_kernel(const SpaceLayout& in, const SpaceLayout& out,
                            const SuperOpKernel& kernel) {
    long m = in.total_dim() * in.total_dim();
    long v = out.total_dim() * out.total_dim();
    RMat mat(v, m);
    const auto basis = product_basis(in);
    for (long a = 0; a < m; ++a) {
        Mat img = kernel(basis[(size_t)a]);
        if (img.rows() != out.total_dim() || img.cols() != out.total_dim())
            fail_input("kernel output dimension mismatch");
        Vec c = op_coords_complex(img, out);
        if (c.imag().cwiseAbs().maxCoeff() > 1e-9)
            fail_input("kernel does not preserve Hermiticity");
        mat.col(a) = c.real();
    }
    SuperOp op;
    op.mat_ = std::move(mat);
    op.in_ = in;
    op.out_ = out;
    op.kernel_ = kernel;
    return op;
}

SuperOp superop_abstract(const RMat& mat) {
    SuperOp op;
    op.mat_ = mat;
    return op;
}

SuperOp superop_trace_with(const HermOp& r) {
    RVec c = op_coords(r);
    RMat mat(1, c.size());
    mat.row(0) = c.transpose();
    return superop_from_matrix(r.layout, mat, std::nullopt);
}

RVec superop_apply(const SuperOp& op, const HermOp& a) {
    if (!op.in_layout()) fail_input("superop has no operator-space domain");
    if (!a.layout.same_dims(*op.in_layout())) fail_input("superop input layout mismatch");
    return op.apply_complex(a.mat).real();
}

SuperOp superop_tensor(const SuperOp& a, const SuperOp& b) {
    if (!a.in_layout() || !b.in_layout())
        fail_input("superop_tensor requires operator-space domains");
    SpaceLayout in = concat_layouts(*a.in_layout(), *b.in_layout());
    RMat mat = Eigen::kroneckerProduct(a.matrix(), b.matrix());
    std::optional<SpaceLayout> out;
    if (a.out_layout() && b.out_layout()) out = concat_layouts(*a.out_layout(), *b.out_layout());
    else if (a.out_layout() || b.out_layout())
        fail_input("superop_tensor: mixed abstract/operator codomains");
    return superop_from_matrix(in, mat, out);
}

SuperOp superop_adjoint(const SuperOp& op) {
    SuperOp adj;
    adj.mat_ = op.mat_.transpose();
    adj.in_ = op.out_;
    adj.out_ = op.in_;
    return adj;
}

SuperOp superop_compose(const SuperOp& after, const SuperOp& before) {
    if (after.in_dim() != before.out_dim()) fail_input("superop_compose dimension mismatch");
    SuperOp op;
    op.mat_ = after.matrix() * before.matrix();
    op.in_ = before.in_layout();
    op.out_ = after.out_layout();
    return op;
}

// ---------------------------------------------------------------------------
// Slot tensors
// ---------------------------------------------------------------------------

long SlotTensor::total_size() const {
    long t = 1;
    for (const auto& s : slots) t *= s.size;
    return t;
}

SlotTensor to_slot_tensor(const HermOp& a) {
    auto blocks = a.layout.trial_blocks();
    auto rg = detail::make_pair_regroup(a.layout, blocks);
    SlotTensor st;
    st.data = detail::regroup_matrix(a.mat, rg);
    for (long d : rg.group_dims) st.slots.push_back({d * d, d});
    return st;
}

void apply_to_slot(SlotTensor& st, int slot, const SuperOp& op) {
    if (slot < 0 || slot >= (int)st.slots.size()) fail_input("slot index out of range");
    auto& sl = st.slots[(size_t)slot];
    if (sl.matrix_dim == 0) fail_input("slot already holds coordinates");
    if (!op.in_layout() || op.in_layout()->total_dim() != sl.matrix_dim)
        fail_input("superop does not match slot dimension");
    long t = sl.matrix_dim, t2 = t * t;
    long outer = 1, inner = 1;
    for (int q = 0; q < slot; ++q) outer *= st.slots[(size_t)q].size;
    for (size_t q = (size_t)slot + 1; q < st.slots.size(); ++q) inner *= st.slots[q].size;

    if (op.kernel() && op.out_layout()) {
        long to = op.out_layout()->total_dim(), to2 = to * to;
        std::vector<cxd> out((size_t)(outer * to2 * inner));
        Mat fiber(t, t);
        for (long o = 0; o < outer; ++o) {
            const cxd* src = st.data.data() + o * t2 * inner;
            cxd* dst = out.data() + o * to2 * inner;
            for (long in = 0; in < inner; ++in) {
                for (long i = 0; i < t; ++i)
                    for (long j = 0; j < t; ++j) fiber(i, j) = src[(i * t + j) * inner + in];
                Mat img = op.kernel()(fiber);
                for (long i = 0; i < to; ++i)
                    for (long j = 0; j < to; ++j) dst[(i * to + j) * inner + in] = img(i, j);
            }
        }
        st.data = std::move(out);
        sl = {to2, to};
        return;
    }

    // coordinate-matrix path: entries -> coords (-> entries when the codomain
    // is an operator space, to keep slot representations uniform)
    Mat operand = op.matrix().cast<cxd>() * coords_transform(*op.in_layout());
    SlotTensor::Slot next{op.out_dim(), 0};
    if (op.out_layout()) {
        operand = entries_transform(*op.out_layout()) * operand;
        long to = op.out_layout()->total_dim();
        next = {to * to, to};
    }
    std::vector<long> sizes;
    for (const auto& s : st.slots) sizes.push_back(s.size);
    st.data = detail::mode_apply(operand, st.data, sizes, slot);
    sl = next;
}

double slot_tensor_norm(const SlotTensor& st) {
    double s = 0;
    for (const auto& z : st.data) s += std::norm(z);
    return std::sqrt(s);
}

void slot_axpy(SlotTensor& acc, const SlotTensor& x, double w) {
    if (acc.data.size() != x.data.size()) fail_input("slot tensor shape mismatch");
    for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += w * x.data[i];
}

SlotTensor slot_zeros_like(const SlotTensor& st) {
    SlotTensor z;
    z.slots = st.slots;
    z.data.assign(st.data.size(), cxd(0, 0));
    return z;
}

}  // namespace pmx
