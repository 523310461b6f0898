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

#include "pmx/herm_op.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <set>

namespace pmx {

namespace {

// Offsets of all sub-multi-indices over the factor positions `pos` (enumerated
// row-major in the order given), measured in the layout's global index.
std::vector<long> sub_offsets(const SpaceLayout& lay, const std::vector<int>& pos) {
    long n = 1;
    for (int k : pos) n *= lay.factor(k).dim;
    std::vector<long> off((size_t)n, 0);
    std::vector<int> dig(pos.size(), 0);
    for (long idx = 0; idx < n; ++idx) {
        long o = 0;
        for (size_t q = 0; q < pos.size(); ++q) o += (long)dig[q] * lay.stride(pos[q]);
        off[(size_t)idx] = o;
        for (int q = (int)pos.size() - 1; q >= 0; --q) {
            if (++dig[(size_t)q] < lay.factor(pos[(size_t)q]).dim) break;
            dig[(size_t)q] = 0;
        }
    }
    return off;
}

std::vector<int> complement_positions(const SpaceLayout& lay, const std::vector<int>& pos) {
    std::set<int> s(pos.begin(), pos.end());
    std::vector<int> out;
    for (int k = 0; k < lay.size(); ++k)
        if (!s.count(k)) out.push_back(k);
    return out;
}

}  // namespace

HermOp herm_op(const SpaceLayout& layout, const Mat& mat, double atol) {
    if (mat.rows() != layout.total_dim() || mat.cols() != layout.total_dim())
        fail_input("matrix dimension does not match layout");
    if (max_abs(mat - Mat(mat.adjoint())) > atol) fail_input("matrix is not Hermitian");
    return HermOp{layout, mat};
}

HermOp identity_op(const SpaceLayout& layout) {
    long d = layout.total_dim();
    return HermOp{layout, Mat::Identity(d, d)};
}

HermOp kron(const HermOp& a, const HermOp& b) {
    SpaceLayout lay = concat_layouts(a.layout, b.layout);
    Mat m = Eigen::kroneckerProduct(a.mat, b.mat);
    return HermOp{lay, std::move(m)};
}

HermOp partial_trace(const HermOp& a, const std::vector<std::string>& traced) {
    auto tpos = a.layout.indices_of(traced);
    std::sort(tpos.begin(), tpos.end());
    auto kpos = complement_positions(a.layout, tpos);
    auto toff = sub_offsets(a.layout, tpos);
    auto koff = sub_offsets(a.layout, kpos);
    long R = (long)koff.size(), S = (long)toff.size();
    Mat out = Mat::Zero(R, R);
    for (long r = 0; r < R; ++r)
        for (long c = 0; c < R; ++c) {
            cxd v = 0;
            for (long s = 0; s < S; ++s) v += a.mat(koff[r] + toff[s], koff[c] + toff[s]);
            out(r, c) = v;
        }
    return HermOp{a.layout.sub(kpos), std::move(out)};
}

HermOp trace_and_replace(const HermOp& a, const std::vector<std::string>& replaced) {
    auto rpos = a.layout.indices_of(replaced);
    std::sort(rpos.begin(), rpos.end());
    auto kpos = complement_positions(a.layout, rpos);
    auto roff = sub_offsets(a.layout, rpos);
    auto koff = sub_offsets(a.layout, kpos);
    long R = (long)koff.size(), S = (long)roff.size();
    HermOp pt = partial_trace(a, replaced);
    Mat out = Mat::Zero(a.layout.total_dim(), a.layout.total_dim());
    for (long r = 0; r < R; ++r)
        for (long c = 0; c < R; ++c) {
            cxd v = pt.mat(r, c) / (double)S;
            for (long s = 0; s < S; ++s) out(koff[r] + roff[s], koff[c] + roff[s]) = v;
        }
    return HermOp{a.layout, std::move(out)};
}

HermOp permute_factors(const HermOp& a, const std::vector<int>& perm) {
    int n = a.layout.size();
    if ((int)perm.size() != n) fail_input("permutation size mismatch");
    std::vector<bool> hit(n, false);
    for (int p : perm) {
        if (p < 0 || p >= n || hit[(size_t)p]) fail_input("permutation is not a bijection");
        hit[(size_t)p] = true;
    }
    std::vector<Factor> nf(n);
    for (int p = 0; p < n; ++p) nf[(size_t)p] = a.layout.factor(perm[(size_t)p]);
    SpaceLayout nlay{nf};

    long D = a.layout.total_dim();
    std::vector<long> map((size_t)D);
    std::vector<int> dig(n, 0);
    for (long i = 0; i < D; ++i) {
        long j = 0;
        for (int p = 0; p < n; ++p) j += (long)dig[(size_t)perm[(size_t)p]] * nlay.stride(p);
        map[(size_t)i] = j;
        for (int k = n - 1; k >= 0; --k) {
            if (++dig[(size_t)k] < a.layout.factor(k).dim) break;
            dig[(size_t)k] = 0;
        }
    }
    Mat out(D, D);
    for (long i = 0; i < D; ++i)
        for (long j = 0; j < D; ++j) out(map[(size_t)i], map[(size_t)j]) = a.mat(i, j);
    return HermOp{nlay, std::move(out)};
}

HermOp permute_trials(const HermOp& a, const std::vector<int>& perm) {
    auto blocks = a.layout.trial_blocks();
    int n = (int)blocks.size();
    if ((int)perm.size() != n) fail_input("trial permutation size mismatch");
    int bw = blocks[0].second - blocks[0].first;
    for (const auto& b : blocks) {
        if (b.second - b.first != bw) fail_input("trial blocks differ in factor count");
        for (int q = 0; q < bw; ++q)
            if (a.layout.factor(b.first + q).dim != a.layout.factor(blocks[0].first + q).dim)
                fail_input("trial blocks differ in factor dims");
    }
    std::vector<int> fperm((size_t)a.layout.size());
    for (int p = 0; p < n; ++p) {
        if (perm[(size_t)p] < 0 || perm[(size_t)p] >= n) fail_input("bad trial permutation");
        for (int q = 0; q < bw; ++q)
            fperm[(size_t)(blocks[(size_t)p].first + q)] = blocks[(size_t)perm[(size_t)p]].first + q;
    }
    HermOp moved = permute_factors(a, fperm);
    return HermOp{a.layout, std::move(moved.mat)};
}

double hs_inner(const HermOp& a, const HermOp& b) {
    if (!a.layout.same_dims(b.layout)) fail_input("hs_inner dimension mismatch");
    return a.mat.conjugate().cwiseProduct(b.mat).sum().real();
}

HermOp embed(const HermOp& a, const SpaceLayout& big) {
    std::vector<int> pos;
    pos.reserve((size_t)a.layout.size());
    for (const auto& f : a.layout.factors()) {
        int k = big.index_of(f.label);
        if (k < 0) fail_input("embed: label '" + f.label + "' not present in target layout");
        if (big.factor(k).dim != f.dim) fail_input("embed: dim mismatch on '" + f.label + "'");
        pos.push_back(k);
    }
    auto aoff = sub_offsets(big, pos);
    auto epos = complement_positions(big, pos);
    auto eoff = sub_offsets(big, epos);
    long D = big.total_dim();
    long A = (long)aoff.size(), E = (long)eoff.size();
    Mat out = Mat::Zero(D, D);
    for (long x = 0; x < A; ++x)
        for (long y = 0; y < A; ++y) {
            cxd v = a.mat(x, y);
            if (v == cxd(0, 0)) continue;
            for (long e = 0; e < E; ++e) out(aoff[x] + eoff[e], aoff[y] + eoff[e]) = v;
        }
    return HermOp{big, std::move(out)};
}

cxd trace_with_embedded(const HermOp& b, const HermOp& a) {
    std::vector<int> pos;
    for (const auto& f : a.layout.factors()) {
        int k = b.layout.index_of(f.label);
        if (k < 0) fail_input("trace_with_embedded: unknown label '" + f.label + "'");
        pos.push_back(k);
    }
    auto aoff = sub_offsets(b.layout, pos);
    auto epos = complement_positions(b.layout, pos);
    auto eoff = sub_offsets(b.layout, epos);
    long A = (long)aoff.size(), E = (long)eoff.size();
    cxd total = 0;
    for (long x = 0; x < A; ++x)
        for (long y = 0; y < A; ++y) {
            cxd v = a.mat(x, y);
            if (v == cxd(0, 0)) continue;
            cxd s = 0;
            for (long e = 0; e < E; ++e) s += b.mat(aoff[y] + eoff[e], aoff[x] + eoff[e]);
            total += v * s;
        }
    return total;
}

Mat partial_apply(const HermOp& b, const HermOp& a) {
    std::vector<int> pos;
    for (const auto& f : a.layout.factors()) {
        int k = b.layout.index_of(f.label);
        if (k < 0) fail_input("partial_apply: unknown label '" + f.label + "'");
        pos.push_back(k);
    }
    auto aoff = sub_offsets(b.layout, pos);
    auto epos = complement_positions(b.layout, pos);
    auto eoff = sub_offsets(b.layout, epos);
    long A = (long)aoff.size(), E = (long)eoff.size();
    Mat out = Mat::Zero(E, E);
    for (long x = 0; x < A; ++x)
        for (long y = 0; y < A; ++y) {
            cxd v = a.mat(x, y);
            if (v == cxd(0, 0)) continue;
            for (long er = 0; er < E; ++er)
                for (long ec = 0; ec < E; ++ec)
                    out(er, ec) += v * b.mat(aoff[y] + eoff[er], aoff[x] + eoff[ec]);
        }
    return out;
}

HermOp relabel(const HermOp& a, const SpaceLayout& target) {
    if (!a.layout.same_dims(target)) fail_input("relabel: factor dimensions differ");
    return HermOp{target, a.mat};
}

double min_eig(const HermOp& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.mat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double trace_norm(const HermOp& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.mat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace pmx
