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

#include "pmx/basis.hpp"

#include <cmath>
#include <map>

#include "tensor_detail.hpp"

namespace pmx {

namespace detail {

PairRegroup make_pair_regroup(const SpaceLayout& lay,
                              const std::vector<std::pair<int, int>>& groups) {
    PairRegroup rg;
    std::vector<long> gdim, gstride_lo;  // dim of group, stride of its last factor
    for (const auto& [first, last] : groups) {
        long d = 1;
        for (int k = first; k < last; ++k) d *= lay.factor(k).dim;
        rg.group_dims.push_back(d);
    }
    size_t G = groups.size();
    // slot strides in the flat tensor (row-major over groups, slot size d_g^2)
    std::vector<long> sstride(G);
    long total = 1;
    for (int g = (int)G - 1; g >= 0; --g) {
        sstride[(size_t)g] = total;
        total *= rg.group_dims[(size_t)g] * rg.group_dims[(size_t)g];
    }
    rg.flat_size = total;

    long D = lay.total_dim();
    rg.row_contrib.assign((size_t)D, 0);
    rg.col_contrib.assign((size_t)D, 0);
    std::vector<long> digit(G, 0);
    for (long i = 0; i < D; ++i) {
        long r = 0, c = 0;
        for (size_t g = 0; g < G; ++g) {
            r += digit[g] * rg.group_dims[g] * sstride[g];
            c += digit[g] * sstride[g];
        }
        rg.row_contrib[(size_t)i] = r;
        rg.col_contrib[(size_t)i] = c;
        for (int g = (int)G - 1; g >= 0; --g) {
            if (++digit[(size_t)g] < rg.group_dims[(size_t)g]) break;
            digit[(size_t)g] = 0;
        }
    }
    return rg;
}

std::vector<cxd> regroup_matrix(const Mat& m, const PairRegroup& rg) {
    long D = m.rows();
    std::vector<cxd> x((size_t)rg.flat_size);
    for (long i = 0; i < D; ++i) {
        long base = rg.row_contrib[(size_t)i];
        for (long j = 0; j < D; ++j) x[(size_t)(base + rg.col_contrib[(size_t)j])] = m(i, j);
    }
    return x;
}

Mat ungroup_matrix(const std::vector<cxd>& x, const PairRegroup& rg, long D) {
    Mat m(D, D);
    for (long i = 0; i < D; ++i) {
        long base = rg.row_contrib[(size_t)i];
        for (long j = 0; j < D; ++j) m(i, j) = x[(size_t)(base + rg.col_contrib[(size_t)j])];
    }
    return m;
}

std::vector<cxd> mode_apply(const Mat& M, const std::vector<cxd>& x,
                            const std::vector<long>& sizes, int k) {
    long outer = 1, inner = 1;
    for (int q = 0; q < k; ++q) outer *= sizes[(size_t)q];
    for (size_t q = (size_t)k + 1; q < sizes.size(); ++q) inner *= sizes[q];
    long sin = sizes[(size_t)k], sout = M.rows();
    std::vector<cxd> y((size_t)(outer * sout * inner));
    using RowMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (long o = 0; o < outer; ++o) {
        Eigen::Map<const RowMat> xin(x.data() + o * sin * inner, sin, inner);
        Eigen::Map<RowMat> yout(y.data() + o * sout * inner, sout, inner);
        yout.noalias() = M * xin;
    }
    return y;
}

}  // namespace detail

const std::vector<Mat>& herm_basis(int d) {
    static std::map<int, std::vector<Mat>> cache;
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    if (d < 1) fail_input("herm_basis: dim < 1");
    std::vector<Mat> basis;
    basis.push_back(Mat::Identity(d, d) / std::sqrt((double)d));
    const double isq2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            Mat sym = Mat::Zero(d, d);
            sym(j, k) = sym(k, j) = isq2;
            basis.push_back(sym);
            Mat asym = Mat::Zero(d, d);
            asym(j, k) = cxd(0, -isq2);
            asym(k, j) = cxd(0, isq2);
            basis.push_back(asym);
        }
    for (int l = 1; l < d; ++l) {
        Mat diag = Mat::Zero(d, d);
        double norm = 1.0 / std::sqrt((double)l * (l + 1));
        for (int m = 0; m < l; ++m) diag(m, m) = norm;
        diag(l, l) = -norm * l;
        basis.push_back(diag);
    }
    return cache.emplace(d, std::move(basis)).first->second;
}

namespace {

// Per-factor entry->coordinate transform: row a, column i*d+j holds B_a(j, i).
const Mat& entry_to_coord(int d) {
    static std::map<int, Mat> cache;
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    const auto& basis = herm_basis(d);
    Mat u(d * d, d * d);
    for (int a = 0; a < d * d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) u(a, i * d + j) = basis[(size_t)a](j, i);
    return cache.emplace(d, std::move(u)).first->second;
}

// Inverse: column a, row i*d+j holds B_a(i, j).
const Mat& coord_to_entry(int d) {
    static std::map<int, Mat> cache;
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    const auto& basis = herm_basis(d);
    Mat v(d * d, d * d);
    for (int a = 0; a < d * d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) v(i * d + j, a) = basis[(size_t)a](i, j);
    return cache.emplace(d, std::move(v)).first->second;
}

std::vector<std::pair<int, int>> singleton_groups(const SpaceLayout& lay) {
    std::vector<std::pair<int, int>> g;
    for (int k = 0; k < lay.size(); ++k) g.push_back({k, k + 1});
    return g;
}

}  // namespace

Vec op_coords_complex(const Mat& m, const SpaceLayout& lay) {
    if (lay.size() == 0) {
        Vec c(1);
        c(0) = m(0, 0);
        return c;
    }
    auto rg = detail::make_pair_regroup(lay, singleton_groups(lay));
    auto x = detail::regroup_matrix(m, rg);
    std::vector<long> sizes;
    for (long d : rg.group_dims) sizes.push_back(d * d);
    for (int k = 0; k < lay.size(); ++k) {
        x = detail::mode_apply(entry_to_coord(lay.factor(k).dim), x, sizes, k);
    }
    return Eigen::Map<const Vec>(x.data(), (long)x.size());
}

Mat op_from_coords_complex(const Vec& c, const SpaceLayout& lay) {
    long D = lay.total_dim();
    if (c.size() != D * D) fail_input("coordinate vector length mismatch");
    if (lay.size() == 0) {
        Mat m(1, 1);
        m(0, 0) = c(0);
        return m;
    }
    std::vector<cxd> x(c.data(), c.data() + c.size());
    std::vector<long> sizes;
    for (int k = 0; k < lay.size(); ++k) {
        long d = lay.factor(k).dim;
        sizes.push_back(d * d);
    }
    for (int k = 0; k < lay.size(); ++k) {
        x = detail::mode_apply(coord_to_entry(lay.factor(k).dim), x, sizes, k);
    }
    auto rg = detail::make_pair_regroup(lay, singleton_groups(lay));
    return detail::ungroup_matrix(x, rg, D);
}

RVec op_coords(const HermOp& a) {
    Vec c = op_coords_complex(a.mat, a.layout);
    return c.real();
}

HermOp op_from_coords(const RVec& c, const SpaceLayout& lay) {
    Vec cc = c.cast<cxd>();
    Mat m = op_from_coords_complex(cc, lay);
    // symmetrize away floating-point dust so the checked constructor passes
    m = (m + Mat(m.adjoint())) / 2.0;
    return herm_op(lay, m);
}

std::vector<Mat> product_basis(const SpaceLayout& lay) {
    long D = lay.total_dim();
    std::vector<Mat> out;
    out.reserve((size_t)(D * D));
    if (lay.size() == 0) {
        out.push_back(Mat::Ones(1, 1));
        return out;
    }
    std::vector<int> dig((size_t)lay.size(), 0);
    for (long a = 0; a < D * D; ++a) {
        Mat acc = herm_basis(lay.factor(0).dim)[(size_t)dig[0]];
        for (int k = 1; k < lay.size(); ++k) {
            const Mat& nxt = herm_basis(lay.factor(k).dim)[(size_t)dig[(size_t)k]];
            Mat big(acc.rows() * nxt.rows(), acc.cols() * nxt.cols());
            for (long i = 0; i < acc.rows(); ++i)
                for (long j = 0; j < acc.cols(); ++j)
                    big.block(i * nxt.rows(), j * nxt.cols(), nxt.rows(), nxt.cols()) =
                        acc(i, j) * nxt;
            acc = std::move(big);
        }
        out.push_back(std::move(acc));
        for (int k = lay.size() - 1; k >= 0; --k) {
            int m = lay.factor(k).dim * lay.factor(k).dim;
            if (++dig[(size_t)k] < m) break;
            dig[(size_t)k] = 0;
        }
    }
    return out;
}

Mat coords_transform(const SpaceLayout& lay) {
    long D = lay.total_dim();
    const auto basis = product_basis(lay);
    Mat t(D * D, D * D);
    // coordinate a of a matrix S is tr(B_a S) = sum_{rc} B_a(c, r) S(r, c)
    for (long a = 0; a < D * D; ++a)
        for (long r = 0; r < D; ++r)
            for (long c = 0; c < D; ++c) t(a, r * D + c) = basis[(size_t)a](c, r);
    return t;
}

}  // namespace pmx
