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

#include "pmx/exchange.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <utility>

namespace pmx {

namespace {

// positions and joint dimensions of a layout's last trial, split by role
struct TrialPort {
    std::vector<int> in_pos, out_pos;
    long d_in = 1, d_out = 1;
};

TrialPort last_trial_port(const SpaceLayout& lay) {
    auto blocks = lay.trial_blocks();
    TrialPort port;
    for (int k = blocks.back().first; k < blocks.back().second; ++k) {
        if (lay.factor(k).role == Role::input) {
            port.in_pos.push_back(k);
            port.d_in *= lay.factor(k).dim;
        } else {
            port.out_pos.push_back(k);
            port.d_out *= lay.factor(k).dim;
        }
    }
    return port;
}

// ||e_n - tr_last[e_np1 (1 (x) probe)]||_max for a probe given over the last
// trial's (joint input, joint output) space, inputs first
double reduction_gap(const HermOp& e_n, const HermOp& e_np1, const Mat& grouped) {
    TrialPort port = last_trial_port(e_np1.layout);
    if (grouped.rows() != grouped.cols() || grouped.rows() != port.d_in * port.d_out)
        fail_input("probe dimension mismatch");
    std::vector<int> pos = port.in_pos;
    pos.insert(pos.end(), port.out_pos.begin(), port.out_pos.end());
    HermOp probe{e_np1.layout.sub(pos), grouped};
    Mat red = partial_apply(e_np1, probe);
    return max_abs(Mat(red - e_n.mat));
}

// map operator rearranged so every input factor precedes every output factor
Mat grouped_map_mat(const HermOp& op) {
    std::vector<int> perm;
    for (int k = 0; k < op.layout.size(); ++k)
        if (op.layout.factor(k).role == Role::input) perm.push_back(k);
    for (int k = 0; k < op.layout.size(); ++k)
        if (op.layout.factor(k).role == Role::output) perm.push_back(k);
    return permute_factors(op, perm).mat;
}

void check_probe_state(const Mat& rho, long d) {
    if (rho.rows() != d || rho.cols() != d) fail_input("probe state has wrong dimension");
    if (max_abs(Mat(rho - rho.adjoint())) > 1e-9) fail_input("probe state is not Hermitian");
    if (std::abs(rho.trace() - cxd(1, 0)) > 1e-8) fail_input("probe state trace is not one");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        fail_input("probe state is not positive semidefinite");
}

}  // namespace

TrialSequence make_sequence(const SpaceLayout& trial_layout, std::vector<HermOp> elements) {
    if (elements.empty()) fail_input("sequence needs at least one element");
    TrialSequence seq{trial_layout, {}};
    seq.elements.reserve(elements.size());
    for (size_t k = 0; k < elements.size(); ++k) {
        SpaceLayout want = replicate_trials(trial_layout, (int)k + 1);
        if (!(elements[k].layout == want))
            fail_input("sequence element " + std::to_string(k + 1) +
                       " is not on the replicated trial layout");
        seq.elements.push_back(herm_op(want, std::move(elements[k].mat)));
    }
    return seq;
}

const HermOp& sequence_element(const TrialSequence& seq, int n) {
    if (n < 1 || (size_t)n > seq.elements.size())
        fail_input("sequence has no element for " + std::to_string(n) + " trials");
    return seq.elements[(size_t)n - 1];
}

Mat trial_permutation(int n, const std::vector<int>& sigma, const SpaceLayout& trial_layout) {
    if (n < 1) fail_input("need at least one trial");
    if ((int)sigma.size() != n) fail_input("permutation size mismatch");
    std::vector<bool> hit((size_t)n, false);
    for (int s : sigma) {
        if (s < 0 || s >= n || hit[(size_t)s]) fail_input("permutation is not a bijection");
        hit[(size_t)s] = true;
    }
    SpaceLayout full = replicate_trials(trial_layout, n);
    long t = trial_layout.total_dim();
    long total = full.total_dim();
    std::vector<long> stride((size_t)n);
    stride[(size_t)n - 1] = 1;
    for (int p = n - 2; p >= 0; --p) stride[(size_t)p] = stride[(size_t)p + 1] * t;
    Mat u = Mat::Zero(total, total);
    std::vector<long> dig((size_t)n);
    for (long i = 0; i < total; ++i) {
        for (int p = 0; p < n; ++p) dig[(size_t)p] = (i / stride[(size_t)p]) % t;
        long j = 0;
        for (int p = 0; p < n; ++p) j += dig[(size_t)sigma[(size_t)p]] * stride[(size_t)p];
        u(j, i) = 1.0;
    }
    return u;
}

HermOp symmetrize(const HermOp& w, int n) {
    if (n > 7) fail_input("too many trials to enumerate");
    if ((int)w.layout.trial_blocks().size() != n) fail_input("trial count mismatch");
    if (n == 1) return w;
    std::vector<int> sigma((size_t)n);
    std::iota(sigma.begin(), sigma.end(), 0);
    Mat acc = Mat::Zero(w.mat.rows(), w.mat.cols());
    long count = 0;
    do {
        acc += permute_trials(w, sigma).mat;
        ++count;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return HermOp{w.layout, Mat(acc / (double)count)};
}

double symmetry_residual(const HermOp& w, int n) {
    if ((int)w.layout.trial_blocks().size() != n) fail_input("trial count mismatch");
    double res = 0.0;
    std::vector<int> sigma((size_t)n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::iota(sigma.begin(), sigma.end(), 0);
            std::swap(sigma[(size_t)i], sigma[(size_t)j]);
            res = std::max(res, max_abs(Mat(permute_trials(w, sigma).mat - w.mat)));
        }
    return res;
}

double state_extendibility_residual(const TrialSequence& seq, int n) {
    const HermOp& e_n = sequence_element(seq, n);
    const HermOp& e_np1 = sequence_element(seq, n + 1);
    auto blocks = e_np1.layout.trial_blocks();
    std::vector<std::string> last;
    for (int k = blocks.back().first; k < blocks.back().second; ++k)
        last.push_back(e_np1.layout.factor(k).label);
    HermOp traced = partial_trace(e_np1, last);
    return max_abs(Mat(traced.mat - e_n.mat));
}

double process_extendibility_residual(const TrialSequence& seq, int n,
                                      const std::vector<HermOp>& probes) {
    if (probes.empty()) fail_input("probe list is empty");
    const HermOp& e_n = sequence_element(seq, n);
    const HermOp& e_np1 = sequence_element(seq, n + 1);
    double res = 0.0;
    for (const auto& probe : probes)
        res = std::max(res, reduction_gap(e_n, e_np1, grouped_map_mat(probe)));
    return res;
}

double process_extendibility_residual(const TrialSequence& seq, int n) {
    // every per-site tuple of affine-span elements; their products affinely
    // span the product maps, so zero here is zero for all per-site channels
    auto slots = process_slots(seq.trial_layout);
    if (slots.empty()) fail_input("trial layout has no sites");
    std::vector<std::vector<HermOp>> spans;
    for (const auto& s : slots) {
        std::vector<int> pos = s.in_positions;
        pos.insert(pos.end(), s.out_positions.begin(), s.out_positions.end());
        SpaceLayout sub = seq.trial_layout.sub(pos);
        std::vector<HermOp> sp;
        for (const auto& e : cptp_affine_span(s.d_in, s.d_out))
            sp.push_back(HermOp{sub, e.mat});
        spans.push_back(std::move(sp));
    }
    std::vector<HermOp> probes;
    std::function<void(size_t, const HermOp&)> build = [&](size_t k, const HermOp& acc) {
        if (k == spans.size()) {
            probes.push_back(acc);
            return;
        }
        for (const auto& piece : spans[k])
            build(k + 1, k == 0 ? piece : kron(acc, piece));
    };
    build(0, HermOp{});
    return process_extendibility_residual(seq, n, probes);
}

double weak_extendibility_residual(const TrialSequence& seq, int n,
                                   const ChoiMap& fixed_map) {
    const HermOp& op = fixed_map.op;
    HermOp traced = partial_trace(op, op.layout.labels_of_role(Role::output));
    Mat eye = Mat::Identity(traced.mat.rows(), traced.mat.cols());
    if (max_abs(Mat(traced.mat - eye)) > 1e-8) fail_input("map is not trace preserving");
    if (min_eig(op) < -1e-8) fail_input("map is not completely positive");
    return reduction_gap(sequence_element(seq, n), sequence_element(seq, n + 1),
                         grouped_map_mat(op));
}

double channel_extendibility_residual(const TrialSequence& seq, int n,
                                      const std::vector<Mat>& probe_states) {
    if (probe_states.empty()) fail_input("probe state list is empty");
    const HermOp& e_n = sequence_element(seq, n);
    const HermOp& e_np1 = sequence_element(seq, n + 1);
    TrialPort port = last_trial_port(e_np1.layout);
    double res = 0.0;
    for (const auto& rho : probe_states) {
        check_probe_state(rho, port.d_out);
        Mat probe = Eigen::kroneckerProduct(Mat::Identity(port.d_in, port.d_in),
                                            Mat(rho.transpose()));
        res = std::max(res, reduction_gap(e_n, e_np1, probe));
    }
    return res;
}

double channel_extendibility_residual(const TrialSequence& seq, int n) {
    TrialPort port = last_trial_port(seq.trial_layout);
    return channel_extendibility_residual(seq, n, spanning_states(port.d_out));
}

std::vector<Mat> spanning_states(long d) {
    if (d < 1) fail_input("dimension must be positive");
    std::vector<Mat> out;
    out.reserve((size_t)(d * d));
    for (long j = 0; j < d; ++j) {
        Vec v = Vec::Zero(d);
        v(j) = 1.0;
        out.push_back(v * v.adjoint());
    }
    double r = 1.0 / std::sqrt(2.0);
    for (long j = 0; j < d; ++j)
        for (long k = j + 1; k < d; ++k) {
            Vec v = Vec::Zero(d);
            v(j) = r;
            v(k) = r;
            out.push_back(v * v.adjoint());
            v(k) = cxd(0.0, r);
            out.push_back(v * v.adjoint());
        }
    return out;
}

}  // namespace pmx
