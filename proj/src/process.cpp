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

#include "pmx/process.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <map>
#include <random>

#include "pmx/basis.hpp"

namespace pmx {

namespace {

void check_density(const Mat& rho, double atol, const std::string& what) {
    if (rho.rows() != rho.cols() || rho.rows() < 1) fail_input(what + ": not square");
    if (max_abs(rho - Mat(rho.adjoint())) > atol) fail_input(what + ": not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-6) fail_input(what + ": trace is not one");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) fail_input(what + ": not positive semidefinite");
}

// Split a slot layout into input-then-output factor positions, requiring all
// inputs to precede all outputs.
void split_slot(const SpaceLayout& slot, long& d_in, long& d_out) {
    bool seen_out = false;
    d_in = 1;
    d_out = 1;
    for (const auto& f : slot.factors()) {
        if (f.role == Role::output) {
            seen_out = true;
            d_out *= f.dim;
        } else {
            if (seen_out) fail_input("slot layout must order inputs before outputs");
            d_in *= f.dim;
        }
    }
}

// Relabel a map's factors to the matching (site, trial, role, dim) factors of
// the target layout, consuming each target factor at most once.
HermOp align_by_signature(const HermOp& op, const SpaceLayout& target) {
    std::vector<bool> used(target.size(), false);
    std::vector<Factor> fs;
    fs.reserve(op.layout.size());
    for (const auto& f : op.layout.factors()) {
        int hit = -1;
        for (int k = 0; k < target.size(); ++k) {
            const auto& g = target.factor(k);
            if (!used[(size_t)k] && g.site == f.site && g.trial == f.trial && g.role == f.role &&
                g.dim == f.dim) {
                hit = k;
                break;
            }
        }
        if (hit < 0) fail_input("no matching process factor for map factor '" + f.label + "'");
        used[(size_t)hit] = true;
        Factor g = f;
        g.label = target.factor(hit).label;
        fs.push_back(g);
    }
    return HermOp{SpaceLayout{fs}, op.mat};
}

// Trace-preserving affine probes on a slot sub-layout ordered inputs first:
// identity/d_out plus its shifts by (input basis) x (traceless output basis).
std::vector<HermOp> tp_probe_set(const SpaceLayout& sub) {
    long d_in = 1, d_out = 1;
    split_slot(sub, d_in, d_out);
    std::vector<int> in_pos, out_pos;
    for (int k = 0; k < sub.size(); ++k)
        (sub.factor(k).role == Role::output ? out_pos : in_pos).push_back(k);
    HermOp center{sub, Mat::Identity(sub.total_dim(), sub.total_dim()) / (double)d_out};
    std::vector<HermOp> probes{center};
    if (d_out == 1) return probes;
    auto in_sub = sub.sub(in_pos);
    auto out_sub = sub.sub(out_pos);
    auto ib = product_basis(in_sub);
    auto ob = product_basis(out_sub);
    probes.reserve(1 + ib.size() * (ob.size() - 1));
    for (const auto& a : ib)
        for (size_t b = 1; b < ob.size(); ++b) {
            auto shift = kron(HermOp{in_sub, a}, HermOp{out_sub, ob[b]});
            probes.push_back(HermOp{sub, center.mat + shift.mat});
        }
    return probes;
}

HermOp sub_after_removal(const HermOp& cur, const std::vector<int>& removed, const Mat& m) {
    std::vector<bool> gone(cur.layout.size(), false);
    for (int p : removed) gone[(size_t)p] = true;
    std::vector<int> keep;
    for (int k = 0; k < cur.layout.size(); ++k)
        if (!gone[(size_t)k]) keep.push_back(k);
    return HermOp{cur.layout.sub(keep), m};
}

}  // namespace

std::vector<ProcessSlot> process_slots(const SpaceLayout& lay) {
    return process_slots(lay, lay.site_names());
}

std::vector<ProcessSlot> process_slots(const SpaceLayout& lay,
                                       const std::vector<std::string>& sites) {
    std::vector<ProcessSlot> slots;
    for (const auto& site : sites) {
        bool found = false;
        std::map<int, ProcessSlot> by_trial;
        for (int k = 0; k < lay.size(); ++k) {
            const auto& f = lay.factor(k);
            if (f.site != site) continue;
            found = true;
            auto& s = by_trial[f.trial];
            s.site = site;
            s.trial = f.trial;
            if (f.role == Role::output) {
                s.out_positions.push_back(k);
                s.d_out *= f.dim;
            } else {
                s.in_positions.push_back(k);
                s.d_in *= f.dim;
            }
        }
        if (!found) fail_input("site '" + site + "' not present in layout");
        for (auto& [trial, s] : by_trial) slots.push_back(std::move(s));
    }
    std::sort(slots.begin(), slots.end(), [](const ProcessSlot& a, const ProcessSlot& b) {
        int pa = a.in_positions.empty() ? a.out_positions.front() : a.in_positions.front();
        int pb = b.in_positions.empty() ? b.out_positions.front() : b.in_positions.front();
        return std::tie(a.trial, pa) < std::tie(b.trial, pb);
    });
    return slots;
}

HermOp choi_of_map(const SpaceLayout& slot, const std::function<Mat(const Mat&)>& map) {
    long d_in = 1, d_out = 1;
    split_slot(slot, d_in, d_out);
    Mat acc = Mat::Zero(d_in * d_out, d_in * d_out);
    for (long j = 0; j < d_in; ++j)
        for (long k = 0; k < d_in; ++k) {
            Mat ejk = Mat::Zero(d_in, d_in);
            ejk(j, k) = 1.0;
            Mat img = map(ejk);
            if (img.rows() != d_out || img.cols() != d_out)
                fail_input("map image dimension does not match slot output");
            acc.block(j * d_out, k * d_out, d_out, d_out) += img;
        }
    return herm_op(slot, acc.transpose());
}

ChoiMap build_standard_choi(StandardChoi kind, const SpaceLayout& slot,
                            const ChoiParams& params) {
    long d_in = 1, d_out = 1;
    split_slot(slot, d_in, d_out);
    switch (kind) {
        case StandardChoi::identity: {
            if (d_in != d_out) fail_input("identity channel needs equal dimensions");
            return {choi_of_map(slot, [](const Mat& x) { return x; }), MapKind::cptp};
        }
        case StandardChoi::unitary: {
            const Mat& u = params.unitary;
            if (u.rows() != d_in || u.cols() != d_in || d_in != d_out)
                fail_input("unitary has wrong dimensions");
            if (max_abs(Mat(u.adjoint() * u) - Mat::Identity(d_in, d_in)) > 1e-9)
                fail_input("matrix is not unitary");
            return {choi_of_map(slot, [&u](const Mat& x) { return Mat(u * x * u.adjoint()); }),
                    MapKind::cptp};
        }
        case StandardChoi::depolarizing: {
            return {choi_of_map(slot,
                                [d_out](const Mat& x) {
                                    return Mat(x.trace() / (double)d_out *
                                               Mat::Identity(d_out, d_out));
                                }),
                    MapKind::cptp};
        }
        case StandardChoi::measure_prepare: {
            const Mat& e = params.effect;
            Mat rho = params.state;
            if (rho.size() == 0 && d_out == 1) rho = Mat::Identity(1, 1);
            if (e.rows() != d_in || e.cols() != d_in) fail_input("effect has wrong dimensions");
            if (max_abs(e - Mat(e.adjoint())) > 1e-9) fail_input("effect is not Hermitian");
            Eigen::SelfAdjointEigenSolver<Mat> es(e, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -1e-9 || es.eigenvalues().maxCoeff() > 1.0 + 1e-9)
                fail_input("effect is not between zero and identity");
            check_density(rho, 1e-9, "prepared state");
            if (rho.rows() != d_out) fail_input("prepared state has wrong dimension");
            return {choi_of_map(slot,
                                [&e, &rho](const Mat& x) {
                                    return Mat((e * x).trace() * rho);
                                }),
                    MapKind::cp};
        }
        case StandardChoi::trace_prepare: {
            const Mat& rho = params.state;
            check_density(rho, 1e-9, "prepared state");
            if (rho.rows() != d_out) fail_input("prepared state has wrong dimension");
            return {choi_of_map(slot, [&rho](const Mat& x) { return Mat(x.trace() * rho); }),
                    MapKind::cptp};
        }
    }
    fail_input("unknown channel kind");
}

InstrumentReport validate_instrument(const Instrument& ins, double atol) {
    if (ins.outcomes.empty()) fail_input("instrument has no outcomes");
    const auto& lay = ins.outcomes.front().op.layout;
    InstrumentReport rep;
    Mat sum = Mat::Zero(lay.total_dim(), lay.total_dim());
    for (const auto& m : ins.outcomes) {
        if (!(m.op.layout == lay)) fail_input("instrument outcomes have mismatched layouts");
        rep.outcome_min_eigs.push_back(min_eig(m.op));
        sum += m.op.mat;
    }
    auto traced = partial_trace(HermOp{lay, sum}, lay.labels_of_role(Role::output));
    rep.tp_residual = max_abs(traced.mat - Mat::Identity(traced.mat.rows(), traced.mat.cols()));
    bool psd = true;
    for (double ev : rep.outcome_min_eigs) psd = psd && ev >= -atol;
    rep.valid = psd && rep.tp_residual <= atol;
    return rep;
}

std::vector<HermOp> cptp_affine_span(long d_in, long d_out) {
    if (d_in < 1 || d_out < 1) fail_input("dimensions must be positive");
    SpaceLayout slot{{{"in", "M", Role::input, 1, (int)d_in},
                      {"out", "M", Role::output, 1, (int)d_out}}};
    return tp_probe_set(slot);
}

ProcessMatrix make_process(const HermOp& op) {
    long d_out = 1;
    for (const auto& f : op.layout.factors())
        if (f.role == Role::output) d_out *= f.dim;
    return ProcessMatrix{op, d_out};
}

ValidityReport validate_process(const HermOp& w, const std::vector<std::string>& sites,
                                double atol, long max_tuples, unsigned seed) {
    auto slots = process_slots(w.layout, sites);
    size_t covered = 0;
    for (const auto& s : slots) covered += s.in_positions.size() + s.out_positions.size();
    if ((long)covered != w.layout.size())
        fail_input("declared sites do not cover the whole layout");

    ValidityReport rep;
    rep.psd_residual = std::max(0.0, -min_eig(w));
    long d_out = 1;
    for (const auto& s : slots) d_out *= s.d_out;
    rep.trace_residual = std::abs(w.mat.trace().real() - (double)d_out);

    std::vector<std::vector<HermOp>> probes;
    long tuple_count = 1;
    bool overflow = false;
    for (const auto& s : slots) {
        std::vector<int> pos = s.in_positions;
        pos.insert(pos.end(), s.out_positions.begin(), s.out_positions.end());
        probes.push_back(tp_probe_set(w.layout.sub(pos)));
        if (tuple_count > max_tuples / (long)probes.back().size())
            overflow = true;
        else
            tuple_count *= (long)probes.back().size();
    }

    double worst = 0.0;
    if (!overflow) {
        std::function<void(const HermOp&, size_t)> dfs = [&](const HermOp& cur, size_t k) {
            if (k == slots.size()) {
                worst = std::max(worst, std::abs(cur.mat(0, 0).real() - 1.0));
                return;
            }
            for (const auto& p : probes[k]) {
                auto rel = align_by_signature(p, cur.layout);
                Mat m = partial_apply(cur, rel);
                dfs(sub_after_removal(cur, cur.layout.indices_of(rel.layout.labels()), m), k + 1);
            }
        };
        dfs(w, 0);
        rep.tuples_checked = tuple_count;
    } else {
        // Randomized affine combinations of the per-slot probe sets.
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        const long samples = 200;
        for (long s = 0; s < samples; ++s) {
            HermOp cur = w;
            for (size_t k = 0; k < slots.size(); ++k) {
                size_t m = probes[k].size();
                std::vector<double> c(m);
                double total = 0.0;
                for (auto& x : c) {
                    x = g(rng);
                    total += x;
                }
                for (auto& x : c) x += (1.0 - total) / (double)m;
                Mat mix = Mat::Zero(probes[k][0].mat.rows(), probes[k][0].mat.cols());
                for (size_t i = 0; i < m; ++i) mix += c[i] * probes[k][i].mat;
                auto rel = align_by_signature(HermOp{probes[k][0].layout, mix}, cur.layout);
                Mat nxt = partial_apply(cur, rel);
                cur = sub_after_removal(cur, cur.layout.indices_of(rel.layout.labels()), nxt);
            }
            worst = std::max(worst, std::abs(cur.mat(0, 0).real() - 1.0));
        }
        rep.sampled = true;
        rep.tuples_checked = samples;
    }
    rep.normalization_residual = worst;
    rep.verdict = rep.psd_residual <= atol && rep.trace_residual <= atol &&
                  rep.normalization_residual <= atol;
    return rep;
}

double born_probability(const ProcessMatrix& w, const std::vector<ChoiMap>& maps) {
    HermOp cur = w.op;
    for (const auto& m : maps) {
        auto rel = align_by_signature(m.op, cur.layout);
        Mat nxt = partial_apply(cur, rel);
        cur = sub_after_removal(cur, cur.layout.indices_of(rel.layout.labels()), nxt);
    }
    if (cur.layout.size() != 0) fail_input("maps do not cover every factor of the process");
    cxd v = cur.mat(0, 0);
    return v.real();
}

HermOp reduced_process(const ProcessMatrix& w, const std::string& site, int trial,
                       const ChoiMap& map) {
    auto slots = process_slots(w.op.layout, {site});
    const ProcessSlot* slot = nullptr;
    for (const auto& s : slots)
        if (s.trial == trial) slot = &s;
    if (!slot) fail_input("no such trial for site '" + site + "'");
    std::vector<int> pos = slot->in_positions;
    pos.insert(pos.end(), slot->out_positions.begin(), slot->out_positions.end());
    auto target = w.op.layout.sub(pos);

    // The map's own factor order must be inputs-then-outputs of equal dims.
    std::vector<int> mpos;
    for (int k = 0; k < map.op.layout.size(); ++k)
        if (map.op.layout.factor(k).role == Role::input) mpos.push_back(k);
    for (int k = 0; k < map.op.layout.size(); ++k)
        if (map.op.layout.factor(k).role == Role::output) mpos.push_back(k);
    bool ordered = true;
    for (size_t k = 0; k < mpos.size(); ++k) ordered = ordered && mpos[k] == (int)k;
    if (!ordered) fail_input("map factors must be ordered inputs before outputs");
    auto aligned = relabel(map.op, target);

    auto traced = partial_trace(aligned, aligned.layout.labels_of_role(Role::output));
    if (max_abs(traced.mat - Mat::Identity(traced.mat.rows(), traced.mat.cols())) > 1e-8)
        fail_input("closure map is not trace preserving");

    Mat m = partial_apply(w.op, aligned);
    std::vector<bool> gone(w.op.layout.size(), false);
    for (int p : pos) gone[(size_t)p] = true;
    std::vector<int> keep;
    for (int k = 0; k < w.op.layout.size(); ++k)
        if (!gone[(size_t)k]) keep.push_back(k);
    return herm_op(w.op.layout.sub(keep), m, 1e-7);
}

ChoiMap random_cptp(long d_in, long d_out, unsigned seed) {
    if (d_in < 1 || d_out < 1) fail_input("dimensions must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    long env = d_in;
    Mat gauss(d_out * env, d_in);
    for (long i = 0; i < d_out * env; ++i)
        for (long j = 0; j < d_in; ++j) gauss(i, j) = cxd(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(gauss);
    Mat v = qr.householderQ() * Mat::Identity(d_out * env, d_in);
    SpaceLayout slot{{{"in", "M", Role::input, 1, (int)d_in},
                      {"out", "M", Role::output, 1, (int)d_out}}};
    auto kernel = [v, d_out, env](const Mat& x) {
        Mat big = v * x * v.adjoint();
        Mat out = Mat::Zero(d_out, d_out);
        for (long a = 0; a < d_out; ++a)
            for (long b = 0; b < d_out; ++b)
                for (long e = 0; e < env; ++e) out(a, b) += big(a * env + e, b * env + e);
        return out;
    };
    return {choi_of_map(slot, kernel), MapKind::cptp};
}

}  // namespace pmx
