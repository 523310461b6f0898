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

#include "pmx/constraints.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unsupported/Eigen/KroneckerProduct>

#include "pmx/basis.hpp"

namespace pmx {
namespace {

std::vector<std::string> output_labels_of_site(const SpaceLayout& lay,
                                               const std::string& site) {
    bool seen = false;
    std::vector<std::string> out;
    for (int k = 0; k < lay.size(); ++k) {
        const auto& f = lay.factor(k);
        if (f.site != site) continue;
        seen = true;
        if (f.role == Role::output) out.push_back(f.label);
    }
    if (!seen) fail_input("unknown site '" + site + "'");
    return out;
}

// residuals of the two conditions forbidding signalling from -> to
std::pair<double, double> oneway_pair(const HermOp& w, const std::string& from,
                                      const std::string& to) {
    auto from_out = output_labels_of_site(w.layout, from);
    auto to_out = output_labels_of_site(w.layout, to);
    double r1 = max_abs((w.mat - trace_and_replace(w, from_out).mat).eval());
    auto red = partial_trace(w, w.layout.labels_of_site(from));
    double r2 = max_abs((red.mat - trace_and_replace(red, to_out).mat).eval());
    return {r1, r2};
}

HermOp drop_covered(const HermOp& cur, const std::vector<std::string>& labels,
                    const Mat& m) {
    auto removed = cur.layout.indices_of(labels);
    std::set<int> gone(removed.begin(), removed.end());
    std::vector<int> keep;
    for (int k = 0; k < cur.layout.size(); ++k)
        if (!gone.count(k)) keep.push_back(k);
    return HermOp{cur.layout.sub(keep), m};
}

struct SlotProbeSet {
    std::vector<std::string> labels;
    HermOp base;                 // normalized identity channel
    std::vector<HermOp> diffs;   // traceless probe directions
};

SlotProbeSet slot_probe_set(const SpaceLayout& lay, const ProcessSlot& slot) {
    std::vector<int> pos = slot.in_positions;
    pos.insert(pos.end(), slot.out_positions.begin(), slot.out_positions.end());
    auto sub = lay.sub(pos);
    auto span = cptp_affine_span(slot.d_in, slot.d_out);
    SlotProbeSet ps{sub.labels(), HermOp{sub, span[0].mat}, {}};
    for (size_t i = 1; i < span.size(); ++i)
        ps.diffs.push_back(HermOp{sub, (span[i].mat - span[0].mat).eval()});
    return ps;
}

// max |final| over tuples assigning each listed slot either the normalized
// identity channel or a traceless direction, with at least one direction
double span_difference_residual(const HermOp& w, const std::vector<SlotProbeSet>& sets) {
    double res = 0.0;
    std::function<void(const HermOp&, size_t, bool)> dfs = [&](const HermOp& cur, size_t k,
                                                               bool any) {
        if (k == sets.size()) {
            if (any) res = std::max(res, max_abs(cur.mat));
            return;
        }
        dfs(drop_covered(cur, sets[k].labels, partial_apply(cur, sets[k].base)), k + 1, any);
        for (const auto& d : sets[k].diffs)
            dfs(drop_covered(cur, sets[k].labels, partial_apply(cur, d)), k + 1, true);
    };
    dfs(w, 0, false);
    return res;
}

std::vector<double> comb_cut_residuals(const HermOp& w,
                                       const std::vector<std::string>& order) {
    auto sites = w.layout.site_names();
    std::set<std::string> want(order.begin(), order.end());
    if (want.size() != order.size()) fail_input("order repeats a site");
    if (want != std::set<std::string>(sites.begin(), sites.end()))
        fail_input("order must cover the layout's sites exactly");

    auto slots = process_slots(w.layout);
    std::vector<double> res;
    for (size_t cut = 1; cut < order.size(); ++cut) {
        std::set<std::string> suffix(order.begin() + (long)cut, order.end());
        std::vector<SlotProbeSet> sets;
        for (const auto& s : slots)
            if (suffix.count(s.site)) sets.push_back(slot_probe_set(w.layout, s));
        res.push_back(span_difference_residual(w, sets));
    }
    return res;
}

const ProcessSlot& find_slot(const std::vector<ProcessSlot>& slots, const SlotKey& key) {
    for (const auto& s : slots)
        if (s.site == key.first && s.trial == key.second) return s;
    fail_input("unknown slot " + key.first + "@" + std::to_string(key.second));
}

std::vector<int> slot_positions(const std::vector<ProcessSlot>& slots,
                                const std::vector<SlotKey>& keys) {
    std::set<std::pair<std::string, int>> seen;
    std::vector<int> pos;
    for (const auto& k : keys) {
        if (!seen.insert(k).second)
            fail_input("slot " + k.first + " listed twice");
        const auto& s = find_slot(slots, k);
        pos.insert(pos.end(), s.in_positions.begin(), s.in_positions.end());
        pos.insert(pos.end(), s.out_positions.begin(), s.out_positions.end());
    }
    std::sort(pos.begin(), pos.end());
    return pos;
}

// |tr[(x_t O_t) rho] - target(tuple)| maximized over tuples; per_trial[t][j]
// is the j-th choice already aligned to trial t's factors. Null targets mean
// the constraint value is zero.
double tuple_max_residual(const HermOp& rho_n,
                          const std::vector<std::vector<HermOp>>& per_trial,
                          const std::vector<double>* targets) {
    double res = 0.0;
    std::function<void(const HermOp&, size_t, double)> dfs = [&](const HermOp& cur, size_t t,
                                                                 double prod) {
        if (t == per_trial.size()) {
            res = std::max(res, std::abs(std::real(cur.mat(0, 0)) - prod));
            return;
        }
        for (size_t j = 0; j < per_trial[t].size(); ++j) {
            const auto& op = per_trial[t][j];
            auto next = drop_covered(cur, op.layout.labels(), partial_apply(cur, op));
            dfs(next, t + 1, targets ? prod * (*targets)[j] : 0.0);
        }
    };
    dfs(rho_n, 0, targets ? 1.0 : 0.0);
    return res;
}

std::vector<std::vector<HermOp>> align_per_trial(const HermOp& rho_n,
                                                 const std::vector<HermOp>& ops, int n) {
    auto blocks = rho_n.layout.trial_blocks();
    if ((int)blocks.size() != n) fail_input("trial count mismatch");
    std::vector<std::vector<HermOp>> per_trial;
    for (const auto& [first, end] : blocks) {
        std::vector<int> pos;
        for (int k = first; k < end; ++k) pos.push_back(k);
        auto sub = rho_n.layout.sub(pos);
        std::vector<HermOp> row;
        for (const auto& op : ops) row.push_back(relabel(op, sub));
        per_trial.push_back(std::move(row));
    }
    return per_trial;
}

void check_expectation_spec(const ProductExpectation& spec) {
    if (spec.observables.empty()) fail_input("no observables given");
    if (spec.observables.size() != spec.expectations.size())
        fail_input("observable and expectation counts differ");
}

void check_family(const DefinettiFamily& fam) {
    if (fam.maps.empty()) fail_input("empty constraint family");
    if (fam.maps.size() != fam.weights.size())
        fail_input("map and weight counts differ");
    for (double q : fam.weights)
        if (!(q > 0.0)) fail_input("weight must be strictly positive");
    for (const auto& m : fam.maps) {
        if (!m.in_layout()) fail_input("family map lacks an input layout");
        if (m.out_dim() != fam.maps[0].out_dim() ||
            m.out_layout().has_value() != fam.maps[0].out_layout().has_value())
            fail_input("family maps must share a codomain");
    }
}

}  // namespace

double ns_twoway_residual(const HermOp& w, const std::string& site_a,
                          const std::string& site_b) {
    auto outs = output_labels_of_site(w.layout, site_a);
    auto outs_b = output_labels_of_site(w.layout, site_b);
    outs.insert(outs.end(), outs_b.begin(), outs_b.end());
    return max_abs((w.mat - trace_and_replace(w, outs).mat).eval());
}

double ns_oneway_residual(const HermOp& w, const std::string& from_site,
                          const std::string& to_site) {
    auto [r1, r2] = oneway_pair(w, from_site, to_site);
    return std::max(r1, r2);
}

double comb_residual(const HermOp& w, const std::vector<std::string>& order) {
    auto res = comb_cut_residuals(w, order);
    double m = 0.0;
    for (double r : res) m = std::max(m, r);
    return m;
}

std::vector<ChoiMap> default_signalling_probes(const ProcessMatrix& w,
                                               const std::vector<SlotKey>& slots,
                                               int n_random, unsigned seed) {
    auto all = process_slots(w.op.layout);
    auto pos = slot_positions(all, slots);
    auto sub = w.op.layout.sub(pos);

    std::vector<int> out_pos;
    long d_in = 1, d_out = 1;
    for (int k = 0; k < sub.size(); ++k) {
        if (sub.factor(k).role == Role::output) {
            out_pos.push_back(k);
            d_out *= sub.factor(k).dim;
        } else {
            d_in *= sub.factor(k).dim;
        }
    }

    std::vector<ChoiMap> probes;
    // computational-basis repreparations, one per joint output assignment
    std::vector<int> digit(out_pos.size(), 0);
    for (long rep = 0; rep < d_out; ++rep) {
        Mat m = Mat::Identity(1, 1);
        size_t oi = 0;
        for (int k = 0; k < sub.size(); ++k) {
            long d = sub.factor(k).dim;
            Mat f;
            if (sub.factor(k).role == Role::output) {
                f = Mat::Zero(d, d);
                f(digit[oi], digit[oi]) = 1.0;
                ++oi;
            } else {
                f = Mat::Identity(d, d);
            }
            m = Eigen::kroneckerProduct(m, f).eval();
        }
        probes.push_back({HermOp{sub, m}, MapKind::cptp});
        for (int k = (int)digit.size() - 1; k >= 0; --k) {
            if (++digit[(size_t)k] < sub.factor(out_pos[(size_t)k]).dim) break;
            digit[(size_t)k] = 0;
        }
    }

    // seeded random channels, regrouped from (joint in, joint out) onto the
    // interleaved slot factors
    std::vector<Factor> grouped;
    for (int k = 0; k < sub.size(); ++k)
        if (sub.factor(k).role != Role::output) grouped.push_back(sub.factor(k));
    for (int k : out_pos) grouped.push_back(sub.factor(k));
    SpaceLayout glay{grouped};
    std::vector<int> perm(grouped.size());
    for (int p = 0; p < sub.size(); ++p)
        perm[(size_t)p] = glay.index_of(sub.factor(p).label);
    for (int i = 0; i < n_random; ++i) {
        auto rc = random_cptp(d_in, d_out, seed + (unsigned)i);
        auto fine = permute_factors(HermOp{glay, rc.op.mat}, perm);
        probes.push_back({fine, MapKind::cptp});
    }
    return probes;
}

double signalling_strength(const ProcessMatrix& w, const std::vector<SlotKey>& from,
                           const std::vector<SlotKey>& to,
                           const std::vector<ChoiMap>& probes) {
    for (const auto& f : from)
        for (const auto& t : to)
            if (f == t)
                fail_input("slot " + f.first + "@" + std::to_string(f.second) +
                           " cannot be in both sets");
    auto all = process_slots(w.op.layout);
    auto from_pos = slot_positions(all, from);
    auto to_pos = slot_positions(all, to);
    if (to_pos.empty()) fail_input("empty receiver set");
    auto from_sub = w.op.layout.sub(from_pos);

    std::set<std::pair<std::string, int>> named;
    for (const auto& k : from) named.insert(k);
    for (const auto& k : to) named.insert(k);
    std::vector<const ProcessSlot*> spectators;
    for (const auto& s : all)
        if (!named.count({s.site, s.trial})) spectators.push_back(&s);

    std::vector<HermOp> reduced;
    for (const auto& probe : probes) {
        auto rel = relabel(probe.op, from_sub);
        auto tp = partial_trace(rel, rel.layout.labels_of_role(Role::output));
        if (max_abs((tp.mat - Mat::Identity(tp.mat.rows(), tp.mat.cols())).eval()) > 1e-8)
            fail_input("probe is not trace preserving");

        auto cur = drop_covered(w.op, from_sub.labels(), partial_apply(w.op, rel));
        for (const auto* s : spectators) {
            std::vector<int> pos = s->in_positions;
            pos.insert(pos.end(), s->out_positions.begin(), s->out_positions.end());
            auto labels = w.op.layout.sub(pos).labels();
            auto pt = partial_trace(cur, labels);
            cur = HermOp{pt.layout, (pt.mat / (double)s->d_out).eval()};
        }
        double tr = std::real(cur.mat.trace());
        if (std::abs(tr) < 1e-12) fail_input("reduced process has vanishing trace");
        reduced.push_back(HermOp{cur.layout, (cur.mat / tr).eval()});
    }

    double strength = 0.0;
    for (size_t i = 0; i < reduced.size(); ++i)
        for (size_t j = i + 1; j < reduced.size(); ++j) {
            HermOp diff{reduced[i].layout, (reduced[i].mat - reduced[j].mat).eval()};
            strength = std::max(strength, 0.5 * trace_norm(diff));
        }
    return strength;
}

double product_expectation_residual(const HermOp& rho_n, const ProductExpectation& spec,
                                    int n) {
    check_expectation_spec(spec);
    auto per_trial = align_per_trial(rho_n, spec.observables, n);
    return tuple_max_residual(rho_n, per_trial, &spec.expectations);
}

std::vector<HermOp> center_constraints(const ProductExpectation& spec) {
    check_expectation_spec(spec);
    std::vector<HermOp> out;
    for (size_t j = 0; j < spec.observables.size(); ++j) {
        const auto& r = spec.observables[j];
        out.push_back(herm_op(
            r.layout, (r.mat - spec.expectations[j] * Mat::Identity(r.mat.rows(),
                                                                    r.mat.cols()))
                          .eval()));
    }
    return out;
}

CenteringReport centering_equivalence_check(const std::vector<HermOp>& rho_seq,
                                            const ProductExpectation& spec, double atol) {
    check_expectation_spec(spec);
    auto sigmas = center_constraints(spec);
    CenteringReport rep;
    for (size_t i = 0; i < rho_seq.size(); ++i) {
        int n = (int)i + 1;
        rep.product_residual =
            std::max(rep.product_residual, product_expectation_residual(rho_seq[i], spec, n));
        auto per_trial = align_per_trial(rho_seq[i], sigmas, n);
        rep.centered_residual =
            std::max(rep.centered_residual, tuple_max_residual(rho_seq[i], per_trial, nullptr));
    }
    rep.product_ok = rep.product_residual <= atol;
    rep.centered_ok = rep.centered_residual <= atol;
    rep.agree = rep.product_ok == rep.centered_ok;
    return rep;
}

KernelAggregate weighted_kernel_aggregate(const std::vector<SuperOp>& maps,
                                          const std::vector<double>& weights,
                                          const HermOp& v) {
    if (maps.empty()) fail_input("no maps given");
    if (maps.size() != weights.size()) fail_input("map and weight counts differ");
    for (double q : weights)
        if (!(q > 0.0)) fail_input("weight must be strictly positive");
    RVec c = op_coords(v);
    KernelAggregate out;
    out.aggregate = RVec::Zero(c.size());
    for (size_t y = 0; y < maps.size(); ++y) {
        const RMat& m = maps[y].matrix();
        if (m.cols() != c.size()) fail_input("map does not act on the given operator");
        RVec img = m * c;
        out.individual.push_back(img.norm());
        out.aggregate += weights[y] * (m.transpose() * img);
    }
    return out;
}

double definetti_type_residual(const HermOp& rho_n, const DefinettiType& spec, int n) {
    auto blocks = rho_n.layout.trial_blocks();
    if ((int)blocks.size() != n) fail_input("trial count mismatch");
    double res = 0.0;
    auto st0 = to_slot_tensor(rho_n);
    for (const auto& fam : spec.families) {
        check_family(fam);
        SlotTensor acc;
        bool first = true;
        for (size_t y = 0; y < fam.maps.size(); ++y) {
            SlotTensor st = st0;
            for (int t = 0; t < n; ++t) apply_to_slot(st, t, fam.maps[y]);
            if (first) {
                acc = slot_zeros_like(st);
                first = false;
            }
            slot_axpy(acc, st, fam.weights[y]);
        }
        res = std::max(res, slot_tensor_norm(acc));
    }
    return res;
}

ResidualReport evaluate_constraint(const HermOp& w, const ConstraintSpec& spec) {
    ResidualReport rep;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, TwoWayNoSignalling>) {
                rep.residuals = {ns_twoway_residual(w, s.site_a, s.site_b)};
            } else if constexpr (std::is_same_v<T, OneWayNoSignalling>) {
                auto [r1, r2] = oneway_pair(w, s.from_site, s.to_site);
                rep.residuals = {r1, r2};
            } else if constexpr (std::is_same_v<T, CombOrder>) {
                rep.residuals = comb_cut_residuals(w, s.order);
            } else if constexpr (std::is_same_v<T, ProductExpectation>) {
                rep.residuals = {
                    product_expectation_residual(w, s, w.layout.trial_count())};
            } else {
                int n = w.layout.trial_count();
                for (const auto& fam : s.families)
                    rep.residuals.push_back(
                        definetti_type_residual(w, DefinettiType{{fam}}, n));
            }
        },
        spec);
    for (double r : rep.residuals) rep.max_residual = std::max(rep.max_residual, r);
    return rep;
}

}  // namespace pmx
