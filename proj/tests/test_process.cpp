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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unsupported/Eigen/KroneckerProduct>

#include <Eigen/Eigenvalues>
#include <random>

#include "doctest.h"
#include "pmx/basis.hpp"
#include "pmx/process.hpp"
#include "test_util.hpp"

using namespace pmx;

namespace {

// Explicit channel-identity operator: sum_{jk} |jj><kk|.
Mat identity_choi_oracle(int d) {
    Mat k = Mat::Zero(d * d, d * d);
    for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) k(j * d + j, l * d + l) = 1.0;
    return k;
}

SpaceLayout slot_layout(const std::string& site, int d_in, int d_out, int trial = 1) {
    return SpaceLayout{{{site + ":in", site, Role::input, trial, d_in},
                        {site + ":out", site, Role::output, trial, d_out}}};
}

double trace_distance(const Mat& a, const Mat& b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double min_eig_of(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    return es.eigenvalues().minCoeff();
}

// Idle chain for two trials of a single site: rho feeds trial 1, trial 1's
// output is wired to trial 2's input, trial 2's output is left open.
HermOp two_trial_idle_chain(const Mat& rho) {
    SpaceLayout l1{{{"A:in@1", "A", Role::input, 1, 2}}};
    SpaceLayout lmid{{{"A:out@1", "A", Role::output, 1, 2}, {"A:in@2", "A", Role::input, 2, 2}}};
    SpaceLayout l2{{{"A:out@2", "A", Role::output, 2, 2}}};
    auto w = kron(herm_op(l1, rho), herm_op(lmid, identity_choi_oracle(2)));
    return kron(w, herm_op(l2, Mat::Identity(2, 2)));
}

}  // namespace

TEST_CASE("standard Choi forms") {
    auto slot = slot_layout("A", 2, 2);

    SUBCASE("identity channel") {
        auto m = build_standard_choi(StandardChoi::identity, slot);
        CHECK(m.kind == MapKind::cptp);
        CHECK(max_abs(m.op.mat - identity_choi_oracle(2)) < 1e-12);
        CHECK(std::abs(m.op.mat.trace().real() - 2.0) < 1e-12);
        auto d3 = build_standard_choi(StandardChoi::identity, slot_layout("A", 3, 3));
        CHECK(max_abs(d3.op.mat - identity_choi_oracle(3)) < 1e-12);
    }

    SUBCASE("depolarizing") {
        auto m = build_standard_choi(StandardChoi::depolarizing, slot);
        CHECK(max_abs(m.op.mat - Mat::Identity(4, 4) / 2.0) < 1e-12);
    }

    SUBCASE("trace and prepare") {
        std::mt19937_64 rng(11);
        Mat rho = random_density(2, rng);
        ChoiParams p;
        p.state = rho;
        auto m = build_standard_choi(StandardChoi::trace_prepare, slot, p);
        CHECK(m.kind == MapKind::cptp);
        Mat oracle = Eigen::kroneckerProduct(Mat::Identity(2, 2), rho.transpose()).eval();
        CHECK(max_abs(m.op.mat - oracle) < 1e-12);
        auto tr_out = partial_trace(m.op, {"A:out"});
        CHECK(max_abs(tr_out.mat - Mat::Identity(2, 2)) < 1e-12);

        ChoiParams bad;
        bad.state = pauli_z();  // not a density matrix
        CHECK_THROWS_AS(build_standard_choi(StandardChoi::trace_prepare, slot, bad),
                        std::invalid_argument);
    }

    SUBCASE("measure and prepare") {
        std::mt19937_64 rng(12);
        Mat rho = random_density(2, rng);
        Mat e = (Mat(2, 2) << 0.7, 0.1, 0.1, 0.2).finished();
        ChoiParams p;
        p.effect = e;
        p.state = rho;
        auto m = build_standard_choi(StandardChoi::measure_prepare, slot, p);
        CHECK(m.kind == MapKind::cp);
        Mat oracle = Eigen::kroneckerProduct(e, rho.transpose()).eval();
        CHECK(max_abs(m.op.mat - oracle) < 1e-12);
    }

    SUBCASE("measurement with trivial output") {
        // Scalar-output slot: the Choi operator collapses to the effect itself.
        auto meas = slot_layout("A", 2, 1);
        Mat e = (Mat(2, 2) << 1.0, 0.0, 0.0, 0.0).finished();
        ChoiParams p;
        p.effect = e;
        p.state = Mat::Identity(1, 1);
        auto m = build_standard_choi(StandardChoi::measure_prepare, meas, p);
        CHECK(max_abs(m.op.mat - e) < 1e-12);
    }

    SUBCASE("unitary") {
        ChoiParams p;
        p.unitary = pauli_x();
        auto m = build_standard_choi(StandardChoi::unitary, slot, p);
        // Oracle: transpose of sum_{jk} |j><k| (x) X|j><k|X.
        Mat acc = Mat::Zero(4, 4);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                Mat ejk = Mat::Zero(2, 2);
                ejk(j, k) = 1.0;
                acc += Eigen::kroneckerProduct(ejk, (pauli_x() * ejk * pauli_x()).eval()).eval();
            }
        CHECK(max_abs(m.op.mat - acc.transpose()) < 1e-12);

        ChoiParams bad;
        bad.unitary = (Mat(2, 2) << 1, 1, 0, 1).finished();
        CHECK_THROWS_AS(build_standard_choi(StandardChoi::unitary, slot, bad),
                        std::invalid_argument);
    }
}

TEST_CASE("instrument validation") {
    auto slot = slot_layout("A", 2, 2);
    std::mt19937_64 rng(21);

    SUBCASE("measure and reprepare instrument is valid") {
        Instrument ins;
        for (int b = 0; b < 2; ++b) {
            Mat e = Mat::Zero(2, 2);
            e(b, b) = 1.0;
            ChoiParams p;
            p.effect = e;
            p.state = random_density(2, rng);
            ins.outcomes.push_back(build_standard_choi(StandardChoi::measure_prepare, slot, p));
        }
        auto rep = validate_instrument(ins);
        CHECK(rep.valid);
        CHECK(rep.tp_residual < 1e-10);
        for (double ev : rep.outcome_min_eigs) CHECK(ev > -1e-10);
    }

    SUBCASE("single CPTP map is a one-outcome instrument") {
        Instrument ins;
        ins.outcomes.push_back(build_standard_choi(StandardChoi::identity, slot));
        auto rep = validate_instrument(ins);
        CHECK(rep.valid);
        CHECK(rep.tp_residual < 1e-12);
    }

    SUBCASE("halved and doubled identity chains") {
        auto id = build_standard_choi(StandardChoi::identity, slot);
        Instrument halves;
        ChoiMap h{herm_op(id.op.layout, (0.5 * id.op.mat).eval()), MapKind::cp};
        halves.outcomes = {h, h};
        CHECK(validate_instrument(halves).valid);

        Instrument doubled;
        doubled.outcomes = {id, id};
        auto rep = validate_instrument(doubled);
        CHECK(!rep.valid);
        CHECK(std::abs(rep.tp_residual - 1.0) < 1e-12);  // tr_out = 2*1, max entry off by 1
    }
}

TEST_CASE("trace-preserving affine span") {
    SUBCASE("trivial dimensions") {
        auto span = cptp_affine_span(1, 1);
        REQUIRE(span.size() == 1);
        CHECK(std::abs(span[0].mat(0, 0).real() - 1.0) < 1e-12);
    }

    SUBCASE("qubit-to-qubit count and trace condition") {
        auto span = cptp_affine_span(2, 2);
        REQUIRE((long)span.size() == 13);
        for (const auto& el : span) {
            auto pt = partial_trace(el, {el.layout.factor(1).label});
            CHECK(max_abs(pt.mat - Mat::Identity(2, 2)) < 1e-10);
        }
    }

    SUBCASE("affine membership of random trace-preserving maps") {
        auto span = cptp_affine_span(2, 2);
        // Coordinates of each span element, one column per element, plus an
        // affine row forcing the combination weights to sum to one.
        Eigen::MatrixXd a(17, span.size());
        for (size_t i = 0; i < span.size(); ++i) {
            RVec c = op_coords(span[i]);
            for (int r = 0; r < 16; ++r) a(r, i) = c(r);
            a(16, i) = 1.0;
        }
        for (unsigned seed = 0; seed < 20; ++seed) {
            auto m = random_cptp(2, 2, seed);
            RVec c = op_coords(herm_op(span[0].layout, m.op.mat));
            Eigen::VectorXd rhs(17);
            for (int r = 0; r < 16; ++r) rhs(r) = c(r);
            rhs(16) = 1.0;
            Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(rhs);
            CHECK((a * x - rhs).cwiseAbs().maxCoeff() < 1e-9);
        }
    }

    SUBCASE("unequal dimensions") {
        auto span = cptp_affine_span(2, 3);
        CHECK((long)span.size() == 1 + 4 * 8);
        for (const auto& el : span) {
            auto pt = partial_trace(el, {el.layout.factor(1).label});
            CHECK(max_abs(pt.mat - Mat::Identity(2, 2)) < 1e-10);
        }
    }
}

TEST_CASE("process validation") {
    std::mt19937_64 rng(31);

    SUBCASE("states are processes with trivial outputs") {
        SpaceLayout lay{
            {{"A:in", "A", Role::input, 1, 3}, {"A:out", "A", Role::output, 1, 1}}};
        auto w = herm_op(lay, random_density(3, rng));
        auto rep = validate_process(w, {"A"});
        CHECK(rep.verdict);
        CHECK(rep.normalization_residual < 1e-9);
    }

    SUBCASE("product of local preparations") {
        std::vector<Factor> fs = {{"A:in", "A", Role::input, 1, 2},
                                  {"A:out", "A", Role::output, 1, 2},
                                  {"B:in", "B", Role::input, 1, 2},
                                  {"B:out", "B", Role::output, 1, 2}};
        Mat w4 = Eigen::kroneckerProduct(
                     Eigen::kroneckerProduct(random_density(2, rng), Mat::Identity(2, 2)).eval(),
                     Eigen::kroneckerProduct(random_density(2, rng), Mat::Identity(2, 2)).eval())
                     .eval();
        auto w = herm_op(SpaceLayout{fs}, w4);
        auto rep = validate_process(w, {"A", "B"});
        CHECK(rep.verdict);
        CHECK(rep.psd_residual < 1e-12);
        CHECK(rep.trace_residual < 1e-9);
        CHECK(rep.normalization_residual < 1e-9);
        CHECK(!rep.sampled);

        auto doubled = herm_op(w.layout, (2.0 * w.mat).eval());
        auto bad = validate_process(doubled, {"A", "B"});
        CHECK(!bad.verdict);
        CHECK(std::abs(bad.trace_residual - 4.0) < 1e-9);
    }

    SUBCASE("idle chain is a valid process") {
        auto w = two_trial_idle_chain((Mat(2, 2) << 1, 0, 0, 0).finished());
        auto rep = validate_process(w, {"A"});
        CHECK(rep.verdict);
        CHECK(rep.tuples_checked == 169);
        // A traceless term on an output factor keeps the trace but breaks the
        // normalization condition on some probe tuple.
        auto bump = embed(herm_op(w.layout.sub({1}), pauli_z()), w.layout);
        auto skewed = herm_op(w.layout, (w.mat + 0.05 * bump.mat).eval());
        auto bad = validate_process(skewed, {"A"});
        CHECK(bad.trace_residual < 1e-9);
        CHECK(bad.normalization_residual > 1e-3);
        CHECK(!bad.verdict);
    }
}

TEST_CASE("born probabilities") {
    SUBCASE("preparation convention") {
        SpaceLayout lay{
            {{"A:in", "A", Role::input, 1, 2}, {"A:out", "A", Role::output, 1, 1}}};
        Mat ket0 = Mat::Zero(2, 2);
        ket0(0, 0) = 1.0;
        auto w = make_process(herm_op(lay, ket0));
        ChoiParams p;
        p.effect = ket0;
        p.state = Mat::Identity(1, 1);
        auto m = build_standard_choi(StandardChoi::measure_prepare, slot_layout("A", 2, 1), p);
        CHECK(std::abs(born_probability(w, {m}) - 1.0) < 1e-12);
    }

    SUBCASE("identity channel propagates computational outcomes") {
        Mat ket0 = Mat::Zero(2, 2);
        ket0(0, 0) = 1.0;
        auto w = make_process(two_trial_idle_chain(ket0));
        double total = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                ChoiParams pa;
                pa.effect = Mat::Zero(2, 2);
                pa.effect(a, a) = 1.0;
                pa.state = ket0;  // reprepare |0>
                ChoiParams pb;
                pb.effect = Mat::Zero(2, 2);
                pb.effect(b, b) = 1.0;
                pb.state = ket0;
                auto ma =
                    build_standard_choi(StandardChoi::measure_prepare, slot_layout("A", 2, 2, 1), pa);
                auto mb =
                    build_standard_choi(StandardChoi::measure_prepare, slot_layout("A", 2, 2, 2), pb);
                double pr = born_probability(w, {ma, mb});
                if (a == 0 && b == 0) CHECK(std::abs(pr - 1.0) < 1e-12);
                total += pr;
            }
        CHECK(std::abs(total - 1.0) < 1e-10);
    }

    SUBCASE("full instruments sum to one on a random-input chain") {
        std::mt19937_64 rng(41);
        auto w = make_process(two_trial_idle_chain(random_density(2, rng)));
        // Random two-outcome measure-and-reprepare instruments at both trials.
        Mat g = random_hermitian(2, rng);
        Eigen::SelfAdjointEigenSolver<Mat> es(g);
        Mat u = es.eigenvectors();
        // One fixed repreparation per outcome, shared across the joint loop.
        std::vector<Mat> rep_a = {random_density(2, rng), random_density(2, rng)};
        std::vector<Mat> rep_b = {random_density(2, rng), random_density(2, rng)};
        double total = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                ChoiParams pa;
                pa.effect = u.col(a) * u.col(a).adjoint();
                pa.state = rep_a[a];
                ChoiParams pb;
                pb.effect = Mat::Zero(2, 2);
                pb.effect(b, b) = 1.0;
                pb.state = rep_b[b];
                auto ma =
                    build_standard_choi(StandardChoi::measure_prepare, slot_layout("A", 2, 2, 1), pa);
                auto mb =
                    build_standard_choi(StandardChoi::measure_prepare, slot_layout("A", 2, 2, 2), pb);
                total += born_probability(w, {ma, mb});
            }
        CHECK(std::abs(total - 1.0) < 1e-10);
    }

    SUBCASE("probability is linear in each site's map") {
        std::mt19937_64 rng(42);
        auto w = make_process(two_trial_idle_chain(random_density(2, rng)));
        auto m1 = random_cptp(2, 2, 1);
        auto m2 = random_cptp(2, 2, 2);
        auto m3 = random_cptp(2, 2, 3);
        auto relabel_slot = [&](const ChoiMap& m, int trial) {
            return ChoiMap{relabel(m.op, slot_layout("A", 2, 2, trial)), m.kind};
        };
        double lhs = born_probability(
            w, {relabel_slot(m1, 1),
                ChoiMap{herm_op(slot_layout("A", 2, 2, 2),
                                (0.25 * m2.op.mat + 0.75 * m3.op.mat).eval()),
                        MapKind::cptp}});
        double rhs = 0.25 * born_probability(w, {relabel_slot(m1, 1), relabel_slot(m2, 2)}) +
                     0.75 * born_probability(w, {relabel_slot(m1, 1), relabel_slot(m3, 2)});
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("reduced processes") {
    Mat ket0 = Mat::Zero(2, 2);
    ket0(0, 0) = 1.0;
    Mat ket1 = Mat::Zero(2, 2);
    ket1(1, 1) = 1.0;

    SUBCASE("closing the last trial with the identity channel") {
        auto w = make_process(two_trial_idle_chain(ket0));
        auto id2 = build_standard_choi(StandardChoi::identity, slot_layout("A", 2, 2, 2));
        auto red = reduced_process(w, "A", 2, id2);
        SpaceLayout l1{{{"A:in@1", "A", Role::input, 1, 2}}};
        SpaceLayout l2{{{"A:out@1", "A", Role::output, 1, 2}}};
        auto expect = kron(herm_op(l1, ket0), herm_op(l2, Mat::Identity(2, 2)));
        CHECK(max_abs(red.mat - expect.mat) < 1e-12);
        CHECK(validate_process(red, {"A"}).verdict);
    }

    SUBCASE("different closures of the first trial are distinguishable") {
        auto w = make_process(two_trial_idle_chain(ket0));
        ChoiParams p0;
        p0.state = ket0;
        ChoiParams p1;
        p1.state = ket1;
        auto r0 = reduced_process(
            w, "A", 1, build_standard_choi(StandardChoi::trace_prepare, slot_layout("A", 2, 2, 1), p0));
        auto r1 = reduced_process(
            w, "A", 1, build_standard_choi(StandardChoi::trace_prepare, slot_layout("A", 2, 2, 1), p1));
        // Renormalized reduced processes sit at maximal trace distance.
        Mat a = r0.mat / r0.mat.trace().real();
        Mat b = r1.mat / r1.mat.trace().real();
        CHECK(std::abs(trace_distance(a, b) - 1.0) < 1e-10);
    }

    SUBCASE("no-influence structure makes the reduction unique") {
        std::mt19937_64 rng(51);
        std::vector<Factor> fs = {{"A:in", "A", Role::input, 1, 2},
                                  {"A:out", "A", Role::output, 1, 2},
                                  {"B:in", "B", Role::input, 1, 2},
                                  {"B:out", "B", Role::output, 1, 2}};
        Mat w4 = Eigen::kroneckerProduct(
                     Eigen::kroneckerProduct(random_density(2, rng), Mat::Identity(2, 2)).eval(),
                     Eigen::kroneckerProduct(random_density(2, rng), Mat::Identity(2, 2)).eval())
                     .eval();
        auto w = make_process(herm_op(SpaceLayout{fs}, w4));
        auto ra = reduced_process(w, "B", 1, random_cptp(2, 2, 7));
        auto rb = reduced_process(w, "B", 1, random_cptp(2, 2, 8));
        CHECK(max_abs(ra.mat - rb.mat) < 1e-10);
        CHECK(validate_process(ra, {"A"}).verdict);
    }

    SUBCASE("non-trace-preserving closure is rejected") {
        auto w = make_process(two_trial_idle_chain(ket0));
        ChoiParams p;
        p.effect = ket0;
        p.state = ket0;
        auto cp = build_standard_choi(StandardChoi::measure_prepare, slot_layout("A", 2, 2, 2), p);
        CHECK_THROWS_AS(reduced_process(w, "A", 2, cp), std::invalid_argument);
    }
}

TEST_CASE("random trace-preserving maps") {
    SUBCASE("construction guarantees the trace condition") {
        for (unsigned seed : {0u, 1u, 5u, 99u}) {
            auto m = random_cptp(2, 2, seed);
            auto pt = partial_trace(m.op, {m.op.layout.factor(1).label});
            CHECK(max_abs(pt.mat - Mat::Identity(2, 2)) < 1e-12);
            CHECK(min_eig_of(m.op.mat) > -1e-12);
        }
        auto m23 = random_cptp(2, 3, 4);
        auto pt = partial_trace(m23.op, {m23.op.layout.factor(1).label});
        CHECK(max_abs(pt.mat - Mat::Identity(2, 2)) < 1e-12);
    }

    SUBCASE("deterministic in the seed, distinct across seeds") {
        auto a = random_cptp(2, 2, 17);
        auto b = random_cptp(2, 2, 17);
        auto c = random_cptp(2, 2, 18);
        CHECK(max_abs(a.op.mat - b.op.mat) == 0.0);
        CHECK(max_abs(a.op.mat - c.op.mat) > 1e-3);
    }

    SUBCASE("state preparation corner") {
        auto m = random_cptp(1, 2, 3);
        CHECK(std::abs(m.op.mat.trace().real() - 1.0) < 1e-12);
        CHECK(min_eig_of(m.op.mat) > -1e-12);
    }
}
