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

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pmx/herm_op.hpp"
#include "pmx/process.hpp"
#include "pmx/superop.hpp"

namespace pmx {

// Affine constraint families a process or multi-trial state can be held to.
struct TwoWayNoSignalling {
    std::string site_a, site_b;
};
struct OneWayNoSignalling {
    std::string from_site, to_site;
};
struct CombOrder {
    std::vector<std::string> order;
};
// tr[(R_1 x ... x R_n) rho] must equal the product of the target expectations,
// for every tuple drawn from the observable list.
struct ProductExpectation {
    std::vector<HermOp> observables;
    std::vector<double> expectations;
};
// One weighted family of linear maps; the constraint is that the weighted sum
// of n-fold tensor powers annihilates the state.
struct DefinettiFamily {
    std::vector<SuperOp> maps;
    std::vector<double> weights;
};
struct DefinettiType {
    std::vector<DefinettiFamily> families;
};

using ConstraintSpec = std::variant<TwoWayNoSignalling, OneWayNoSignalling, CombOrder,
                                    ProductExpectation, DefinettiType>;

struct ResidualReport {
    std::vector<double> residuals;
    double max_residual = 0.0;
};

// Largest entry of w minus its trace-and-replace over both sites' outputs.
double ns_twoway_residual(const HermOp& w, const std::string& site_a,
                          const std::string& site_b);

// Residual of the pair of conditions forbidding signalling from one site to
// another: the sender's output must be replaceable, and the receiver's
// marginal must have a replaceable output once the sender is traced out.
double ns_oneway_residual(const HermOp& w, const std::string& from_site,
                          const std::string& to_site);

// Max over order cuts of the residual forbidding signalling from the suffix
// sites to the prefix sites. Zero exactly for processes realisable as a
// channel sequence in the given order.
double comb_residual(const HermOp& w, const std::vector<std::string>& order);

// (site, trial) handle for one open slot of a process.
using SlotKey = std::pair<std::string, int>;

// Computational-basis repreparations plus seeded random channels, jointly
// covering the listed slots.
std::vector<ChoiMap> default_signalling_probes(const ProcessMatrix& w,
                                               const std::vector<SlotKey>& slots,
                                               int n_random = 20, unsigned seed = 11);

// Max over probe pairs of half the trace-norm distance between the unit-trace
// reduced processes left on `to` after feeding each probe into `from`.
// Slots in neither set are closed with the depolarizing channel.
double signalling_strength(const ProcessMatrix& w, const std::vector<SlotKey>& from,
                           const std::vector<SlotKey>& to,
                           const std::vector<ChoiMap>& probes);

// Max over observable tuples of |tr[(R_1 x ... x R_n) rho] - prod r_j|.
double product_expectation_residual(const HermOp& rho_n, const ProductExpectation& spec,
                                    int n);

// sigma_j = R_j - r_j * identity, one per listed observable.
std::vector<HermOp> center_constraints(const ProductExpectation& spec);

struct CenteringReport {
    double product_residual = 0.0;
    double centered_residual = 0.0;
    bool product_ok = false;
    bool centered_ok = false;
    bool agree = false;
};

// Evaluates both the product form and its centered zero-mean rewriting on a
// sequence of 1..N trial states; for exchangeable input the verdicts agree.
CenteringReport centering_equivalence_check(const std::vector<HermOp>& rho_seq,
                                            const ProductExpectation& spec,
                                            double atol = kDefaultAtol);

struct KernelAggregate {
    RVec aggregate;
    std::vector<double> individual;
};

// aggregate = sum_y q_y (L_y^T L_y)(v) in input coordinates; individual_y is
// the norm of L_y(v). The aggregate vanishes exactly when every individual
// does, for strictly positive weights.
KernelAggregate weighted_kernel_aggregate(const std::vector<SuperOp>& maps,
                                          const std::vector<double>& weights,
                                          const HermOp& v);

// Max over families of the norm of sum_y q_y L_y^{x n}(rho_n).
double definetti_type_residual(const HermOp& rho_n, const DefinettiType& spec, int n);

// Uniform entry point: one residual per constraint component.
ResidualReport evaluate_constraint(const HermOp& w, const ConstraintSpec& spec);

}  // namespace pmx
