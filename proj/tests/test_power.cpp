// cfmimo — system-level simulator for cell-free massive MIMO IoT networks
// Copyright (c) 2026 cfmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "cfmimo/power.hpp"
#include "test_util.hpp"

using namespace cfmimo;
using namespace cfmimo::power;
using cfmimo::testutil::make_instance;
using cfmimo::testutil::random_eta;

namespace {

// all-equal beta with orthonormal pilots: a fully symmetric instance
testutil::Instance symmetric_instance(arma::uword M, arma::uword K, double beta_val,
                                      std::uint64_t seed) {
    testutil::Instance in;
    in.ls.beta = arma::mat(M, K, arma::fill::value(beta_val));
    in.ls.shadow_z = arma::zeros(M, K);
    netgen::PropagationParams prop;
    in.budget = netgen::make_power_budget(0.02, 0.02, 0.2, netgen::noise_power_w(prop));
    in.book = pilots::orthonormal_pilot_book(K + 2, K, seed);
    in.bank = chest::build_lmmse_bank(in.ls, in.book, in.budget.rho_p);
    return in;
}

}  // namespace

TEST_CASE("uplink feasibility basics") {
    const auto in = make_instance(8, 4, 6, 201);
    const perf::UplinkCoeffs c = perf::build_uplink_coeffs(in.ls, in.book, in.bank,
                                                           in.budget.rho_u);

    SUBCASE("t = 0 is feasible") {
        const FeasibilityResult r = uplink_feasible(0.0, c);
        CHECK(r.status == FeasStatus::feasible);
    }

    SUBCASE("the full-power operating point certifies its min SINR") {
        const arma::vec ones(4, arma::fill::ones);
        const double t = perf::sinr_all(c, ones).min();
        const FeasibilityResult r = uplink_feasible(t * (1.0 - 1e-9), c);
        CHECK(r.status == FeasStatus::feasible);
        CHECK(perf::sinr_all(c, r.eta).min() >= t * (1.0 - 1e-6));
    }

    SUBCASE("targets above the single-user bound are infeasible") {
        double bound = 0.0;
        for (arma::uword k = 0; k < 4; k++) {
            arma::vec solo(4, arma::fill::zeros);
            solo[k] = 1.0;
            bound = std::max(bound, perf::sinr(c, solo, k));
        }
        CHECK(uplink_feasible(bound * 1.01, c).status == FeasStatus::infeasible);
    }
}

TEST_CASE("uplink max-min certificates and equalization") {
    for (std::uint64_t seed : {211, 223, 227}) {
        const auto in = make_instance(10, 5, 7, seed);
        const perf::UplinkCoeffs c =
            perf::build_uplink_coeffs(in.ls, in.book, in.bank, in.budget.rho_u);
        BisectionSpec spec;
        const MaxMinResult mm = uplink_maxmin(c, spec);

        CHECK(mm.eta.min() >= 0.0);
        CHECK(mm.eta.max() <= 1.0 + 1e-12);
        CHECK(mm.eta.max() >= 1.0 - 1e-6);  // some box constraint active
        const arma::vec s = perf::sinr_all(c, mm.eta);
        CHECK(s.min() == doctest::Approx(mm.t_star).epsilon(1e-9));
        CHECK(mm.equalization_spread <= 1e-3);
        // bisection certificate
        CHECK(uplink_feasible(mm.t_star * (1.0 - 1e-3), c).status == FeasStatus::feasible);
        CHECK(uplink_feasible(mm.t_star * (1.0 + 1e-3), c).status == FeasStatus::infeasible);
    }
}

TEST_CASE("symmetric instance: optimum is full power with the common SINR") {
    const auto in = symmetric_instance(6, 3, 1e-9, 229);
    const perf::UplinkCoeffs c = perf::build_uplink_coeffs(in.ls, in.book, in.bank,
                                                           in.budget.rho_u);
    const arma::vec ones(3, arma::fill::ones);
    const double common = perf::sinr_all(c, ones).min();
    BisectionSpec spec;
    const MaxMinResult mm = uplink_maxmin(c, spec);
    CHECK(mm.t_star == doctest::Approx(common).epsilon(1e-6));
    CHECK(arma::abs(mm.eta - 1.0).max() < 1e-6);
}

TEST_CASE("target-SINR iteration") {
    const auto in = make_instance(8, 4, 6, 233);
    const perf::UplinkCoeffs c = perf::build_uplink_coeffs(in.ls, in.book, in.bank,
                                                           in.budget.rho_u);
    BisectionSpec bs;
    const MaxMinResult mm = uplink_maxmin(c, bs);

    SUBCASE("single user converges to any target below full-power SINR") {
        const auto one = make_instance(6, 1, 2, 239);
        const perf::UplinkCoeffs c1 =
            perf::build_uplink_coeffs(one.ls, one.book, one.bank, one.budget.rho_u);
        const double cap = perf::sinr(c1, arma::vec{1.0}, 0);
        TargetSpec ts;
        ts.delta = arma::vec{0.4 * cap};
        const TargetResult tr = target_sinr_iterate(c1, ts);
        CHECK(tr.converged);
        CHECK(std::abs(tr.sinr[0] - ts.delta[0]) < ts.epsilon);
    }

    SUBCASE("feasible targets converge with SINR pinned to delta") {
        TargetSpec ts;
        ts.delta = arma::vec{0.9, 0.5, 0.7, 0.8} * mm.t_star;
        const TargetResult tr = target_sinr_iterate(c, ts);
        CHECK(tr.converged);
        CHECK(arma::abs(tr.sinr - ts.delta).max() < ts.epsilon);
        CHECK(tr.eta.min() >= 0.0);
        CHECK(tr.eta.max() <= 1.0);
    }

    SUBCASE("optimality: no smaller power sum achieves the common target") {
        // symmetric case where the minimal-power witness is computable
        const auto sym = symmetric_instance(6, 3, 1e-9, 241);
        const perf::UplinkCoeffs cs =
            perf::build_uplink_coeffs(sym.ls, sym.book, sym.bank, sym.budget.rho_u);
        const MaxMinResult mms = uplink_maxmin(cs, bs);
        const double t = 0.8 * mms.t_star;
        TargetSpec ts;
        ts.delta = arma::vec(3, arma::fill::value(t));
        ts.epsilon = 1e-9;
        ts.max_iters = 5000;
        const TargetResult tr = target_sinr_iterate(cs, ts);
        CHECK(tr.converged);
        const FeasibilityResult w = uplink_feasible(t, cs);  // minimal witness
        CHECK(arma::accu(tr.eta) <= arma::accu(w.eta) * (1.0 + 1e-6));
    }

    SUBCASE("infeasible targets stay bounded and report non-convergence") {
        TargetSpec ts;
        ts.delta = arma::vec(4, arma::fill::value(4.0 * mm.t_star));
        const TargetResult tr = target_sinr_iterate(c, ts);
        CHECK(!tr.converged);
        CHECK(tr.eta.min() >= 0.0);
        CHECK(tr.eta.max() <= 1.0);
    }
}

TEST_CASE("interference load is a two-sided scalable standard map") {
    RandomStream rs(251);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 100; seed++) {
        const auto in = make_instance(6, 4, 3, 300 + seed);
        const perf::UplinkCoeffs c =
            perf::build_uplink_coeffs(in.ls, in.book, in.bank, in.budget.rho_u);
        const arma::vec e1 = random_eta(4, seed, 0.2);
        const double alpha = 1.2 + rs.uniform();
        arma::vec e2(4);
        for (arma::uword k = 0; k < 4; k++) {
            const double span = std::log(alpha) * 0.9;
            e2[k] = e1[k] * std::exp((2.0 * rs.uniform() - 1.0) * span);
            e2[k] = std::min(e2[k], 1.0);
        }
        bool strict = true;
        for (arma::uword k = 0; k < 4; k++)
            strict = strict && e1[k] / alpha < e2[k] && e2[k] < alpha * e1[k];
        if (!strict) continue;
        checked++;
        for (arma::uword k = 0; k < 4; k++) {
            const double i1 = perf::interference_load(c, e1, k);
            const double i2 = perf::interference_load(c, e2, k);
            CHECK(i2 < alpha * i1);
            CHECK(i2 > i1 / alpha);
        }
        // standard-map monotonicity
        const arma::vec smaller = 0.7 * e1;
        for (arma::uword k = 0; k < 4; k++)
            CHECK(perf::interference_load(c, e1, k) >=
                  perf::interference_load(c, smaller, k));
    }
    CHECK(checked > 50);
}

TEST_CASE("drop and retarget") {
    SUBCASE("zero drop fraction reproduces the max-min level") {
        const auto in = make_instance(10, 5, 7, 261);
        const perf::UplinkCoeffs c =
            perf::build_uplink_coeffs(in.ls, in.book, in.bank, in.budget.rho_u);
        BisectionSpec bs;
        const MaxMinResult mm = uplink_maxmin(c, bs);
        const DropResult dr = drop_and_retarget(c, 0.0);
        CHECK(dr.active_set.n_elem == 5);
        CHECK(dr.delta_star == doctest::Approx(mm.t_star).epsilon(0.02));
    }

    SUBCASE("five percent of forty users means exactly two dropped") {
        const auto in = make_instance(48, 40, 50, 263);
        const perf::UplinkCoeffs c =
            perf::build_uplink_coeffs(in.ls, in.book, in.bank, in.budget.rho_u);
        const DropResult dr = drop_and_retarget(c, 0.05);
        CHECK(40 - dr.active_set.n_elem == 2);
    }

    SUBCASE("drop fraction below 1/K keeps everyone") {
        const auto in = make_instance(8, 5, 6, 269);
        const perf::UplinkCoeffs c =
            perf::build_uplink_coeffs(in.ls, in.book, in.bank, in.budget.rho_u);
        const DropResult dr = drop_and_retarget(c, 0.15);  // ceil(0.85*5) = 5
        CHECK(dr.active_set.n_elem == 5);
    }
}

TEST_CASE("cone problem construction") {
    const auto in = make_instance(6, 4, 5, 271);
    const ConeProblem cone = build_cone_problem(in.ls, in.book, in.bank, in.budget.rho_d);
    const arma::uword M = 6, K = 4, n = M * K + 1;

    SUBCASE("matrix dimensions match the conic layout exactly") {
        for (arma::uword k = 0; k < K; k++) {
            CHECK(cone.b_vecs[k].n_elem == n);
            CHECK(cone.f_diags[k].n_elem == n);
            CHECK(cone.p_mats[k].n_rows == K);
            CHECK(cone.p_mats[k].n_cols == n);
            const arma::cx_mat C =
                arma::join_cols(arma::cx_mat(arma::diagmat(cone.f_diags[k]),
                                             arma::zeros(n, n)),
                                cone.p_mats[k]);
            CHECK(C.n_rows == M * K + K + 1);
            CHECK(C.n_cols == M * K + 1);
            // row k of P_k vanishes
            CHECK(arma::norm(cone.p_mats[k].row(k)) == 0.0);
        }
        CHECK(cone.z_diags.size() == M);
        CHECK(cone.zeta[0] == 1.0);
    }

    SUBCASE("cone quadratic equals the downlink SINR") {
        for (std::uint64_t s = 0; s < 20; s++) {
            const arma::mat eta = testutil::random_downlink_eta(in.bank.gamma, 400 + s);
            arma::vec zeta(n, arma::fill::zeros);
            zeta[0] = 1.0;
            for (arma::uword k = 0; k < K; k++)
                for (arma::uword m = 0; m < M; m++)
                    zeta[cone.index(m, k)] = std::sqrt(eta(m, k));
            for (arma::uword k = 0; k < K; k++) {
                const double via_cone = cone_sinr(cone, zeta, k);
                const double via_thm = perf::downlink_sinr_cf(in.ls, in.book, in.bank,
                                                              in.budget.rho_d,
                                                              perf::DownlinkPower{eta}, k);
                CHECK(std::abs(via_cone - via_thm) / via_thm < 1e-8);
            }
        }
    }

    SUBCASE("per-AP constraint is the Z-scaled norm") {
        const arma::mat eta = testutil::random_downlink_eta(in.bank.gamma, 499);
        arma::vec zeta(n, arma::fill::zeros);
        zeta[0] = 1.0;
        for (arma::uword k = 0; k < K; k++)
            for (arma::uword m = 0; m < M; m++) zeta[cone.index(m, k)] = std::sqrt(eta(m, k));
        for (arma::uword m = 0; m < M; m++) {
            const double lhs = arma::norm(cone.z_diags[m] % zeta);
            const double rhs = std::sqrt(arma::dot(eta.row(m).t(), in.bank.gamma.row(m).t()));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("downlink feasibility") {
    SUBCASE("t = 0 is feasible") {
        const auto in = make_instance(4, 2, 3, 281);
        const ConeProblem cone = build_cone_problem(in.ls, in.book, in.bank, in.budget.rho_d);
        CHECK(downlink_feasible(0.0, cone).status == FeasStatus::feasible);
    }

    SUBCASE("single link threshold matches the scalar closed form") {
        const auto in = make_instance(1, 1, 2, 283);
        const ConeProblem cone = build_cone_problem(in.ls, in.book, in.bank, in.budget.rho_d);
        const double g = in.bank.gamma(0, 0), b = in.ls.beta(0, 0);
        const double t_ref = in.budget.rho_d * g / (1.0 + in.budget.rho_d * b);
        CHECK(downlink_feasible(t_ref * 0.999, cone).status == FeasStatus::feasible);
        CHECK(downlink_feasible(t_ref * 1.001, cone).status == FeasStatus::infeasible);
        BisectionSpec spec;
        spec.rel_tol = 1e-5;
        const DownlinkMaxMinResult mm = downlink_maxmin(cone, spec);
        CHECK(mm.t_star == doctest::Approx(t_ref).epsilon(1e-4));
    }

    SUBCASE("witnesses respect the per-AP budget") {
        const auto in = make_instance(5, 3, 4, 285);
        const ConeProblem cone = build_cone_problem(in.ls, in.book, in.bank, in.budget.rho_d);
        const arma::vec seed_zeta = [&] {
            arma::vec z(cone.dim(), arma::fill::zeros);
            z[0] = 1.0;
            for (arma::uword k = 0; k < 3; k++)
                for (arma::uword m = 0; m < 5; m++)
                    z[cone.index(m, k)] = 1.0 / std::sqrt(3.0 * in.bank.gamma(m, k));
            return z;
        }();
        const double t = cone_sinr_all(cone, seed_zeta).min();
        const ConeFeasibilityResult r = downlink_feasible(t, cone);
        CHECK(r.status == FeasStatus::feasible);
        for (arma::uword m = 0; m < 5; m++)
            CHECK(arma::norm(cone.z_diags[m] % r.zeta) <= 1.0 + 1e-7);
    }
}

TEST_CASE("downlink max-min") {
    SUBCASE("certificates, equalization, and an active AP constraint") {
        const auto in = make_instance(6, 3, 4, 291);
        const ConeProblem cone = build_cone_problem(in.ls, in.book, in.bank, in.budget.rho_d);
        BisectionSpec spec;
        const DownlinkMaxMinResult mm = downlink_maxmin(cone, spec);
        CHECK(mm.equalization_spread <= 1e-3);
        CHECK(downlink_feasible(mm.t_star * (1.0 - 1e-3), cone).status == FeasStatus::feasible);
        CHECK(downlink_feasible(mm.t_star * (1.0 + 1e-3), cone).status ==
              FeasStatus::infeasible);
        double max_load = 0.0;
        for (arma::uword m = 0; m < 6; m++)
            max_load = std::max(max_load, arma::norm(cone.z_diags[m] % mm.zeta));
        CHECK(max_load >= 1.0 - 1e-5);
        CHECK(max_load <= 1.0 + 1e-9);
        perf::validate(mm.eta, in.bank.gamma);
    }

    SUBCASE("two identical APs, one user: closed form") {
        testutil::Instance in;
        in.ls.beta = arma::mat(2, 1, arma::fill::value(3e-10));
        in.ls.shadow_z = arma::zeros(2, 1);
        netgen::PropagationParams prop;
        in.budget = netgen::make_power_budget(0.02, 0.02, 0.2, netgen::noise_power_w(prop));
        in.book = pilots::random_pilot_book(2, 1, 293);
        in.bank = chest::build_lmmse_bank(in.ls, in.book, in.budget.rho_p);
        const ConeProblem cone = build_cone_problem(in.ls, in.book, in.bank, in.budget.rho_d);
        const double g = in.bank.gamma(0, 0), b = 3e-10;
        const double t_ref = 4.0 * in.budget.rho_d * g / (1.0 + 2.0 * in.budget.rho_d * b);
        BisectionSpec spec;
        spec.rel_tol = 1e-5;
        const DownlinkMaxMinResult mm = downlink_maxmin(cone, spec);
        CHECK(mm.t_star == doctest::Approx(t_ref).epsilon(1e-4));
    }
}

TEST_CASE("small-cell max-min") {
    SUBCASE("single user gets full power") {
        const auto in = make_instance(5, 1, 2, 295);
        const arma::uvec serving = perf::assign_serving_aps(in.ls.beta);
        const perf::SmallCellModel model = perf::build_smallcell_uplink(
            in.ls, in.book, serving, in.budget.rho_u, in.budget.rho_u, in.book.tau);
        BisectionSpec spec;
        const MaxMinResult mm = smallcell_maxmin(model, spec);
        CHECK(mm.eta[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(mm.t_star ==
              doctest::Approx(perf::smallcell_effective_sinr(model, arma::vec{1.0}, 0))
                  .epsilon(1e-9));
    }

    SUBCASE("equalization, certificates, and power monotonicity") {
        const auto in = make_instance(12, 4, 6, 297);
        const arma::uvec serving = perf::assign_serving_aps(in.ls.beta);
        const perf::SmallCellModel model = perf::build_smallcell_uplink(
            in.ls, in.book, serving, in.budget.rho_u, in.budget.rho_u, in.book.tau);
        BisectionSpec spec;
        const MaxMinResult mm = smallcell_maxmin(model, spec);
        CHECK(mm.equalization_spread <= 1e-3);
        CHECK(smallcell_feasible(mm.t_star * (1.0 - 1e-3), model).status ==
              FeasStatus::feasible);
        CHECK(smallcell_feasible(mm.t_star * (1.0 + 1e-3), model).status ==
              FeasStatus::infeasible);

        // a larger uplink power budget can only help
        perf::SmallCellModel boosted = perf::build_smallcell_uplink(
            in.ls, in.book, serving, 2.0 * in.budget.rho_u, in.budget.rho_u, in.book.tau);
        const MaxMinResult mm2 = smallcell_maxmin(boosted, spec);
        CHECK(mm2.t_star >= mm.t_star * (1.0 - 1e-9));
    }
}
