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

#include "cfmimo/power.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo::power {

namespace {

// Interference load I(eta) = c0 + m_full * eta with SINR_k = eta_k / I_k.
// Shared by the cell-free uplink and the small-cell directions.
struct LoadModel {
    arma::vec c0;
    arma::mat m_full;

    arma::vec load(const arma::vec& eta) const { return c0 + m_full * eta; }
    arma::vec sinr(const arma::vec& eta) const { return eta / load(eta); }
};

LoadModel load_from_uplink(const perf::UplinkCoeffs& c) {
    LoadModel lm;
    const arma::vec g2 = c.g_sum % c.g_sum;
    lm.c0 = (c.g_sum / c.rho_u) / g2;
    arma::mat full = arma::diagmat(c.self) + c.cross;
    full.each_col() /= g2;
    lm.m_full = std::move(full);
    return lm;
}

LoadModel load_from_smallcell(const perf::SmallCellModel& m) {
    LoadModel lm;
    lm.c0 = (1.0 / m.rho) / m.wbar;
    arma::mat full = arma::diagmat(m.gain_self - m.wbar) + m.cross_gain;
    full.each_col() /= m.wbar;
    lm.m_full = std::move(full);
    return lm;
}

// Balancing iteration eta <- I(eta)/max I(eta). At the fixed point all
// SINRs are equal and max eta = 1, which is the max-min operating point.
struct BalanceResult {
    arma::vec eta;
    double t = 0.0;
    double spread = 0.0;
};

BalanceResult balance(const LoadModel& lm, arma::vec eta, int max_iters = 4000,
                      double tol = 1e-12) {
    BalanceResult best;
    best.eta = eta;
    best.t = -1.0;
    for (int it = 0; it < max_iters; it++) {
        const arma::vec load = lm.load(eta);
        eta = load / load.max();
        const arma::vec s = eta / lm.load(eta);
        const double t = s.min();
        const double spread = (s.max() - t) / std::max(t, 1e-300);
        if (t > best.t) {
            best.eta = eta;
            best.t = t;
            best.spread = spread;
        }
        if (spread < tol) break;
    }
    return best;
}

MaxMinResult maxmin_bisect(const FeasibilityOracle& oracle, const LoadModel& lm,
                           const BisectionSpec& spec) {
    const arma::uword K = lm.c0.n_elem;
    const arma::vec ones(K, arma::fill::ones);
    const double t_seed = (ones / lm.load(ones)).min();
    if (!(t_seed > 0.0)) throw std::runtime_error("maxmin: full-power SINR is not positive");

    double t_lo = spec.t_lo > 0.0 ? spec.t_lo : t_seed;
    FeasibilityResult lo = oracle(t_lo);
    if (lo.status != FeasStatus::feasible)
        throw std::runtime_error("maxmin: bracket failure, t_lo infeasible");

    double t_hi = spec.t_hi > 0.0 ? spec.t_hi : 2.0 * t_lo;
    int doublings = 0;
    for (FeasibilityResult probe = oracle(t_hi); probe.status == FeasStatus::feasible;
         probe = oracle(t_hi)) {
        t_lo = t_hi;
        lo = probe;
        t_hi *= 2.0;
        if (++doublings > 60) throw std::runtime_error("maxmin: bracket failure, no finite optimum");
    }

    int iters = 0;
    while (t_hi - t_lo > spec.rel_tol * t_lo && iters < spec.max_iters) {
        const double mid = 0.5 * (t_lo + t_hi);
        const FeasibilityResult r = oracle(mid);
        if (r.status == FeasStatus::feasible) {
            t_lo = mid;
            lo = r;
        } else {
            t_hi = mid;
        }
        iters++;
    }

    // Polish: balance to the equal-SINR point with an active box constraint.
    arma::vec start = lo.eta.n_elem ? lo.eta : ones;
    if (start.max() <= 0.0) start = ones;
    BalanceResult bal = balance(lm, start / start.max());

    MaxMinResult res;
    res.t_lo = t_lo;
    res.t_hi = t_hi;
    res.bisect_iters = iters;
    if (bal.t >= t_lo * (1.0 - 1e-9)) {
        res.eta = bal.eta;
        res.t_star = bal.t;
        res.equalization_spread = bal.spread;
    } else {
        // Fall back to the certified witness, rescaled to the box boundary.
        res.eta = lo.eta / lo.eta.max();
        const arma::vec s = lm.sinr(res.eta);
        res.t_star = s.min();
        res.equalization_spread = (s.max() - s.min()) / res.t_star;
    }
    return res;
}

}  // namespace

FeasibilityResult affine_interference_feasible(const AffineInterferenceSystem& sys, double cap,
                                               int max_iters, double tol) {
    const arma::uword K = sys.d.n_elem;
    FeasibilityResult res;
    if (sys.d.min() <= 0.0) {
        res.status = FeasStatus::infeasible;  // some user cannot reach t at any power
        res.residual = arma::datum::inf;
        return res;
    }

    arma::vec eta(K, arma::fill::zeros);
    for (int it = 0; it < max_iters; it++) {
        const arma::vec next = (sys.a + sys.w * eta) / sys.d;
        if (next.max() > cap * (1.0 + 1e-12)) {
            // iterates lower-bound the minimal solution, so the box is exceeded
            res.status = FeasStatus::infeasible;
            res.iterations = it + 1;
            res.residual = next.max() / cap - 1.0;
            return res;
        }
        const double inc = arma::abs(next - eta).max();
        eta = next;
        const double scale = std::max(eta.max(), 1e-300);
        if (inc < tol * scale) {
            res.status = FeasStatus::feasible;
            res.eta = eta;
            res.iterations = it + 1;
            res.residual = 0.0;
            return res;
        }
    }
    res.status = FeasStatus::iteration_cap;
    res.eta = eta;
    res.iterations = max_iters;
    res.residual = arma::abs((sys.a + sys.w * eta) / sys.d - eta).max();
    return res;
}

FeasibilityResult uplink_feasible(double t, const perf::UplinkCoeffs& c) {
    if (t < 0.0) throw std::invalid_argument("uplink_feasible: t must be nonnegative");
    const arma::uword K = c.g_sum.n_elem;
    if (t == 0.0) {
        FeasibilityResult res;
        res.status = FeasStatus::feasible;
        res.eta = arma::vec(K, arma::fill::zeros);
        return res;
    }
    AffineInterferenceSystem sys;
    sys.d = c.rho_u * (c.g_sum % c.g_sum - t * c.self);
    sys.a = t * c.g_sum;
    sys.w = t * c.rho_u * c.cross;
    return affine_interference_feasible(sys, 1.0);
}

MaxMinResult uplink_maxmin(const perf::UplinkCoeffs& coeffs, const BisectionSpec& spec) {
    const LoadModel lm = load_from_uplink(coeffs);
    return maxmin_bisect([&](double t) { return uplink_feasible(t, coeffs); }, lm, spec);
}

MaxMinResult uplink_maxmin(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                           const chest::LmmseBank& bank, double rho_u, const BisectionSpec& spec) {
    return uplink_maxmin(perf::build_uplink_coeffs(ls, book, bank, rho_u), spec);
}

TargetResult target_sinr_iterate(const perf::UplinkCoeffs& coeffs, const TargetSpec& spec) {
    const arma::uword K = coeffs.g_sum.n_elem;
    if (spec.delta.n_elem != K) throw std::invalid_argument("target_sinr_iterate: bad delta size");
    if (spec.delta.min() <= 0.0) throw std::invalid_argument("target_sinr_iterate: targets must be positive");

    TargetResult res;
    res.eta = arma::vec(K, arma::fill::ones);
    res.sinr = sinr_all(coeffs, res.eta);
    for (int n = 1; n <= spec.max_iters; n++) {
        if (arma::abs(res.sinr - spec.delta).max() < spec.epsilon) {
            res.converged = true;
            res.iterations = n - 1;
            return res;
        }
        for (arma::uword k = 0; k < K; k++) {
            const double s = res.sinr[k];
            const double d = spec.delta[k];
            if (res.eta[k] / s <= 1.0 / d)
                res.eta[k] *= d / s;
            else
                res.eta[k] = std::min(1.0, (coeffs.rho_u / d) * s / res.eta[k]);
        }
        res.sinr = sinr_all(coeffs, res.eta);
    }
    res.converged = arma::abs(res.sinr - spec.delta).max() < spec.epsilon;
    res.iterations = spec.max_iters;
    return res;
}

DropResult drop_and_retarget(const perf::UplinkCoeffs& coeffs, double drop_fraction,
                             double epsilon, int target_iters, double rel_tol) {
    if (drop_fraction < 0.0 || drop_fraction >= 1.0)
        throw std::invalid_argument("drop_and_retarget: drop_fraction must lie in [0,1)");
    const arma::uword K = coeffs.g_sum.n_elem;
    const arma::uword n_keep =
        arma::uword(std::ceil((1.0 - drop_fraction) * double(K) - 1e-12));

    const auto run_at = [&](double delta) {
        TargetSpec ts;
        ts.delta = arma::vec(K, arma::fill::value(delta));
        ts.epsilon = epsilon;
        ts.max_iters = target_iters;
        TargetResult tr = target_sinr_iterate(coeffs, ts);
        const arma::uvec ok = arma::find(arma::abs(tr.sinr - delta) < epsilon);
        return std::pair<arma::uvec, TargetResult>(ok, tr);
    };

    BisectionSpec bs;
    bs.rel_tol = rel_tol;
    const MaxMinResult mm = uplink_maxmin(coeffs, bs);

    double d_lo = mm.t_star * (1.0 - 2.0 * rel_tol);
    auto best = run_at(d_lo);
    if (best.first.n_elem < n_keep) {
        // even the max-min point does not satisfy the quota within epsilon;
        // back off geometrically
        for (int i = 0; i < 60 && best.first.n_elem < n_keep; i++) {
            d_lo *= 0.5;
            best = run_at(d_lo);
        }
        if (best.first.n_elem < n_keep)
            throw std::runtime_error("drop_and_retarget: no target satisfies the keep quota");
    }

    double d_hi = d_lo;
    auto probe = best;
    int doublings = 0;
    do {
        d_hi *= 2.0;
        probe = run_at(d_hi);
        if (++doublings > 60) throw std::runtime_error("drop_and_retarget: bracket failure");
    } while (probe.first.n_elem >= n_keep);

    double delta_best = d_lo;
    while (d_hi - d_lo > rel_tol * d_lo) {
        const double mid = 0.5 * (d_lo + d_hi);
        auto r = run_at(mid);
        if (r.first.n_elem >= n_keep) {
            d_lo = mid;
            best = r;
            delta_best = mid;
        } else {
            d_hi = mid;
        }
    }

    DropResult res;
    res.active_set = best.first;
    res.eta = best.second.eta;
    res.delta_star = delta_best;
    res.sinr = best.second.sinr;
    return res;
}

FeasibilityResult smallcell_feasible(double t, const perf::SmallCellModel& model) {
    if (t < 0.0) throw std::invalid_argument("smallcell_feasible: t must be nonnegative");
    const arma::uword K = model.wbar.n_elem;
    if (t == 0.0) {
        FeasibilityResult res;
        res.status = FeasStatus::feasible;
        res.eta = arma::vec(K, arma::fill::zeros);
        return res;
    }
    AffineInterferenceSystem sys;
    sys.d = model.rho * (model.wbar - t * (model.gain_self - model.wbar));
    sys.a = arma::vec(K, arma::fill::value(t));
    sys.w = t * model.rho * model.cross_gain;
    return affine_interference_feasible(sys, 1.0);
}

MaxMinResult smallcell_maxmin(const perf::SmallCellModel& model, const BisectionSpec& spec) {
    const LoadModel lm = load_from_smallcell(model);
    return maxmin_bisect([&](double t) { return smallcell_feasible(t, model); }, lm, spec);
}

}  // namespace cfmimo::power
