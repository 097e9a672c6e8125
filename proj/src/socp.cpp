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

#include <cmath>
#include <stdexcept>

#include "cfmimo/power.hpp"

namespace cfmimo::power {

ConeProblem build_cone_problem(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                               const chest::LmmseBank& bank, double rho_d) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    if (bank.n_aps() != M || bank.n_users() != K)
        throw std::invalid_argument("build_cone_problem: bank does not match the network");
    if (!(rho_d > 0.0)) throw std::invalid_argument("build_cone_problem: rho_d must be positive");

    const perf::EstimatorStats st = perf::build_estimator_stats(ls, book, bank);
    const double trp = bank.tau_rho_p;
    const double srtrp = std::sqrt(trp);

    ConeProblem cone;
    cone.n_aps = M;
    cone.n_users = K;
    cone.rho_d = rho_d;
    cone.gamma = bank.gamma;
    const arma::uword n = cone.dim();
    cone.zeta.zeros(n);
    cone.zeta[0] = 1.0;

    cone.b_vecs.resize(K);
    cone.f_diags.resize(K);
    cone.p_mats.resize(K);
    for (arma::uword k = 0; k < K; k++) {
        arma::vec b(n, arma::fill::zeros);
        arma::vec f(n, arma::fill::zeros);
        arma::cx_mat p(K, n, arma::fill::zeros);
        f[0] = 1.0 / std::sqrt(rho_d);
        for (arma::uword i = 0; i < K; i++) {
            for (arma::uword m = 0; m < M; m++) {
                const arma::uword pos = cone.index(m, i);
                if (i == k) {
                    b[pos] = bank.gamma(m, k);
                    f[pos] = std::sqrt(ls.beta(m, k) * bank.gamma(m, k));
                } else {
                    f[pos] = std::sqrt(ls.beta(m, k) *
                                       (st.anorm2(m, i) + trp * st.rsum(m, i)));
                    p(i, pos) = srtrp * ls.beta(m, k) * st.q[m](k, i);
                }
            }
        }
        cone.b_vecs[k] = std::move(b);
        cone.f_diags[k] = std::move(f);
        cone.p_mats[k] = std::move(p);
    }

    cone.z_diags.resize(M);
    for (arma::uword m = 0; m < M; m++) {
        arma::vec z(n, arma::fill::zeros);
        for (arma::uword k = 0; k < K; k++) z[cone.index(m, k)] = std::sqrt(bank.gamma(m, k));
        cone.z_diags[m] = std::move(z);
    }
    return cone;
}

double cone_sinr(const ConeProblem& cone, const arma::vec& zeta, arma::uword k) {
    const double num = arma::dot(cone.b_vecs[k], zeta);
    const arma::vec fz = cone.f_diags[k] % zeta;
    const arma::cx_vec pz = cone.p_mats[k] * arma::conv_to<arma::cx_vec>::from(zeta);
    const double den = arma::dot(fz, fz) + std::real(arma::cdot(pz, pz));
    return num * num / den;
}

arma::vec cone_sinr_all(const ConeProblem& cone, const arma::vec& zeta) {
    arma::vec s(cone.n_users);
    for (arma::uword k = 0; k < cone.n_users; k++) s[k] = cone_sinr(cone, zeta, k);
    return s;
}

namespace {

// Scaled data of the barrier subproblem in x-space, where
// zeta_mk = x_mk / sqrt(gamma_mk). Per-AP power caps become unit balls over
// each AP's coordinates and every cone k is normalized by ||b_k||.
struct ScaledCone {
    arma::uword M = 0, K = 0, nx = 0;
    arma::vec sigma;               // nx, 1/sqrt(gamma)
    std::vector<arma::vec> bhat;   // K unit-norm signal vectors (nx)
    std::vector<arma::vec> fsq;    // K diag quadratic coefficients (nx)
    std::vector<double> cterm;     // K constant quadratic terms
    std::vector<arma::cx_mat> prow;  // K matrices (K x M); row i = scaled P row
};

ScaledCone scale(const ConeProblem& cone) {
    ScaledCone sc;
    sc.M = cone.n_aps;
    sc.K = cone.n_users;
    sc.nx = sc.M * sc.K;
    sc.sigma.set_size(sc.nx);
    for (arma::uword k = 0; k < sc.K; k++)
        for (arma::uword m = 0; m < sc.M; m++) {
            const double g = cone.gamma(m, k);
            if (!(g > 0.0)) throw std::runtime_error("downlink cone: gamma must be positive");
            sc.sigma[k * sc.M + m] = 1.0 / std::sqrt(g);
        }

    sc.bhat.resize(sc.K);
    sc.fsq.resize(sc.K);
    sc.cterm.resize(sc.K);
    sc.prow.resize(sc.K);
    for (arma::uword k = 0; k < sc.K; k++) {
        arma::vec b(sc.nx);
        for (arma::uword j = 0; j < sc.nx; j++) b[j] = cone.b_vecs[k][j + 1] * sc.sigma[j];
        const double nk = arma::norm(b);
        sc.bhat[k] = b / nk;
        arma::vec f(sc.nx);
        for (arma::uword j = 0; j < sc.nx; j++) {
            const double v = cone.f_diags[k][j + 1] * sc.sigma[j] / nk;
            f[j] = v * v;
        }
        sc.fsq[k] = std::move(f);
        sc.cterm[k] = std::pow(cone.f_diags[k][0] / nk, 2);
        arma::cx_mat pr(sc.K, sc.M, arma::fill::zeros);
        for (arma::uword i = 0; i < sc.K; i++) {
            if (i == k) continue;
            for (arma::uword m = 0; m < sc.M; m++) {
                const arma::uword pos = 1 + i * sc.M + m;
                pr(i, m) = cone.p_mats[k](i, pos) * sc.sigma[pos - 1] / nk;
            }
        }
        sc.prow[k] = std::move(pr);
    }
    return sc;
}

// q_k(x) = cterm + sum_j fsq_j x_j^2 + sum_i |prow_i . x_block_i|^2, the
// normalized squared cone norm; also yields gradient and Hessian terms.
struct ConeEval {
    double q = 0.0;
    arma::vec grad;  // nx
};

ConeEval eval_cone_quad(const ScaledCone& sc, arma::uword k, const arma::vec& x,
                        arma::cx_vec& zbuf) {
    ConeEval ev;
    ev.q = sc.cterm[k] + arma::dot(sc.fsq[k], x % x);
    ev.grad = 2.0 * (sc.fsq[k] % x);
    for (arma::uword i = 0; i < sc.K; i++) {
        if (i == k) continue;
        std::complex<double> z{};
        const arma::cx_mat& pr = sc.prow[k];
        for (arma::uword m = 0; m < sc.M; m++) z += pr(i, m) * x[i * sc.M + m];
        zbuf[i] = z;
        ev.q += std::norm(z);
        for (arma::uword m = 0; m < sc.M; m++)
            ev.grad[i * sc.M + m] += 2.0 * std::real(std::conj(z) * pr(i, m));
    }
    return ev;
}

double max_cone_residual(const ScaledCone& sc, double t, const arma::vec& x) {
    double worst = -arma::datum::inf;
    arma::cx_vec zbuf(sc.K);
    for (arma::uword k = 0; k < sc.K; k++) {
        double q = sc.cterm[k] + arma::dot(sc.fsq[k], x % x);
        for (arma::uword i = 0; i < sc.K; i++) {
            if (i == k) continue;
            std::complex<double> z{};
            for (arma::uword m = 0; m < sc.M; m++) z += sc.prow[k](i, m) * x[i * sc.M + m];
            q += std::norm(z);
        }
        worst = std::max(worst, std::sqrt(t * q) - arma::dot(sc.bhat[k], x));
    }
    return worst;
}

arma::vec witness_zeta(const ConeProblem& cone, const ScaledCone& sc, const arma::vec& x) {
    arma::vec zeta(cone.dim(), arma::fill::zeros);
    zeta[0] = 1.0;
    for (arma::uword j = 0; j < sc.nx; j++) zeta[j + 1] = sc.sigma[j] * x[j];
    return zeta;
}

}  // namespace

ConeFeasibilityResult downlink_feasible(double t, const ConeProblem& cone) {
    if (t < 0.0) throw std::invalid_argument("downlink_feasible: t must be nonnegative");
    const ScaledCone sc = scale(cone);
    const arma::uword nx = sc.nx;
    const arma::uword N = nx + 1;  // x and the slack s

    ConeFeasibilityResult res;
    if (t == 0.0) {
        arma::vec x(nx, arma::fill::value(1e-3 / std::sqrt(double(sc.K))));
        res.status = FeasStatus::feasible;
        res.zeta = witness_zeta(cone, sc, x);
        res.residual = max_cone_residual(sc, t, x);
        return res;
    }

    arma::vec x(nx, arma::fill::value(0.5 / std::sqrt(double(sc.K))));
    double s = std::max(0.0, max_cone_residual(sc, t, x)) + 1.0;

    const double nu = 2.0 * double(sc.K) + 2.0 * double(sc.M) + double(nx);
    const double gap_target = 1e-11;
    const int max_total_newton = 4000;

    arma::vec grad(N);
    arma::mat hess(N, N);
    arma::cx_vec zbuf(sc.K);
    int total_newton = 0;

    double tb = 1.0;
    while (true) {
        for (int step = 0; step < 80; step++) {
            if (total_newton++ > max_total_newton) {
                res.status = FeasStatus::iteration_cap;
                res.zeta = witness_zeta(cone, sc, x);
                res.newton_steps = total_newton;
                res.residual = max_cone_residual(sc, t, x);
                return res;
            }
            // early exit: a strictly feasible point needs no further work
            const double resid_now = max_cone_residual(sc, t, x);
            if (resid_now <= 0.0) {
                res.status = FeasStatus::feasible;
                res.zeta = witness_zeta(cone, sc, x);
                res.newton_steps = total_newton;
                res.residual = resid_now;
                return res;
            }

            grad.zeros();
            hess.zeros();
            grad[nx] = tb;
            bool domain_ok = true;
            for (arma::uword k = 0; k < sc.K; k++) {
                const double u = arma::dot(sc.bhat[k], x) + s;
                const ConeEval ev = eval_cone_quad(sc, k, x, zbuf);
                const double w = u * u - t * ev.q;
                if (!(w > 0.0) || !(u > 0.0)) {
                    domain_ok = false;
                    break;
                }
                arma::vec gw(N);
                gw.head(nx) = 2.0 * u * sc.bhat[k] - t * ev.grad;
                gw[nx] = 2.0 * u;
                grad -= gw / w;
                // Hessian: (t Hq - 2 B B^T)/w + gw gw^T / w^2
                hess += gw * gw.t() / (w * w);
                arma::vec bb(N);
                bb.head(nx) = sc.bhat[k];
                bb[nx] = 1.0;
                hess -= 2.0 / w * (bb * bb.t());
                for (arma::uword j = 0; j < nx; j++) hess(j, j) += 2.0 * t * sc.fsq[k][j] / w;
                for (arma::uword i = 0; i < sc.K; i++) {
                    if (i == k) continue;
                    const arma::uword off = i * sc.M;
                    const arma::vec pr_re = arma::real(sc.prow[k].row(i)).t();
                    const arma::vec pr_im = arma::imag(sc.prow[k].row(i)).t();
                    const double c = 2.0 * t / w;
                    hess.submat(off, off, off + sc.M - 1, off + sc.M - 1) +=
                        c * (pr_re * pr_re.t() + pr_im * pr_im.t());
                }
            }
            if (!domain_ok)
                throw std::runtime_error("downlink_feasible: barrier left the cone domain");

            for (arma::uword m = 0; m < sc.M; m++) {
                double ball = 1.0;
                for (arma::uword k = 0; k < sc.K; k++) ball -= x[k * sc.M + m] * x[k * sc.M + m];
                if (!(ball > 0.0)) throw std::runtime_error("downlink_feasible: AP ball violated");
                for (arma::uword k = 0; k < sc.K; k++) {
                    const arma::uword j = k * sc.M + m;
                    grad[j] += 2.0 * x[j] / ball;
                    hess(j, j) += 2.0 / ball;
                    for (arma::uword k2 = 0; k2 < sc.K; k2++) {
                        const arma::uword j2 = k2 * sc.M + m;
                        hess(j, j2) += 4.0 * x[j] * x[j2] / (ball * ball);
                    }
                }
            }
            for (arma::uword j = 0; j < nx; j++) {
                grad[j] -= 1.0 / x[j];
                hess(j, j) += 1.0 / (x[j] * x[j]);
            }

            arma::vec delta;
            if (!arma::solve(delta, hess, -grad, arma::solve_opts::likely_sympd)) {
                hess.diag() += 1e-12 * arma::abs(hess.diag()).max();
                if (!arma::solve(delta, hess, -grad)) {
                    res.status = FeasStatus::numerical_failure;
                    res.zeta = witness_zeta(cone, sc, x);
                    res.newton_steps = total_newton;
                    res.residual = resid_now;
                    return res;
                }
            }
            const double decrement2 = -arma::dot(grad, delta);
            if (decrement2 < 1e-12) break;

            // backtrack into the barrier domain, then Armijo
            const auto phi = [&](const arma::vec& xv, double sv) {
                double val = tb * sv;
                for (arma::uword k = 0; k < sc.K; k++) {
                    const double u = arma::dot(sc.bhat[k], xv) + sv;
                    const ConeEval ev = eval_cone_quad(sc, k, xv, zbuf);
                    const double w = u * u - t * ev.q;
                    if (!(w > 0.0) || !(u > 0.0)) return arma::datum::inf;
                    val -= std::log(w);
                }
                for (arma::uword m = 0; m < sc.M; m++) {
                    double ball = 1.0;
                    for (arma::uword k = 0; k < sc.K; k++)
                        ball -= xv[k * sc.M + m] * xv[k * sc.M + m];
                    if (!(ball > 0.0)) return arma::datum::inf;
                    val -= std::log(ball);
                }
                if (xv.min() <= 0.0) return arma::datum::inf;
                val -= arma::accu(arma::log(xv));
                return val;
            };
            const double f0 = phi(x, s);
            double stepsz = 1.0;
            const arma::vec dx = delta.head(nx);
            const double ds = delta[nx];
            int bt = 0;
            while (bt++ < 80) {
                const arma::vec xn = x + stepsz * dx;
                const double sn = s + stepsz * ds;
                const double fn = phi(xn, sn);
                if (fn <= f0 + 0.25 * stepsz * arma::dot(grad, delta)) {
                    x = xn;
                    s = sn;
                    break;
                }
                stepsz *= 0.5;
            }
            if (bt >= 80) break;  // stalled line search: proceed to next barrier round
        }
        if (nu / tb < gap_target) break;
        tb *= 20.0;
    }

    res.zeta = witness_zeta(cone, sc, x);
    res.newton_steps = total_newton;
    res.residual = max_cone_residual(sc, t, x);
    // minimal slack is s up to the final barrier gap
    res.status = (s < 1e-9) ? FeasStatus::feasible : FeasStatus::infeasible;
    if (res.status == FeasStatus::feasible && res.residual > 1e-7)
        res.status = FeasStatus::infeasible;
    return res;
}

DownlinkMaxMinResult downlink_maxmin(const ConeProblem& cone, const BisectionSpec& spec) {
    const ScaledCone sc = scale(cone);
    const arma::uword nx = sc.nx;

    // full-power uniform seed: eta_mk = 1/(K gamma_mk), every AP at budget
    arma::vec x(nx, arma::fill::value(1.0 / std::sqrt(double(sc.K))));
    double t_lo = spec.t_lo > 0.0 ? spec.t_lo : cone_sinr_all(cone, witness_zeta(cone, sc, x)).min();
    if (!(t_lo > 0.0)) throw std::runtime_error("downlink_maxmin: seed SINR not positive");

    ConeFeasibilityResult lo = downlink_feasible(t_lo, cone);
    if (lo.status != FeasStatus::feasible)
        throw std::runtime_error("downlink_maxmin: bracket failure, t_lo infeasible");

    double t_hi = spec.t_hi > 0.0 ? spec.t_hi : 2.0 * t_lo;
    int doublings = 0;
    for (ConeFeasibilityResult probe = downlink_feasible(t_hi, cone);
         probe.status == FeasStatus::feasible; probe = downlink_feasible(t_hi, cone)) {
        t_lo = t_hi;
        lo = probe;
        t_hi *= 2.0;
        if (++doublings > 60)
            throw std::runtime_error("downlink_maxmin: bracket failure, no finite optimum");
    }

    int iters = 0;
    while (t_hi - t_lo > spec.rel_tol * t_lo && iters < spec.max_iters) {
        const double mid = 0.5 * (t_lo + t_hi);
        ConeFeasibilityResult r = downlink_feasible(mid, cone);
        if (r.status == FeasStatus::feasible) {
            t_lo = mid;
            lo = r;
        } else {
            t_hi = mid;
        }
        iters++;
    }

    // equalize-and-refill polish toward the balanced optimum
    arma::vec xw(nx);
    for (arma::uword j = 0; j < nx; j++) xw[j] = lo.zeta[j + 1] / sc.sigma[j];
    const auto refill = [&](arma::vec& v) {
        double worst = 0.0;
        for (arma::uword m = 0; m < sc.M; m++) {
            double nrm2 = 0.0;
            for (arma::uword k = 0; k < sc.K; k++) nrm2 += v[k * sc.M + m] * v[k * sc.M + m];
            worst = std::max(worst, std::sqrt(nrm2));
        }
        v /= worst;
    };
    refill(xw);
    arma::vec best_x = xw;
    double best_t = cone_sinr_all(cone, witness_zeta(cone, sc, xw)).min();
    double best_spread = arma::datum::inf;
    for (int it = 0; it < 800; it++) {
        const arma::vec s = cone_sinr_all(cone, witness_zeta(cone, sc, xw));
        const double tmin = s.min();
        const double spread = (s.max() - tmin) / tmin;
        if (tmin > best_t) {
            best_t = tmin;
            best_x = xw;
            best_spread = spread;
        }
        if (spread < 1e-10) break;
        for (arma::uword k = 0; k < sc.K; k++) {
            const double a = std::sqrt(tmin / s[k]);
            for (arma::uword m = 0; m < sc.M; m++) xw[k * sc.M + m] *= a;
        }
        refill(xw);
    }
    {
        const arma::vec s = cone_sinr_all(cone, witness_zeta(cone, sc, best_x));
        best_spread = (s.max() - s.min()) / s.min();
    }

    DownlinkMaxMinResult res;
    res.zeta = witness_zeta(cone, sc, best_x);
    res.t_star = best_t;
    res.t_lo = t_lo;
    res.t_hi = t_hi;
    res.bisect_iters = iters;
    res.equalization_spread = best_spread;
    res.eta.eta.set_size(sc.M, sc.K);
    for (arma::uword k = 0; k < sc.K; k++)
        for (arma::uword m = 0; m < sc.M; m++) {
            const double z = res.zeta[cone.index(m, k)];
            res.eta.eta(m, k) = z * z;
        }
    return res;
}

}  // namespace cfmimo::power
