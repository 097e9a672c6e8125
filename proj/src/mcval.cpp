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

#include "cfmimo/mcval.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo::mcval {

namespace {

constexpr arma::uword kBlock = 2048;

void add_row(ComplexMoments& mo, const arma::cx_rowvec& row, arma::uword n) {
    const std::complex<double>* p = row.memptr();
    for (arma::uword i = 0; i < n; i++) mo.add(p[i]);
}

McEstimate squared_mean_estimate(const ComplexMoments& mo, double scale) {
    const std::complex<double> mu = mo.mean();
    const double amp = std::abs(mu);
    const double se_mu = mo.mean_std_error();
    return {scale * amp * amp, scale * 2.0 * amp * se_mu, mo.count()};
}

McEstimate variance_estimate(const ComplexMoments& mo, double scale) {
    return {scale * mo.variance(), scale * mo.variance_std_error(), mo.count()};
}

// Shared draw kernel: per block and per AP draws h and pilot noise, forms
// X_m = diag(sqrt(beta_m)) H (channels, K x B) and the estimates
// Ghat_m = A_m^H (sqrt(tau rho_p) Psi X_m + W) (K x B), then hands both to
// the per-AP consumer.
template <typename PerAp, typename PerBlockStart, typename PerBlockEnd>
void run_blocks(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                const chest::LmmseBank& bank, std::size_t n_samples, std::uint64_t seed,
                PerBlockStart&& block_start, PerAp&& per_ap, PerBlockEnd&& block_end) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    const arma::uword tau = book.tau;
    const double srtrp = std::sqrt(bank.tau_rho_p);
    const arma::mat sqrt_beta = arma::sqrt(ls.beta);

    arma::cx_mat h(K, kBlock), w(tau, kBlock), x(K, kBlock), y(tau, kBlock), ghat(K, kBlock);
    std::size_t done = 0;
    std::uint64_t block_index = 0;
    while (done < n_samples) {
        const arma::uword b = arma::uword(std::min<std::size_t>(kBlock, n_samples - done));
        RandomStream rs(derive_seed(seed, seed_stream::mc_oracle + block_index));
        block_start(rs, b);
        for (arma::uword m = 0; m < M; m++) {
            rs.fill_complex_normal(h);
            rs.fill_complex_normal(w);
            const arma::cx_vec sb = arma::conv_to<arma::cx_vec>::from(sqrt_beta.row(m).t());
            x.cols(0, b - 1) = h.cols(0, b - 1).each_col() % sb;
            y.cols(0, b - 1) = srtrp * (book.psi * x.cols(0, b - 1)) + w.cols(0, b - 1);
            ghat.cols(0, b - 1) = bank.a_ops[m].t() * y.cols(0, b - 1);
            per_ap(m, x, ghat, b);
        }
        block_end(rs, b);
        done += b;
        block_index++;
    }
}

}  // namespace

TermEstimates empirical_uplink_terms(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                     const chest::LmmseBank& bank, double rho_u,
                                     const perf::UplinkPower& power, arma::uword k,
                                     std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("empirical_uplink_terms: need n_samples >= 2");
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    const arma::vec weight = arma::sqrt(rho_u * power.eta);  // sqrt(rho_u eta_i)

    ComplexMoments mo_v, mo_t3, mo_t4;
    arma::cx_mat wu;                             // M x B uplink noise
    arma::cx_mat s;                              // K x B symbols
    arma::cx_rowvec v, t4;                       // per-realization sums over APs
    arma::cx_mat pcross;                         // K x B, rows i: sum_m ghat*_mk g_mi

    run_blocks(
        ls, book, bank, n_samples, seed,
        [&](RandomStream& rs, arma::uword b) {
            wu.set_size(M, kBlock);
            s.set_size(K, kBlock);
            rs.fill_complex_normal(wu);
            rs.fill_complex_normal(s);
            v.zeros(b);
            t4.zeros(b);
            pcross.zeros(K, b);
        },
        [&](arma::uword m, const arma::cx_mat& x, const arma::cx_mat& ghat, arma::uword b) {
            const arma::cx_rowvec crow = arma::conj(ghat.row(k).cols(0, b - 1));
            v += crow % x.row(k).cols(0, b - 1);
            t4 += crow % wu.row(m).cols(0, b - 1);
            for (arma::uword i = 0; i < K; i++)
                pcross.row(i) += x.row(i).cols(0, b - 1) % crow;
        },
        [&](RandomStream&, arma::uword b) {
            arma::cx_rowvec t3(b, arma::fill::zeros);
            for (arma::uword i = 0; i < K; i++) {
                if (i == k) continue;
                t3 += weight[i] * (s.row(i).cols(0, b - 1) % pcross.row(i));
            }
            add_row(mo_v, v, b);
            add_row(mo_t3, t3, b);
            add_row(mo_t4, t4, b);
        });

    const double c2 = rho_u * power.eta[k];
    TermEstimates t;
    t.n_samples = n_samples;
    t.t1_sq = squared_mean_estimate(mo_v, c2);
    t.var_t2 = variance_estimate(mo_v, c2);
    t.var_t3 = variance_estimate(mo_t3, 1.0);
    t.var_t4 = variance_estimate(mo_t4, 1.0);
    return t;
}

TermEstimates empirical_downlink_terms(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                       const chest::LmmseBank& bank, double rho_d,
                                       const perf::DownlinkPower& power, arma::uword k,
                                       std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("empirical_downlink_terms: need n_samples >= 2");
    const arma::uword K = ls.beta.n_cols;
    const arma::mat sqrt_eta = arma::sqrt(power.eta);  // M x K

    ComplexMoments mo_u, mo_t3, mo_t4;
    arma::cx_mat s;        // K x B symbols
    arma::cx_rowvec wd;    // 1 x B receiver noise
    arma::cx_mat pcross;   // K x B, rows i: sum_m sqrt(eta_mi) ghat*_mi g_mk

    run_blocks(
        ls, book, bank, n_samples, seed,
        [&](RandomStream& rs, arma::uword b) {
            s.set_size(K, kBlock);
            rs.fill_complex_normal(s);
            wd.set_size(kBlock);
            for (arma::uword r = 0; r < kBlock; r++) wd[r] = rs.complex_normal();
            pcross.zeros(K, b);
        },
        [&](arma::uword m, const arma::cx_mat& x, const arma::cx_mat& ghat, arma::uword b) {
            const arma::cx_rowvec xk = x.row(k).cols(0, b - 1);
            for (arma::uword i = 0; i < K; i++)
                pcross.row(i) +=
                    sqrt_eta(m, i) * (arma::conj(ghat.row(i).cols(0, b - 1)) % xk);
        },
        [&](RandomStream&, arma::uword b) {
            arma::cx_rowvec t3(b, arma::fill::zeros);
            const double srd = std::sqrt(rho_d);
            for (arma::uword i = 0; i < K; i++) {
                if (i == k) continue;
                t3 += srd * (s.row(i).cols(0, b - 1) % pcross.row(i));
            }
            add_row(mo_u, pcross.row(k), b);
            add_row(mo_t3, t3, b);
            add_row(mo_t4, wd.cols(0, b - 1), b);
        });

    TermEstimates t;
    t.n_samples = n_samples;
    t.t1_sq = squared_mean_estimate(mo_u, rho_d);
    t.var_t2 = variance_estimate(mo_u, rho_d);
    t.var_t3 = variance_estimate(mo_t3, 1.0);
    t.var_t4 = variance_estimate(mo_t4, 1.0);
    return t;
}

McEstimate empirical_sinr(const TermEstimates& t) {
    const double den = t.var_t2.mean + t.var_t3.mean + t.var_t4.mean;
    if (!(den > 0.0)) throw std::runtime_error("empirical_sinr: nonpositive denominator");
    const double s = t.t1_sq.mean / den;
    const double den_se = std::sqrt(t.var_t2.std_error * t.var_t2.std_error +
                                    t.var_t3.std_error * t.var_t3.std_error +
                                    t.var_t4.std_error * t.var_t4.std_error);
    const double rel = std::sqrt(std::pow(t.t1_sq.std_error / t.t1_sq.mean, 2) +
                                 std::pow(den_se / den, 2));
    return {s, s * rel, t.n_samples};
}

MomentReport moment_checks(const chest::LmmseBank& bank, const netgen::LargeScale& ls,
                           const pilots::PilotBook& book, double rho_p, std::size_t n_samples,
                           std::uint64_t seed) {
    (void)rho_p;  // the bank already carries tau * rho_p
    if (n_samples < 2) throw std::invalid_argument("moment_checks: need n_samples >= 2");
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;

    std::vector<ComplexMoments> err(M * K);
    std::vector<ComplexMoments> pair(M > 1 ? (M - 1) * K : 0);
    std::vector<RealMeanVar> fourth(M * K);
    arma::cx_mat ghat_prev(K, kBlock);

    run_blocks(
        ls, book, bank, n_samples, seed, [&](RandomStream&, arma::uword) {},
        [&](arma::uword m, const arma::cx_mat& x, const arma::cx_mat& ghat, arma::uword b) {
            for (arma::uword kk = 0; kk < K; kk++) {
                ComplexMoments& e = err[m * K + kk];
                RealMeanVar& f = fourth[m * K + kk];
                for (arma::uword r = 0; r < b; r++) {
                    const std::complex<double> gh = ghat(kk, r);
                    e.add(gh * std::conj(x(kk, r) - gh));
                    const double p2 = std::norm(gh);
                    f.add(p2 * p2);
                }
                if (m > 0) {
                    ComplexMoments& pc = pair[(m - 1) * K + kk];
                    for (arma::uword r = 0; r < b; r++)
                        pc.add(ghat_prev(kk, r) * std::conj(ghat(kk, r)));
                }
            }
            ghat_prev.cols(0, b - 1) = ghat.cols(0, b - 1);
        },
        [&](RandomStream&, arma::uword) {});

    MomentReport rep;
    rep.n_samples = n_samples;
    rep.gamma = bank.gamma;
    rep.err_corr_mean.set_size(M, K);
    rep.err_corr_se.set_size(M, K);
    rep.fourth_moment.set_size(M, K);
    rep.fourth_moment_se.set_size(M, K);
    for (arma::uword m = 0; m < M; m++) {
        for (arma::uword kk = 0; kk < K; kk++) {
            rep.err_corr_mean(m, kk) = err[m * K + kk].mean();
            rep.err_corr_se(m, kk) = err[m * K + kk].mean_std_error();
            const McEstimate fm = fourth[m * K + kk].mean_estimate();
            rep.fourth_moment(m, kk) = fm.mean;
            rep.fourth_moment_se(m, kk) = fm.std_error;
        }
    }
    if (M > 1) {
        rep.pair_corr_mean.set_size(M - 1, K);
        rep.pair_corr_se.set_size(M - 1, K);
        for (arma::uword m = 0; m + 1 < M; m++) {
            for (arma::uword kk = 0; kk < K; kk++) {
                rep.pair_corr_mean(m, kk) = pair[m * K + kk].mean();
                rep.pair_corr_se(m, kk) = pair[m * K + kk].mean_std_error();
            }
        }
    }
    return rep;
}

std::string MomentReport::to_text() const {
    std::ostringstream os;
    os << "moment checks over " << n_samples << " draws\n";
    double worst_err = 0.0, worst_pair = 0.0, worst_fourth = 0.0;
    for (arma::uword m = 0; m < err_corr_mean.n_rows; m++)
        for (arma::uword k = 0; k < err_corr_mean.n_cols; k++)
            worst_err = std::max(worst_err,
                                 std::abs(err_corr_mean(m, k)) / err_corr_se(m, k));
    for (arma::uword m = 0; m < pair_corr_mean.n_rows; m++)
        for (arma::uword k = 0; k < pair_corr_mean.n_cols; k++)
            worst_pair = std::max(worst_pair,
                                  std::abs(pair_corr_mean(m, k)) / pair_corr_se(m, k));
    for (arma::uword m = 0; m < fourth_moment.n_rows; m++)
        for (arma::uword k = 0; k < fourth_moment.n_cols; k++) {
            const double ref = 2.0 * gamma(m, k) * gamma(m, k);
            worst_fourth = std::max(worst_fourth, std::abs(fourth_moment(m, k) - ref) / ref);
        }
    os << "  estimate/error correlation: worst |mean|/se = " << worst_err << "\n";
    os << "  cross-AP estimate correlation: worst |mean|/se = " << worst_pair << "\n";
    os << "  fourth moment vs 2 gamma^2: worst relative error = " << worst_fourth << "\n";
    return os.str();
}

}  // namespace cfmimo::mcval
