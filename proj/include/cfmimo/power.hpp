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

#pragma once

#include <armadillo>
#include <functional>
#include <vector>

#include "cfmimo/perf.hpp"

namespace cfmimo::power {

struct BisectionSpec {
    double t_lo = 0.0;  // 0 = seed from the full-power operating point
    double t_hi = 0.0;  // 0 = auto-bracket by doubling
    double rel_tol = 1e-3;
    int max_iters = 60;
};

struct TargetSpec {
    arma::vec delta;  // per-user linear SINR targets
    double epsilon = 1e-4;
    int max_iters = 500;
    double drop_fraction = 0.0;
};

enum class FeasStatus { feasible, infeasible, iteration_cap, numerical_failure };

struct FeasibilityResult {
    FeasStatus status = FeasStatus::numerical_failure;
    arma::vec eta;  // witness when feasible
    int iterations = 0;
    double residual = 0.0;  // max relative constraint violation at the witness
};

using FeasibilityOracle = std::function<FeasibilityResult(double)>;

struct MaxMinResult {
    arma::vec eta;
    double t_star = 0.0;
    double t_lo = 0.0;  // certified feasible
    double t_hi = 0.0;  // certified infeasible
    int bisect_iters = 0;
    double equalization_spread = 0.0;  // (max SINR - min SINR)/t_star
};

/// Componentwise feasibility of eta_k d_k >= a_k + (W eta)_k over [0, cap]^K
/// (d > 0, a >= 0, W >= 0 with zero diagonal). Decided by the monotone
/// fixed-point iteration from zero, whose limit is the minimal solution.
struct AffineInterferenceSystem {
    arma::vec d;
    arma::vec a;
    arma::mat w;
};

FeasibilityResult affine_interference_feasible(const AffineInterferenceSystem& sys, double cap,
                                               int max_iters = 50000, double tol = 1e-13);

// ---------------------------------------------------------------------------
// Cell-free uplink
// ---------------------------------------------------------------------------

/// Does any eta in [0,1]^K reach SINR_k >= t for every k? Linear in eta at
/// fixed t; returns the minimal witness when feasible.
FeasibilityResult uplink_feasible(double t, const perf::UplinkCoeffs& coeffs);

MaxMinResult uplink_maxmin(const perf::UplinkCoeffs& coeffs, const BisectionSpec& spec);
MaxMinResult uplink_maxmin(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                           const chest::LmmseBank& bank, double rho_u, const BisectionSpec& spec);

struct TargetResult {
    arma::vec eta;
    bool converged = false;
    arma::vec sinr;
    int iterations = 0;
};

/// Distributed target-SINR iteration from full power. Never throws on
/// unattainable targets; convergence is reported through the flag.
TargetResult target_sinr_iterate(const perf::UplinkCoeffs& coeffs, const TargetSpec& spec);

struct DropResult {
    arma::uvec active_set;  // users meeting the final common target
    arma::vec eta;
    double delta_star = 0.0;
    arma::vec sinr;
};

/// Largest common target delta such that at least ceil((1-f)K) users
/// converge; the remaining users are reported dropped.
DropResult drop_and_retarget(const perf::UplinkCoeffs& coeffs, double drop_fraction,
                             double epsilon = 1e-4, int target_iters = 500,
                             double rel_tol = 1e-3);

// ---------------------------------------------------------------------------
// Small cell
// ---------------------------------------------------------------------------

FeasibilityResult smallcell_feasible(double t, const perf::SmallCellModel& model);
MaxMinResult smallcell_maxmin(const perf::SmallCellModel& model, const BisectionSpec& spec);

// ---------------------------------------------------------------------------
// Downlink second-order cone machinery
// ---------------------------------------------------------------------------

/// Data of the conic reformulation of the downlink constraints in the
/// variable zeta = [1, eta_11^0.5, ..., eta_MK^0.5]:
///   b_k^T zeta >= sqrt(t) ||C_k zeta||_2,  C_k = [F_k; P_k],
///   ||Z_m zeta||_2 <= 1.
/// Diagonal matrices are stored as their diagonals.
struct ConeProblem {
    arma::vec zeta;                    // reference point, leading entry 1
    std::vector<arma::vec> b_vecs;     // K vectors of length MK+1
    std::vector<arma::vec> f_diags;    // K diagonals of F_k
    std::vector<arma::cx_mat> p_mats;  // K matrices, K x (MK+1)
    std::vector<arma::vec> z_diags;    // M diagonals of Z_m
    arma::mat gamma;                   // M x K reference
    double rho_d = 0.0;
    arma::uword n_aps = 0;
    arma::uword n_users = 0;

    arma::uword dim() const { return n_aps * n_users + 1; }
    /// Position of zeta_mk within zeta.
    arma::uword index(arma::uword m, arma::uword k) const { return 1 + k * n_aps + m; }
};

ConeProblem build_cone_problem(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                               const chest::LmmseBank& bank, double rho_d);

/// (b_k^T zeta)^2 / ||C_k zeta||^2; equals the downlink SINR at
/// eta_mk = zeta_mk^2.
double cone_sinr(const ConeProblem& cone, const arma::vec& zeta, arma::uword k);
arma::vec cone_sinr_all(const ConeProblem& cone, const arma::vec& zeta);

struct ConeFeasibilityResult {
    FeasStatus status = FeasStatus::numerical_failure;
    arma::vec zeta;  // witness (leading entry 1)
    int newton_steps = 0;
    double residual = 0.0;  // max normalized cone violation at the witness
};

/// Interior-point (log-barrier) slack minimization over the cone and per-AP
/// constraints; feasible iff the minimal slack is certified nonpositive.
ConeFeasibilityResult downlink_feasible(double t, const ConeProblem& cone);

struct DownlinkMaxMinResult {
    perf::DownlinkPower eta;
    arma::vec zeta;
    double t_star = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int bisect_iters = 0;
    double equalization_spread = 0.0;
};

DownlinkMaxMinResult downlink_maxmin(const ConeProblem& cone, const BisectionSpec& spec);

}  // namespace cfmimo::power
