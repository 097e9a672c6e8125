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

#include <cmath>
#include <functional>

#include "cfmimo/expint.hpp"

using namespace cfmimo::perf;

namespace {

// Adaptive Simpson quadrature, the independent oracle for the Ei-based rate.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fb, fm, whole, tol, 48);
}

double expected_log_rate(double w) {
    // E[log2(1 + w X)], X ~ Exp(1), by quadrature on a truncated domain
    return integrate([w](double x) { return std::log2(1.0 + w * x) * std::exp(-x); }, 0.0, 60.0,
                     1e-9);
}

}  // namespace

TEST_CASE("E1 reference values") {
    CHECK(expint_e1(1.0) == doctest::Approx(0.21938393439552026).epsilon(1e-12));
    CHECK(expint_ei_negative(-1.0) == doctest::Approx(-0.21938393439552026).epsilon(1e-12));
    // series/continued-fraction handover is continuous
    CHECK(expint_e1(1.0 - 1e-13) == doctest::Approx(expint_e1(1.0 + 1e-13)).epsilon(1e-9));
    CHECK_THROWS_AS(expint_e1(0.0), std::invalid_argument);
    CHECK_THROWS_AS(expint_ei_negative(1.0), std::invalid_argument);
}

TEST_CASE("rate at omega = 1 equals the frozen reference") {
    CHECK(exp_fading_rate_bits(1.0) == doctest::Approx(0.8603473822708868).epsilon(1e-6));
}

TEST_CASE("rate vanishes as omega -> 0") {
    CHECK(exp_fading_rate_bits(0.0) == 0.0);
    CHECK(exp_fading_rate_bits(1e-12) < 1e-10);
    CHECK(exp_fading_rate_bits(1e-300) >= 0.0);  // no overflow in the scaled form
}

TEST_CASE("rate matches quadrature across twelve decades") {
    for (double w = 1e-3; w <= 1.0001e3; w *= std::pow(10.0, 0.5)) {
        const double closed = exp_fading_rate_bits(w);
        const double quad = expected_log_rate(w);
        CHECK(std::abs(closed - quad) < 1e-4);
    }
}

TEST_CASE("rate is increasing in omega") {
    double prev = 0.0;
    for (double w = 1e-3; w <= 1e3; w *= 2.0) {
        const double r = exp_fading_rate_bits(w);
        CHECK(r > prev);
        prev = r;
    }
}
