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

#include "cfmimo/expint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfmimo::perf {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr int kMaxIter = 400;

// E1(x) = -gamma - ln x + sum_{n>=1} (-1)^{n+1} x^n / (n n!), for x <= 1.
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n < kMaxIter; n++) {
        term *= -x / double(n);
        const double add = -term / double(n);
        sum += add;
        if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-30)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

// exp(x) E1(x) via the Lentz continued fraction, for x >= 1:
// E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...)))).
double e1_cf_scaled(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; i++) {
        const double a = -double(i) * double(i);
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) return h;
    }
    return h;
}

}  // namespace

double expint_e1(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("expint_e1: requires x > 0");
    if (x <= 1.0) return e1_series(x);
    return std::exp(-x) * e1_cf_scaled(x);
}

double expint_e1_scaled(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("expint_e1_scaled: requires x > 0");
    if (x <= 1.0) return std::exp(x) * e1_series(x);
    return e1_cf_scaled(x);
}

double expint_ei_negative(double x) {
    if (!(x < 0.0)) throw std::invalid_argument("expint_ei_negative: requires x < 0");
    return -expint_e1(-x);
}

double exp_fading_rate_bits(double w) {
    if (!(w > 0.0)) {
        if (w == 0.0) return 0.0;
        throw std::invalid_argument("exp_fading_rate_bits: requires w >= 0");
    }
    const double r = M_LOG2E * expint_e1_scaled(1.0 / w);
    if (!std::isfinite(r)) throw std::runtime_error("exp_fading_rate_bits: non-finite result");
    return r;
}

}  // namespace cfmimo::perf
