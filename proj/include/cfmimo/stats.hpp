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

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

namespace cfmimo {

/// A Monte Carlo point estimate with its standard error.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

/// Streaming mean/variance of a real-valued series. Accumulators are raw
/// power sums, so partial results from parallel chunks merge by addition.
class RealMeanVar {
  public:
    void add(double x) {
        n_ += 1;
        s1_ += x;
        s2_ += x * x;
    }

    void merge(const RealMeanVar& o) {
        n_ += o.n_;
        s1_ += o.s1_;
        s2_ += o.s2_;
    }

    std::size_t count() const { return n_; }
    double mean() const { return n_ ? s1_ / double(n_) : 0.0; }

    double variance() const {
        if (n_ < 2) throw std::runtime_error("RealMeanVar: need n >= 2");
        const double m = mean();
        double v = (s2_ - double(n_) * m * m) / double(n_ - 1);
        return v > 0.0 ? v : 0.0;
    }

    McEstimate mean_estimate() const {
        return {mean(), std::sqrt(variance() / double(n_)), n_};
    }

  private:
    std::size_t n_ = 0;
    double s1_ = 0.0;
    double s2_ = 0.0;
};

/// Streaming moments of a complex series up to fourth order, enough to
/// report E[x], Var[x] = E|x-mu|^2 and the standard errors of both.
/// Stores raw sums only (mergeable across chunks); central moments are
/// reconstructed on demand.
class ComplexMoments {
  public:
    using cx = std::complex<double>;

    void add(cx x) {
        const double a2 = std::norm(x);
        n_ += 1;
        s1_ += x;
        s2_ += x * x;
        sa2_ += a2;
        s3_ += x * a2;
        sa4_ += a2 * a2;
    }

    void merge(const ComplexMoments& o) {
        n_ += o.n_;
        s1_ += o.s1_;
        s2_ += o.s2_;
        sa2_ += o.sa2_;
        s3_ += o.s3_;
        sa4_ += o.sa4_;
    }

    std::size_t count() const { return n_; }
    cx mean() const { return n_ ? s1_ / double(n_) : cx{}; }

    /// E|x - mu|^2 with the n-1 correction.
    double variance() const {
        if (n_ < 2) throw std::runtime_error("ComplexMoments: need n >= 2");
        const cx mu = mean();
        double v = (sa2_ - double(n_) * std::norm(mu)) / double(n_ - 1);
        return v > 0.0 ? v : 0.0;
    }

    /// E|x - mu|^4 (biased, fine at Monte Carlo sample counts).
    double central4() const {
        const cx mu = mean();
        const double c = std::norm(mu);
        const double m4 = (sa4_ - 4.0 * std::real(std::conj(mu) * s3_) +
                           2.0 * std::real(std::conj(mu) * std::conj(mu) * s2_) +
                           4.0 * c * sa2_ - 3.0 * double(n_) * c * c) /
                          double(n_);
        return m4 > 0.0 ? m4 : 0.0;
    }

    double mean_std_error() const { return std::sqrt(variance() / double(n_)); }

    /// Standard error of the variance estimate: sqrt((m4 - var^2)/n).
    double variance_std_error() const {
        const double v = variance();
        double d = central4() - v * v;
        if (d < 0.0) d = 0.0;
        return std::sqrt(d / double(n_));
    }

    McEstimate variance_estimate() const { return {variance(), variance_std_error(), n_}; }

  private:
    std::size_t n_ = 0;
    cx s1_{};
    cx s2_{};
    double sa2_ = 0.0;
    cx s3_{};
    double sa4_ = 0.0;
};

}  // namespace cfmimo
