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
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cfmimo {

/// Derives an independent seed for a sub-stream. Distinct (base, stream)
/// pairs map to well-separated seeds (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base ^ (stream + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named sub-stream tags so independent consumers of the same base seed
// never overlap (oracle draws must not reuse the system-under-test stream).
namespace seed_stream {
inline constexpr std::uint64_t geometry = 0x01;
inline constexpr std::uint64_t shadowing = 0x02;
inline constexpr std::uint64_t pilots = 0x03;
inline constexpr std::uint64_t channel = 0x04;
inline constexpr std::uint64_t mc_oracle = 0x1000;
}  // namespace seed_stream

/// Seeded random stream with uniform, standard-normal and circularly
/// symmetric complex-normal draws. Box-Muller with a cached spare keeps
/// the normal path fast on the hot Monte Carlo loops.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0,1)
        return (gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite
        const double u1 = ((gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = (gen_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// CN(0,1): real and imaginary parts i.i.d. N(0, 1/2), unit E|x|^2.
    std::complex<double> complex_normal() {
        const double u1 = ((gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = (gen_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-std::log(u1));
        const double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    void fill_normal(arma::vec& v) {
        for (arma::uword i = 0; i < v.n_elem; i++) v[i] = normal();
    }

    void fill_complex_normal(arma::cx_mat& m) {
        std::complex<double>* p = m.memptr();
        const arma::uword n = m.n_elem;
        for (arma::uword i = 0; i < n; i++) p[i] = complex_normal();
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cfmimo
