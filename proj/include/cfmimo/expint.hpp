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

namespace cfmimo::perf {

/// Exponential integral E1(x) for x > 0. Series for small x, continued
/// fraction for large x; absolute accuracy better than 1e-12.
double expint_e1(double x);

/// exp(x) * E1(x) for x > 0, evaluated without overflow for large x.
double expint_e1_scaled(double x);

/// Ei(x) for x < 0 (equals -E1(-x)).
double expint_ei_negative(double x);

/// E[log2(1 + w X)] for X ~ Exp(1):
/// -log2(e) * exp(1/w) * Ei(-1/w), w > 0. Returns 0 for w <= 0.
double exp_fading_rate_bits(double w);

}  // namespace cfmimo::perf
