// Copyright 2026 The Curo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

// Counter-based deterministic random streams. A stream is identified by a
// key folded from explicit integers (seed, replication, period, component,
// ...); draw i of a stream is a pure function of (key, i). Parallel workers
// therefore reproduce serial output exactly, with no shared state.

namespace curo {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Fold an ordered list of subkeys into a single stream key.
inline uint64_t rng_key(uint64_t seed, std::initializer_list<uint64_t> subkeys = {}) {
    uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (uint64_t k : subkeys) h = splitmix64(h ^ (k + 0x9e3779b97f4a7c15ULL));
    return h;
}

/// Uniform double in (0, 1), a pure function of (key, index).
inline double uniform01_at(uint64_t key, uint64_t index) {
    uint64_t bits = splitmix64(key ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

namespace detail {

/// Inverse standard normal CDF (Acklam's rational approximation,
/// |relative error| < 1.2e-9). Branch structure is exact, so results are
/// bit-reproducible across runs.
inline double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Standard normal draw, a pure function of (key, index).
inline double normal_at(uint64_t key, uint64_t index) {
    return detail::normal_quantile(uniform01_at(key, index));
}

/// Sequential view over a keyed stream. Copying the key reproduces the
/// stream; the counter is the only state.
class CounterRng {
public:
    explicit CounterRng(uint64_t key) : key_(key) {}

    double uniform() { return uniform01_at(key_, counter_++); }
    double normal() { return normal_at(key_, counter_++); }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace curo
