// SPDX-License-Identifier: Apache-2.0
//
// ris-locate: localization with multiple single-RX-RF-chain RISs
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
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace rislocate
{

// Deterministic random stream. mt19937_64 raw output is pinned by the C++
// standard, and all value transforms are implemented here rather than via
// std::*_distribution (whose sequences are implementation-defined), so a
// given seed yields the same draws on every platform and toolchain.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform()
    {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on [a, b).
    double uniform(double a, double b)
    {
        return a + (b - a) * uniform();
    }

    // Standard normal via Box-Muller (cosine branch, one value per call).
    double normal()
    {
        double u1 = 0.0;
        do
            u1 = uniform();
        while (u1 <= 0.0);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Circularly-symmetric complex normal, unit variance overall
    // (real and imaginary parts each N(0, 1/2)).
    std::complex<double> cgauss()
    {
        double re = normal();
        double im = normal();
        return {re * 0.7071067811865475244008443621048, im * 0.7071067811865475244008443621048};
    }

  private:
    std::mt19937_64 eng_;
};

// Mixes (master, a, b) into an independent child seed, splitmix64-style.
// Used to give every (sweep point, trial) pair its own stream so results
// do not depend on scheduling order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b)
{
    auto mix = [](std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    };
    std::uint64_t s = mix(master);
    s = mix(s ^ mix(a + 0xD1B54A32D192ED03ULL));
    s = mix(s ^ mix(b + 0x8CB92BA72F3D8DD7ULL));
    return s;
}

} // namespace rislocate
