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

#include <complex>
#include <vector>

#include <armadillo>

#include "rislocate/codebook.hpp"
#include "rislocate/geometry.hpp"

namespace rislocate
{

// Deterministic parameters of a single-path channel toward one RIS, in the
// estimation ordering [amplitude, phase, azimuth, elevation].
struct ChannelParams
{
    double amplitude = 0.0;    // sqrt of the path power gain
    double phase_offset = 0.0; // radians
    double azimuth = 0.0;      // radians, RIS local frame
    double elevation = 0.0;    // radians, RIS local frame
};

// Gradient of the noiseless observation mu_t = amplitude * e^{j phase} *
// u_t^H a(az, el) * pilot with respect to [amplitude, phase, azimuth,
// elevation]. Length-4 complex vector.
arma::cx_vec mu_gradient(const ChannelParams &params, const arma::cx_vec &profile,
                         const RisDescriptor &ris, std::complex<double> pilot);

// 4x4 Fisher information of [amplitude, phase, azimuth, elevation] from all
// profiles of the codebook: J_ij = (2/noise_w) sum_t Re{conj(g_t,i) g_t,j}
// with g_t = mu_gradient for profile t. Requires noise_w > 0.
arma::mat channel_fim(const ChannelParams &params, const Codebook &cb, const RisDescriptor &ris,
                      std::complex<double> pilot, double noise_w);

// 2x2 equivalent Fisher information of (azimuth, elevation): the Schur
// complement of the (amplitude, phase) block. Throws std::runtime_error if
// the nuisance block is singular.
arma::mat aoa_fim(const arma::mat &j_eta);

// 2x2 error covariance bound of the angle estimate, ordered (elevation,
// azimuth) to match the measurement vector convention. Inverse of the
// permuted aoa_fim; throws std::runtime_error if that is singular.
arma::mat aoa_covariance(const ChannelParams &params, const Codebook &cb,
                         const RisDescriptor &ris, std::complex<double> pilot, double noise_w);

// 3x2 Jacobian [d(elevation)/dp, d(azimuth)/dp] of the local angles at RIS m
// with respect to the source position. Throws std::domain_error when p is on
// the vertical axis through the RIS reference (azimuth undefined there).
arma::mat position_jacobian(const Vec3 &p, const RisDescriptor &ris);

// LOS single-path parameters for a source at p: free-space amplitude, zero
// phase, local angles.
ChannelParams los_channel_params(const RisDescriptor &ris, const Vec3 &p);

// 3x3 position Fisher information accumulated over all RISs:
// J(p) = sum_m T_m G_m^{-1} T_m^T with G_m from aoa_covariance.
arma::mat position_fim(const Vec3 &p, const std::vector<RisDescriptor> &ris,
                       const std::vector<Codebook> &codebooks,
                       const std::vector<ChannelParams> &params, std::complex<double> pilot,
                       double noise_w);

// sqrt(trace(J(p)^{-1})). Throws std::runtime_error on a singular J.
double peb(const arma::mat &j_position);

// PEB under LOS-only channel parameters at p, for convenience.
double peb_at(const Vec3 &p, const std::vector<RisDescriptor> &ris,
              const std::vector<Codebook> &codebooks, double tx_power_w, double noise_w);

} // namespace rislocate
