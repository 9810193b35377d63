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

#include "rislocate/fisher.hpp"

#include <cmath>
#include <stdexcept>

#include "rislocate/channel.hpp"

namespace rislocate
{

namespace
{

// Array response and its angle derivatives at (az, el), all length L:
// a_l       = exp(-j q_l . k)
// da_l/daz  = a_l * (-j q_l . dk/daz)
// da_l/del  = a_l * (-j q_l . dk/del)
// with k = -(2*pi/lambda)[sin(el)cos(az), sin(el)sin(az), cos(el)].
struct SteeringDerivatives
{
    arma::cx_vec a;
    arma::cx_vec da_az;
    arma::cx_vec da_el;
};

SteeringDerivatives steering_derivatives(const RisDescriptor &ris, double az, double el)
{
    std::vector<Vec3> q = element_positions(ris);
    double c = -two_pi / ris.wavelength;
    double saz = std::sin(az);
    double caz = std::cos(az);
    double sel = std::sin(el);
    double cel = std::cos(el);
    Vec3 k = Vec3{sel * caz, sel * saz, cel} * c;
    Vec3 dk_az = Vec3{-sel * saz, sel * caz, 0.0} * c;
    Vec3 dk_el = Vec3{cel * caz, cel * saz, -sel} * c;

    SteeringDerivatives out;
    out.a.set_size(q.size());
    out.da_az.set_size(q.size());
    out.da_el.set_size(q.size());
    const std::complex<double> mj(0.0, -1.0);
    for (std::size_t l = 0; l < q.size(); ++l)
    {
        double ph = -q[l].dot(k);
        std::complex<double> al(std::cos(ph), std::sin(ph));
        out.a[l] = al;
        out.da_az[l] = al * (mj * q[l].dot(dk_az));
        out.da_el[l] = al * (mj * q[l].dot(dk_el));
    }
    return out;
}

arma::mat symmetrize(arma::mat m)
{
    return 0.5 * (m + m.t());
}

} // namespace

arma::cx_vec mu_gradient(const ChannelParams &params, const arma::cx_vec &profile,
                         const RisDescriptor &ris, std::complex<double> pilot)
{
    ris.validate();
    if (profile.n_elem != static_cast<arma::uword>(ris.num_elements()))
        throw std::invalid_argument("mu_gradient: profile length does not match the element count");

    SteeringDerivatives sd = steering_derivatives(ris, params.azimuth, params.elevation);
    std::complex<double> c0 = arma::cdot(profile, sd.a);
    std::complex<double> caz = arma::cdot(profile, sd.da_az);
    std::complex<double> cel = arma::cdot(profile, sd.da_el);

    std::complex<double> e = std::polar(1.0, params.phase_offset) * pilot;
    const std::complex<double> j(0.0, 1.0);
    arma::cx_vec g(4);
    g[0] = c0 * e;
    g[1] = j * params.amplitude * c0 * e;
    g[2] = params.amplitude * caz * e;
    g[3] = params.amplitude * cel * e;
    return g;
}

arma::mat channel_fim(const ChannelParams &params, const Codebook &cb, const RisDescriptor &ris,
                      std::complex<double> pilot, double noise_w)
{
    ris.validate();
    if (!(noise_w > 0.0))
        throw std::invalid_argument("channel_fim: noise power must be positive");
    if (cb.num_elements() != ris.num_elements())
        throw std::invalid_argument("channel_fim: codebook does not match the RIS element count");

    SteeringDerivatives sd = steering_derivatives(ris, params.azimuth, params.elevation);
    arma::cx_vec c0 = cb.profiles.t() * sd.a;
    arma::cx_vec caz = cb.profiles.t() * sd.da_az;
    arma::cx_vec cel = cb.profiles.t() * sd.da_el;

    std::complex<double> e = std::polar(1.0, params.phase_offset) * pilot;
    const std::complex<double> j(0.0, 1.0);
    arma::cx_mat g(cb.profiles.n_cols, 4);
    g.col(0) = c0 * e;
    g.col(1) = (j * params.amplitude) * g.col(0);
    g.col(2) = (params.amplitude * e) * caz;
    g.col(3) = (params.amplitude * e) * cel;

    arma::mat jm = (2.0 / noise_w) * arma::real(g.t() * g);
    return symmetrize(jm);
}

arma::mat aoa_fim(const arma::mat &j_eta)
{
    if (j_eta.n_rows != 4 || j_eta.n_cols != 4)
        throw std::invalid_argument("aoa_fim: expected a 4x4 matrix");
    arma::mat a = j_eta.submat(0, 0, 1, 1);
    arma::mat b = j_eta.submat(0, 2, 1, 3);
    arma::mat c = j_eta.submat(2, 2, 3, 3);
    arma::mat a_inv;
    if (!arma::inv_sympd(a_inv, symmetrize(a)) && !arma::inv(a_inv, a))
        throw std::runtime_error("aoa_fim: amplitude/phase information block is singular");
    return symmetrize(c - b.t() * a_inv * b);
}

arma::mat aoa_covariance(const ChannelParams &params, const Codebook &cb,
                         const RisDescriptor &ris, std::complex<double> pilot, double noise_w)
{
    arma::mat ja = aoa_fim(channel_fim(params, cb, ris, pilot, noise_w));
    arma::mat g_azel;
    if (!arma::inv_sympd(g_azel, ja) && !arma::inv(g_azel, ja))
        throw std::runtime_error("aoa_covariance: angle information matrix is singular");
    // Reorder (azimuth, elevation) -> (elevation, azimuth).
    arma::mat g(2, 2);
    g(0, 0) = g_azel(1, 1);
    g(0, 1) = g_azel(1, 0);
    g(1, 0) = g_azel(0, 1);
    g(1, 1) = g_azel(0, 0);
    return g;
}

arma::mat position_jacobian(const Vec3 &p, const RisDescriptor &ris)
{
    Vec3 d = p - ris.reference_position;
    double n = d.norm();
    if (n <= 0.0)
        throw std::domain_error("position_jacobian: p coincides with the RIS reference");
    double horiz2 = d.x * d.x + d.y * d.y;
    double kappa = std::sqrt(horiz2) / n; // sin(elevation)
    if (kappa < 1e-9)
        throw std::domain_error(
            "position_jacobian: p is on the vertical axis of the RIS, azimuth is undefined");

    double n3 = n * n * n;
    arma::mat t(3, 2);
    // d(elevation)/dp, from elevation = acos(dz / n)
    t(0, 0) = d.z * d.x / (kappa * n3);
    t(1, 0) = d.z * d.y / (kappa * n3);
    t(2, 0) = (d.z * d.z / n3 - 1.0 / n) / kappa;
    // d(azimuth)/dp, from azimuth = atan2(dy, dx) - orientation
    t(0, 1) = -d.y / horiz2;
    t(1, 1) = d.x / horiz2;
    t(2, 1) = 0.0;
    return t;
}

ChannelParams los_channel_params(const RisDescriptor &ris, const Vec3 &p)
{
    ris.validate();
    double r = (p - ris.reference_position).norm();
    AoaPair aoa = local_aoa(ris, p);
    ChannelParams params;
    params.amplitude = std::sqrt(pathloss(r, ris.wavelength));
    params.phase_offset = 0.0;
    params.azimuth = aoa.azimuth;
    params.elevation = aoa.elevation;
    return params;
}

arma::mat position_fim(const Vec3 &p, const std::vector<RisDescriptor> &ris,
                       const std::vector<Codebook> &codebooks,
                       const std::vector<ChannelParams> &params, std::complex<double> pilot,
                       double noise_w)
{
    if (ris.empty() || ris.size() != codebooks.size() || ris.size() != params.size())
        throw std::invalid_argument("position_fim: ris/codebook/params lists must align");
    arma::mat j(3, 3, arma::fill::zeros);
    for (std::size_t m = 0; m < ris.size(); ++m)
    {
        arma::mat g = aoa_covariance(params[m], codebooks[m], ris[m], pilot, noise_w);
        arma::mat w;
        if (!arma::inv_sympd(w, symmetrize(g)) && !arma::inv(w, g))
            throw std::runtime_error("position_fim: angle covariance is singular");
        arma::mat t = position_jacobian(p, ris[m]);
        j += t * w * t.t();
    }
    return symmetrize(j);
}

double peb(const arma::mat &j_position)
{
    if (j_position.n_rows != 3 || j_position.n_cols != 3)
        throw std::invalid_argument("peb: expected a 3x3 matrix");
    arma::mat inv;
    if (!arma::inv_sympd(inv, symmetrize(j_position)) && !arma::inv(inv, j_position))
        throw std::runtime_error("peb: position information matrix is singular");
    double tr = arma::trace(inv);
    if (!(tr > 0.0) || !std::isfinite(tr))
        throw std::runtime_error("peb: position information matrix is not positive definite");
    return std::sqrt(tr);
}

double peb_at(const Vec3 &p, const std::vector<RisDescriptor> &ris,
              const std::vector<Codebook> &codebooks, double tx_power_w, double noise_w)
{
    if (!(tx_power_w > 0.0))
        throw std::invalid_argument("peb_at: transmit power must be positive");
    std::vector<ChannelParams> params;
    params.reserve(ris.size());
    for (const RisDescriptor &r : ris)
        params.push_back(los_channel_params(r, p));
    std::complex<double> pilot(std::sqrt(tx_power_w), 0.0);
    return peb(position_fim(p, ris, codebooks, params, pilot, noise_w));
}

} // namespace rislocate
