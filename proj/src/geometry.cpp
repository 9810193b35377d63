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

#include "rislocate/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace rislocate
{

double wrap_two_pi(double x)
{
    double y = std::fmod(x, two_pi);
    if (y < 0.0)
        y += two_pi;
    if (y >= two_pi)
        y = 0.0;
    return y;
}

double wrap_pi(double x)
{
    double y = wrap_two_pi(x);
    if (y > pi)
        y -= two_pi;
    return y;
}

AoaPair::AoaPair(double az, double el)
{
    if (el < 0.0)
        el = 0.0;
    if (el > pi)
        el = pi;
    elevation = el;
    azimuth = (el == 0.0 || el == pi) ? 0.0 : wrap_two_pi(az);
}

void RisDescriptor::validate() const
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("RIS descriptor: rows and cols must be >= 1");
    if (!(element_spacing > 0.0))
        throw std::invalid_argument("RIS descriptor: element spacing must be positive");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("RIS descriptor: wavelength must be positive");
}

Vec3 rotate_z(const Vec3 &v, double beta)
{
    double c = std::cos(beta);
    double s = std::sin(beta);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

std::vector<Vec3> element_positions(const RisDescriptor &ris)
{
    ris.validate();
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(ris.num_elements()));
    for (int r = 0; r < ris.rows; ++r)
        for (int c = 0; c < ris.cols; ++c)
            out.push_back({0.0, c * ris.element_spacing, r * ris.element_spacing});
    return out;
}

std::vector<Vec3> absolute_element_positions(const RisDescriptor &ris)
{
    std::vector<Vec3> out = element_positions(ris);
    for (auto &q : out)
        q = ris.reference_position + rotate_z(q, ris.orientation);
    return out;
}

Vec3 surface_normal(const RisDescriptor &ris)
{
    return rotate_z({1.0, 0.0, 0.0}, ris.orientation);
}

Vec3 unit_direction(const AoaPair &aoa)
{
    double se = std::sin(aoa.elevation);
    return {se * std::cos(aoa.azimuth), se * std::sin(aoa.azimuth), std::cos(aoa.elevation)};
}

Vec3 wavevector(const AoaPair &aoa, double wavelength)
{
    if (!(wavelength > 0.0))
        throw std::invalid_argument("wavevector: wavelength must be positive");
    return unit_direction(aoa) * (-two_pi / wavelength);
}

arma::cx_vec steering_vector(const std::vector<Vec3> &positions, const AoaPair &aoa,
                             double wavelength)
{
    Vec3 k = wavevector(aoa, wavelength);
    arma::cx_vec a(positions.size());
    for (std::size_t l = 0; l < positions.size(); ++l)
    {
        double ph = -positions[l].dot(k);
        a[l] = std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return a;
}

arma::cx_vec nearfield_steering(const std::vector<Vec3> &positions, const Vec3 &source,
                                double wavelength)
{
    if (!(wavelength > 0.0))
        throw std::invalid_argument("nearfield_steering: wavelength must be positive");
    arma::cx_vec a(positions.size());
    for (std::size_t l = 0; l < positions.size(); ++l)
    {
        double r = (source - positions[l]).norm();
        if (r <= 0.0)
            throw std::domain_error("nearfield_steering: source coincides with an element");
        double ph = -two_pi * r / wavelength;
        a[l] = std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return a;
}

AoaPair local_aoa(const RisDescriptor &ris, const Vec3 &source)
{
    Vec3 d = source - ris.reference_position;
    double r = d.norm();
    if (r <= 0.0)
        throw std::domain_error("local_aoa: source coincides with the RIS reference");
    double cz = d.z / r;
    if (cz > 1.0)
        cz = 1.0;
    if (cz < -1.0)
        cz = -1.0;
    double el = std::acos(cz);
    double az = (d.x == 0.0 && d.y == 0.0) ? 0.0 : std::atan2(d.y, d.x) - ris.orientation;
    return {az, el};
}

} // namespace rislocate
