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

#include <armadillo>
#include <vector>

namespace rislocate
{

constexpr double pi = 3.141592653589793238462643383279;
constexpr double two_pi = 2.0 * pi;

// Wraps an angle to [0, 2*pi).
double wrap_two_pi(double x);

// Wraps an angle to (-pi, pi].
double wrap_pi(double x);

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

// Azimuth/elevation pair in radians. Construction normalizes: elevation is
// clamped to [0, pi], azimuth wrapped to [0, 2*pi), and at the poles
// (elevation 0 or pi) azimuth is fixed to 0 since it is undefined there.
struct AoaPair
{
    double azimuth = 0.0;
    double elevation = 0.0;

    AoaPair() = default;
    AoaPair(double az, double el);
};

// One RIS panel: a rows x cols grid of elements in its local y-z plane with
// outward normal along local +x, placed at reference_position and rotated by
// orientation (radians, about the global z axis).
struct RisDescriptor
{
    Vec3 reference_position;
    double orientation = 0.0;
    int rows = 0;
    int cols = 0;
    double element_spacing = 0.0; // meters
    double wavelength = 0.0;      // meters

    int num_elements() const { return rows * cols; }

    // Throws std::invalid_argument unless rows, cols >= 1 and
    // element_spacing, wavelength > 0.
    void validate() const;
};

// Rotation about the z axis by beta.
Vec3 rotate_z(const Vec3 &v, double beta);

// Element coordinates in the RIS local frame, row-major from the reference
// corner: element (r, c) sits at (0, c*spacing, r*spacing).
std::vector<Vec3> element_positions(const RisDescriptor &ris);

// Element coordinates in the global frame:
// p_m + R_z(orientation) * local.
std::vector<Vec3> absolute_element_positions(const RisDescriptor &ris);

// Outward unit normal of the RIS plane in the global frame.
Vec3 surface_normal(const RisDescriptor &ris);

// Unit direction of arrival for the given angles:
// [sin(el)cos(az), sin(el)sin(az), cos(el)].
Vec3 unit_direction(const AoaPair &aoa);

// Wavevector of a plane wave arriving from (az, el):
// -(2*pi/lambda) * unit_direction(aoa).
Vec3 wavevector(const AoaPair &aoa, double wavelength);

// Far-field array response over the given element positions:
// a_l = exp(-j q_l . k(az, el)). Unit-modulus entries.
arma::cx_vec steering_vector(const std::vector<Vec3> &positions, const AoaPair &aoa,
                             double wavelength);

// Spherical-wavefront array response for a source at finite distance:
// a_l = exp(-j 2*pi * ||source - pos_l|| / lambda). Throws
// std::domain_error if the source coincides with an element.
arma::cx_vec nearfield_steering(const std::vector<Vec3> &positions, const Vec3 &source,
                                double wavelength);

// Angles of a source point as seen in the RIS local frame: elevation
// measured from the global +z axis, azimuth in the horizontal plane minus
// the panel orientation. A source at the reference position throws
// std::domain_error.
AoaPair local_aoa(const RisDescriptor &ris, const Vec3 &source);

} // namespace rislocate
