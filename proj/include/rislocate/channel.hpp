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
#include <cstdint>
#include <string>
#include <vector>

#include <armadillo>

#include "rislocate/codebook.hpp"
#include "rislocate/geometry.hpp"
#include "rislocate/rng.hpp"

namespace rislocate
{

enum class FieldModel
{
    far,
    near
};

// Physical scene shared by every RIS: room extent, carrier, powers (stored
// in watts; CLI/config convert from dBm), multipath makeup, and the master
// seed for all randomness.
struct ScenarioConfig
{
    Vec3 room = {10.0, 10.0, 10.0};
    double carrier_hz = 30.0e9;
    double tx_power_w = 0.01;
    double noise_w = 1.2589254117941662e-11;
    int num_paths = 3;
    double nlos_power_ratio_db = 20.0;
    FieldModel field_model = FieldModel::far;
    bool common_path_phase = false;
    std::uint64_t seed = 1;

    double wavelength() const { return 299792458.0 / carrier_hz; }
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Free-space power gain lambda^2 / (4*pi*r)^2. Requires r > 0.
double pathloss(double r, double wavelength);

// One propagation path as seen by one RIS.
struct Path
{
    std::complex<double> gain;
    AoaPair aoa;
    double distance = 0.0; // total traveled length, meters
    bool is_los = false;
    Vec3 source_point; // the user (LOS) or the scatterer (NLOS)
};

// All paths toward one RIS for one channel realization.
struct PathSet
{
    int ris_index = 0;
    std::vector<Path> paths;
    double phase_offset = 0.0; // the LOS synchronization phase, U[0, 2*pi)
};

// One RIS's measurement vector: y_t = u_t^H h s + u_t^H w for each profile.
struct ObservationBlock
{
    arma::cx_vec observations; // length T
    Codebook codebook;
    int ris_index = 0;
};

// Draws one channel realization toward a RIS: a LOS path with free-space
// gain and random phase, plus (num_paths - 1) single-bounce paths from
// scatterers uniform in the room's front half-space of the panel, each
// nlos_power_ratio_db below the LOS in power. Per path, the extra phase is
// independent U[0, 2*pi), or equal to the LOS phase when common_path_phase
// is set. Throws std::runtime_error if the source is behind the panel.
PathSet generate_paths(const ScenarioConfig &cfg, const RisDescriptor &ris, int ris_index,
                       const Vec3 &source, Rng &rng);

// Synthesizes the T observations for one RIS under the given codebook,
// pilot amplitude and noise power, using plane-wave or spherical-wave array
// responses per the field model. noise_w == 0 yields noiseless data.
ObservationBlock observe(const PathSet &ps, const RisDescriptor &ris, const Codebook &cb,
                         std::complex<double> pilot, double noise_w, FieldModel field, Rng &rng);

// Writes blocks as CSV with header "m,t,re,im".
void dump_observations_csv(const std::vector<ObservationBlock> &blocks, const std::string &path);

} // namespace rislocate
