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

#include "rislocate/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rislocate
{

double dbm_to_watt(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double watt_to_dbm(double watt)
{
    if (!(watt > 0.0))
        throw std::invalid_argument("watt_to_dbm: power must be positive");
    return 10.0 * std::log10(watt) + 30.0;
}

double pathloss(double r, double wavelength)
{
    if (!(r > 0.0))
        throw std::invalid_argument("pathloss: distance must be positive");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("pathloss: wavelength must be positive");
    double x = wavelength / (4.0 * pi * r);
    return x * x;
}

PathSet generate_paths(const ScenarioConfig &cfg, const RisDescriptor &ris, int ris_index,
                       const Vec3 &source, Rng &rng)
{
    ris.validate();
    if (cfg.num_paths < 1)
        throw std::invalid_argument("generate_paths: num_paths must be >= 1");

    Vec3 n = surface_normal(ris);
    if ((source - ris.reference_position).dot(n) <= 0.0)
        throw std::runtime_error("generate_paths: source is behind the RIS plane");

    double lambda = cfg.wavelength();
    double r_los = (source - ris.reference_position).norm();
    double los_amp = std::sqrt(pathloss(r_los, lambda));
    double phase_offset = rng.uniform(0.0, two_pi);

    PathSet ps;
    ps.ris_index = ris_index;
    ps.phase_offset = phase_offset;
    ps.paths.reserve(static_cast<std::size_t>(cfg.num_paths));

    Path los;
    los.gain = std::polar(los_amp, phase_offset);
    los.aoa = local_aoa(ris, source);
    los.distance = r_los;
    los.is_los = true;
    los.source_point = source;
    ps.paths.push_back(los);

    double nlos_amp = los_amp * std::pow(10.0, -cfg.nlos_power_ratio_db / 20.0);
    for (int c = 1; c < cfg.num_paths; ++c)
    {
        Vec3 sc;
        bool found = false;
        for (int attempt = 0; attempt < 100000; ++attempt)
        {
            sc = {rng.uniform(0.0, cfg.room.x), rng.uniform(0.0, cfg.room.y),
                  rng.uniform(0.0, cfg.room.z)};
            if ((sc - ris.reference_position).dot(n) > 0.0)
            {
                found = true;
                break;
            }
        }
        if (!found)
            throw std::runtime_error(
                "generate_paths: no room volume in front of the RIS to place scatterers");

        Path p;
        double extra = cfg.common_path_phase ? 0.0 : rng.uniform(0.0, two_pi);
        p.gain = std::polar(nlos_amp, wrap_two_pi(phase_offset + extra));
        p.aoa = local_aoa(ris, sc);
        p.distance = (sc - source).norm() + (ris.reference_position - sc).norm();
        p.is_los = false;
        p.source_point = sc;
        ps.paths.push_back(p);
    }
    return ps;
}

ObservationBlock observe(const PathSet &ps, const RisDescriptor &ris, const Codebook &cb,
                         std::complex<double> pilot, double noise_w, FieldModel field, Rng &rng)
{
    ris.validate();
    if (cb.num_elements() != ris.num_elements())
        throw std::invalid_argument("observe: codebook size does not match the RIS element count");
    if (noise_w < 0.0)
        throw std::invalid_argument("observe: noise power must be >= 0");
    if (ps.paths.empty())
        throw std::invalid_argument("observe: path set is empty");

    double lambda = ris.wavelength;
    std::vector<Vec3> local = element_positions(ris);
    std::vector<Vec3> global;
    if (field == FieldModel::near)
        global = absolute_element_positions(ris);

    arma::cx_vec h(local.size(), arma::fill::zeros);
    for (const Path &p : ps.paths)
    {
        arma::cx_vec a = (field == FieldModel::near)
                             ? nearfield_steering(global, p.source_point, lambda)
                             : steering_vector(local, p.aoa, lambda);
        h += p.gain * a;
    }

    arma::uword T = cb.profiles.n_cols;
    ObservationBlock ob;
    ob.ris_index = ps.ris_index;
    ob.codebook = cb;
    ob.observations.set_size(T);

    double noise_amp = std::sqrt(noise_w);
    for (arma::uword t = 0; t < T; ++t)
    {
        std::complex<double> y = arma::cdot(cb.profiles.col(t), h) * pilot;
        if (noise_w > 0.0)
        {
            // u_t^H w with w ~ CN(0, noise_w I); since ||u_t|| = 1 this is a
            // single CN(0, noise_w) draw.
            y += noise_amp * rng.cgauss();
        }
        ob.observations[t] = y;
    }
    return ob;
}

void dump_observations_csv(const std::vector<ObservationBlock> &blocks, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("dump_observations_csv: cannot open " + path);
    f << "m,t,re,im\n";
    char re[64];
    char im[64];
    for (const ObservationBlock &ob : blocks)
        for (arma::uword t = 0; t < ob.observations.n_elem; ++t)
        {
            std::snprintf(re, sizeof(re), "%.17g", ob.observations[t].real());
            std::snprintf(im, sizeof(im), "%.17g", ob.observations[t].imag());
            f << ob.ris_index << ',' << t << ',' << re << ',' << im << '\n';
        }
    if (!f)
        throw std::runtime_error("dump_observations_csv: write failed for " + path);
}

} // namespace rislocate
