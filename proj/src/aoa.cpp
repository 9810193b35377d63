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

#include "rislocate/aoa.hpp"

#include <cmath>
#include <stdexcept>

#include "rislocate/fisher.hpp"

namespace rislocate
{

namespace
{

int grid_count(double lo, double hi, double step)
{
    if (!(step > 0.0))
        throw std::invalid_argument("build_dictionary: grid step must be positive");
    if (hi < lo)
        throw std::invalid_argument("build_dictionary: range must satisfy max >= min");
    return 1 + static_cast<int>(std::floor((hi - lo) / step + 1e-9));
}

} // namespace

Dictionary build_dictionary(const RisDescriptor &ris, double az_min, double az_max, double el_min,
                            double el_max, double az_step, double el_step)
{
    ris.validate();
    int n_az = grid_count(az_min, az_max, az_step);
    int n_el = grid_count(el_min, el_max, el_step);

    Dictionary dict;
    dict.azimuth_step = az_step;
    dict.elevation_step = el_step;
    dict.grid.reserve(static_cast<std::size_t>(n_az) * static_cast<std::size_t>(n_el));
    dict.atoms.set_size(ris.num_elements(),
                        static_cast<arma::uword>(n_az) * static_cast<arma::uword>(n_el));

    std::vector<Vec3> q = element_positions(ris);
    arma::uword col = 0;
    for (int ia = 0; ia < n_az; ++ia)
        for (int ie = 0; ie < n_el; ++ie)
        {
            AoaPair aoa(az_min + ia * az_step, el_min + ie * el_step);
            dict.grid.push_back(aoa);
            dict.atoms.col(col++) = steering_vector(q, aoa, ris.wavelength);
        }
    return dict;
}

BeamspaceCache make_beamspace(const Codebook &cb, const Dictionary &dict)
{
    if (cb.profiles.n_rows != dict.atoms.n_rows)
        throw std::invalid_argument("make_beamspace: codebook and dictionary element counts differ");
    BeamspaceCache cache;
    cache.psi = cb.profiles.t() * dict.atoms;
    cache.column_norms = arma::sqrt(arma::sum(arma::square(arma::abs(cache.psi)), 0)).t();
    return cache;
}

SparseEstimate omp(const arma::cx_vec &y, const BeamspaceCache &beamspace, const Dictionary &dict,
                   int sparsity)
{
    arma::uword T = y.n_elem;
    arma::uword J = beamspace.psi.n_cols;
    if (beamspace.psi.n_rows != T)
        throw std::invalid_argument("omp: observation length does not match the beamspace rows");
    if (dict.grid.size() != J)
        throw std::invalid_argument("omp: dictionary and beamspace atom counts differ");
    if (sparsity < 1 || static_cast<arma::uword>(sparsity) > T)
        throw std::invalid_argument("omp: sparsity must be in [1, num observations]");
    if (J < 4 * T)
        throw std::invalid_argument("omp: dictionary must hold at least 4x as many atoms as observations");

    SparseEstimate est;
    est.residual_norms.push_back(arma::norm(y));

    std::vector<arma::uword> support;
    std::vector<bool> taken(J, false);
    arma::cx_vec residual = y;
    arma::cx_vec coeffs;

    for (int it = 0; it < sparsity; ++it)
    {
        arma::cx_vec corr = beamspace.psi.t() * residual;
        double best_score = -1.0;
        arma::uword best = J;
        for (arma::uword j = 0; j < J; ++j)
        {
            if (taken[j] || beamspace.column_norms[j] <= 0.0)
                continue;
            double score = std::abs(corr[j]) / beamspace.column_norms[j];
            if (score > best_score)
            {
                best_score = score;
                best = j;
            }
        }
        if (best == J)
            throw std::runtime_error("omp: no selectable atom remains");
        taken[best] = true;
        support.push_back(best);

        arma::cx_mat sub(T, support.size());
        for (std::size_t i = 0; i < support.size(); ++i)
            sub.col(i) = beamspace.psi.col(support[i]);
        if (!arma::solve(coeffs, sub, y))
            throw std::runtime_error("omp: least-squares re-fit failed");
        residual = y - sub * coeffs;
        est.residual_norms.push_back(arma::norm(residual));
    }

    est.components.reserve(support.size());
    for (std::size_t i = 0; i < support.size(); ++i)
        est.components.push_back({dict.grid[support[i]], coeffs[i], support[i]});
    return est;
}

SparseEstimate omp(const ObservationBlock &ob, const Dictionary &dict, int sparsity)
{
    BeamspaceCache cache = make_beamspace(ob.codebook, dict);
    return omp(ob.observations, cache, dict, sparsity);
}

AoaEstimate estimate_los(const ObservationBlock &ob, const BeamspaceCache &beamspace,
                         const Dictionary &dict, int sparsity, const RisDescriptor &ris,
                         std::complex<double> pilot, double noise_w)
{
    if (!(std::abs(pilot) > 0.0))
        throw std::invalid_argument("estimate_los: pilot must be nonzero");
    SparseEstimate sparse = omp(ob.observations, beamspace, dict, sparsity);

    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < sparse.components.size(); ++i)
    {
        double mag = std::abs(sparse.components[i].gain);
        if (mag > best_mag)
        {
            best_mag = mag;
            best = i;
        }
    }
    const SparseComponent &comp = sparse.components[best];
    if (!(best_mag > 0.0))
        throw std::runtime_error("estimate_los: all recovered path gains are zero");

    ChannelParams params;
    params.amplitude = best_mag / std::abs(pilot);
    params.phase_offset = std::arg(comp.gain / pilot);
    params.azimuth = comp.aoa.azimuth;
    params.elevation = comp.aoa.elevation;

    AoaEstimate est;
    est.aoa = comp.aoa;
    // The Fisher bound needs a noise level; identity keeps noiseless runs
    // usable (callers may also override with their own weighting).
    est.covariance = noise_w > 0.0 ? aoa_covariance(params, ob.codebook, ris, pilot, noise_w)
                                   : arma::mat(2, 2, arma::fill::eye);
    est.ris_index = ob.ris_index;
    return est;
}

AoaEstimate estimate_los(const ObservationBlock &ob, const Dictionary &dict, int sparsity,
                         const RisDescriptor &ris, std::complex<double> pilot, double noise_w)
{
    BeamspaceCache cache = make_beamspace(ob.codebook, dict);
    return estimate_los(ob, cache, dict, sparsity, ris, pilot, noise_w);
}

} // namespace rislocate
