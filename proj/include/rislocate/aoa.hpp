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

#include "rislocate/channel.hpp"
#include "rislocate/codebook.hpp"
#include "rislocate/geometry.hpp"

namespace rislocate
{

// A grid of candidate arrival angles and their steering vectors (one column
// per grid point, azimuth-major order).
struct Dictionary
{
    arma::cx_mat atoms; // L x J
    std::vector<AoaPair> grid;
    double azimuth_step = 0.0;
    double elevation_step = 0.0;

    int num_atoms() const { return static_cast<int>(atoms.n_cols); }
};

// Uniform grid over [az_min, az_max] x [el_min, el_max] with the requested
// steps (endpoints included; a degenerate range yields a single line/point).
Dictionary build_dictionary(const RisDescriptor &ris, double az_min, double az_max, double el_min,
                            double el_max, double az_step, double el_step);

// The beamspace dictionary Psi = U^H A for one codebook, with per-column
// norms cached for correlation normalization.
struct BeamspaceCache
{
    arma::cx_mat psi; // T x J
    arma::vec column_norms;
};

BeamspaceCache make_beamspace(const Codebook &cb, const Dictionary &dict);

struct SparseComponent
{
    AoaPair aoa;
    std::complex<double> gain;
    arma::uword grid_index = 0;
};

// Greedy sparse decomposition result. residual_norms[k] is the l2 residual
// after k selections (entry 0 is ||y||), non-increasing by construction.
struct SparseEstimate
{
    std::vector<SparseComponent> components;
    std::vector<double> residual_norms;
};

// Orthogonal matching pursuit in beamspace: repeatedly selects the atom
// maximizing |psi_j^H r| / ||psi_j|| (ties toward the lower grid index),
// then re-solves least squares on the selected support. Requires
// 1 <= sparsity <= T and a dictionary with at least 4*T atoms.
SparseEstimate omp(const arma::cx_vec &y, const BeamspaceCache &beamspace, const Dictionary &dict,
                   int sparsity);
SparseEstimate omp(const ObservationBlock &ob, const Dictionary &dict, int sparsity);

// One RIS's angle estimate with its error covariance bound, ordered
// (elevation, azimuth).
struct AoaEstimate
{
    AoaPair aoa;
    arma::mat covariance; // 2x2
    int ris_index = 0;
};

// Runs OMP with the given sparsity, keeps the strongest component (largest
// |gain|) as the direct path, and attaches the Fisher covariance bound
// evaluated at the estimated parameters.
AoaEstimate estimate_los(const ObservationBlock &ob, const BeamspaceCache &beamspace,
                         const Dictionary &dict, int sparsity, const RisDescriptor &ris,
                         std::complex<double> pilot, double noise_w);
AoaEstimate estimate_los(const ObservationBlock &ob, const Dictionary &dict, int sparsity,
                         const RisDescriptor &ris, std::complex<double> pilot, double noise_w);

} // namespace rislocate
