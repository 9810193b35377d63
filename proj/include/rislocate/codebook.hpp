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

#include <string>
#include <vector>

#include <armadillo>

#include "rislocate/geometry.hpp"
#include "rislocate/rng.hpp"

namespace rislocate
{

enum class CodebookKind
{
    full_dft,
    partial_dft,
    directive,
    custom
};

// A set of T phase profiles for an L-element RIS, one profile per column.
// Every entry has magnitude 1/sqrt(L).
struct Codebook
{
    arma::cx_mat profiles; // L x T
    CodebookKind kind = CodebookKind::custom;
    int quantization_bits = 0; // 0 means continuous phases

    int num_elements() const { return static_cast<int>(profiles.n_rows); }
    int num_profiles() const { return static_cast<int>(profiles.n_cols); }
};

// The b-bit phase alphabet {2*pi*f / 2^b : f = 0..2^b-1}.
std::vector<double> phase_grid(int bits);

// First num_profiles columns of the L-point DFT matrix, scaled by 1/sqrt(L):
// entry (l, t) = exp(-j 2*pi l t / L) / sqrt(L). Kind is full_dft when
// num_profiles == L, partial_dft otherwise. Requires 1 <= num_profiles <= L.
Codebook dft_codebook(int num_elements, int num_profiles);

// DFT codebook restricted to the given column indices (each in [0, L)).
Codebook dft_codebook(int num_elements, const std::vector<arma::uword> &columns);

// num_profiles distinct DFT columns drawn uniformly at random.
Codebook random_partial_dft(int num_elements, int num_profiles, Rng &rng);

// Rounds each entry's phase to the nearest b-bit grid point (circular
// distance, ties toward the smaller grid index); magnitudes are preserved.
// The result reports kind custom with quantization_bits = bits, since
// quantization does not preserve DFT orthogonality.
Codebook quantize(const Codebook &cb, int bits);

// The num_profiles DFT columns best aligned with a steering vector toward
// `pointing` after perturbing both angles by U(-uncertainty/2,
// +uncertainty/2) (azimuth drawn first). Columns are ordered by decreasing
// alignment score |u_t^H a(center)|, ties toward the smaller column index.
Codebook directive_subset(const RisDescriptor &ris, int num_profiles, const AoaPair &pointing,
                          double uncertainty, Rng &rng);

// The column indices directive_subset would select, in selection order.
// Lets callers reuse precomputed per-column products instead of rebuilding
// them for every draw.
std::vector<arma::uword> directive_column_order(const RisDescriptor &ris, int num_profiles,
                                                const AoaPair &pointing, double uncertainty,
                                                Rng &rng);

// CSV round-trip of the phases: header "column,row,phase", one row per
// entry. Loading rebuilds entries as exp(j*phase)/sqrt(L) with kind custom.
void save_codebook_csv(const Codebook &cb, const std::string &path);
Codebook load_codebook_csv(const std::string &path);

} // namespace rislocate
