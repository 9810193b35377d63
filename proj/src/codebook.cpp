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

#include "rislocate/codebook.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rislocate
{

std::vector<double> phase_grid(int bits)
{
    if (bits < 1 || bits > 30)
        throw std::invalid_argument("phase_grid: bits must be in [1, 30]");
    int n = 1 << bits;
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f)
        grid[static_cast<std::size_t>(f)] = two_pi * f / n;
    return grid;
}

Codebook dft_codebook(int num_elements, int num_profiles)
{
    if (num_elements < 1)
        throw std::invalid_argument("dft_codebook: num_elements must be >= 1");
    if (num_profiles < 1 || num_profiles > num_elements)
        throw std::invalid_argument("dft_codebook: num_profiles must be in [1, num_elements]");
    Codebook cb;
    cb.profiles.set_size(num_elements, num_profiles);
    double scale = 1.0 / std::sqrt(double(num_elements));
    for (int t = 0; t < num_profiles; ++t)
        for (int l = 0; l < num_elements; ++l)
        {
            double ph = -two_pi * double(l) * double(t) / double(num_elements);
            cb.profiles(l, t) = std::complex<double>(std::cos(ph), std::sin(ph)) * scale;
        }
    cb.kind = (num_profiles == num_elements) ? CodebookKind::full_dft : CodebookKind::partial_dft;
    return cb;
}

Codebook dft_codebook(int num_elements, const std::vector<arma::uword> &columns)
{
    if (num_elements < 1)
        throw std::invalid_argument("dft_codebook: num_elements must be >= 1");
    if (columns.empty() || columns.size() > static_cast<std::size_t>(num_elements))
        throw std::invalid_argument("dft_codebook: need between 1 and num_elements columns");
    Codebook cb;
    cb.profiles.set_size(num_elements, columns.size());
    double scale = 1.0 / std::sqrt(double(num_elements));
    for (std::size_t i = 0; i < columns.size(); ++i)
    {
        if (columns[i] >= static_cast<arma::uword>(num_elements))
            throw std::invalid_argument("dft_codebook: column index out of range");
        for (int l = 0; l < num_elements; ++l)
        {
            double ph = -two_pi * double(l) * double(columns[i]) / double(num_elements);
            cb.profiles(l, i) = std::complex<double>(std::cos(ph), std::sin(ph)) * scale;
        }
    }
    cb.kind = CodebookKind::partial_dft;
    return cb;
}

Codebook random_partial_dft(int num_elements, int num_profiles, Rng &rng)
{
    if (num_profiles < 1 || num_profiles > num_elements)
        throw std::invalid_argument("random_partial_dft: num_profiles must be in [1, num_elements]");
    std::vector<arma::uword> pool(static_cast<std::size_t>(num_elements));
    for (int l = 0; l < num_elements; ++l)
        pool[static_cast<std::size_t>(l)] = static_cast<arma::uword>(l);
    // Partial Fisher-Yates: after i swaps the first i entries are a uniform
    // draw of i distinct indices.
    for (int i = 0; i < num_profiles; ++i)
    {
        auto j = static_cast<std::size_t>(
            i + static_cast<int>(rng.uniform() * double(num_elements - i)));
        if (j >= pool.size())
            j = pool.size() - 1;
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    std::vector<arma::uword> cols(pool.begin(), pool.begin() + num_profiles);
    std::sort(cols.begin(), cols.end());
    return dft_codebook(num_elements, cols);
}

Codebook quantize(const Codebook &cb, int bits)
{
    std::vector<double> grid = phase_grid(bits);
    Codebook out;
    out.profiles.set_size(cb.profiles.n_rows, cb.profiles.n_cols);
    out.kind = CodebookKind::custom;
    out.quantization_bits = bits;
    for (arma::uword i = 0; i < cb.profiles.n_elem; ++i)
    {
        std::complex<double> v = cb.profiles[i];
        double mag = std::abs(v);
        double ph = std::arg(v);
        double best = 0.0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (double g : grid)
        {
            double dist = std::abs(wrap_pi(ph - g));
            if (dist < best_dist)
            {
                best_dist = dist;
                best = g;
            }
        }
        out.profiles[i] = std::complex<double>(std::cos(best), std::sin(best)) * mag;
    }
    return out;
}

std::vector<arma::uword> directive_column_order(const RisDescriptor &ris, int num_profiles,
                                                const AoaPair &pointing, double uncertainty,
                                                Rng &rng)
{
    ris.validate();
    int L = ris.num_elements();
    if (num_profiles < 1 || num_profiles > L)
        throw std::invalid_argument("directive_subset: num_profiles must be in [1, num_elements]");
    if (uncertainty < 0.0)
        throw std::invalid_argument("directive_subset: uncertainty must be >= 0");

    double az = pointing.azimuth + rng.uniform(-uncertainty / 2.0, uncertainty / 2.0);
    double el = pointing.elevation + rng.uniform(-uncertainty / 2.0, uncertainty / 2.0);
    AoaPair center(az, el);

    arma::cx_vec a = steering_vector(element_positions(ris), center, ris.wavelength);
    Codebook full = dft_codebook(L, L);

    std::vector<std::pair<double, arma::uword>> scored(static_cast<std::size_t>(L));
    for (int t = 0; t < L; ++t)
        scored[static_cast<std::size_t>(t)] = {std::abs(arma::cdot(full.profiles.col(t), a)),
                                               static_cast<arma::uword>(t)};
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto &p, const auto &q) { return p.first > q.first; });

    std::vector<arma::uword> order(static_cast<std::size_t>(num_profiles));
    for (int t = 0; t < num_profiles; ++t)
        order[static_cast<std::size_t>(t)] = scored[static_cast<std::size_t>(t)].second;
    return order;
}

Codebook directive_subset(const RisDescriptor &ris, int num_profiles, const AoaPair &pointing,
                          double uncertainty, Rng &rng)
{
    std::vector<arma::uword> order =
        directive_column_order(ris, num_profiles, pointing, uncertainty, rng);
    int L = ris.num_elements();
    Codebook full = dft_codebook(L, L);

    Codebook cb;
    cb.profiles.set_size(L, num_profiles);
    for (std::size_t t = 0; t < order.size(); ++t)
        cb.profiles.col(t) = full.profiles.col(order[t]);
    cb.kind = CodebookKind::directive;
    return cb;
}

void save_codebook_csv(const Codebook &cb, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("save_codebook_csv: cannot open " + path);
    f << "column,row,phase\n";
    char buf[64];
    for (arma::uword t = 0; t < cb.profiles.n_cols; ++t)
        for (arma::uword l = 0; l < cb.profiles.n_rows; ++l)
        {
            std::snprintf(buf, sizeof(buf), "%.17g", std::arg(cb.profiles(l, t)));
            f << t << ',' << l << ',' << buf << '\n';
        }
    if (!f)
        throw std::runtime_error("save_codebook_csv: write failed for " + path);
}

Codebook load_codebook_csv(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("load_codebook_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("column,row,phase", 0) != 0)
        throw std::runtime_error("load_codebook_csv: bad header in " + path);

    std::vector<arma::uword> cols;
    std::vector<arma::uword> rows;
    std::vector<double> phases;
    arma::uword max_col = 0;
    arma::uword max_row = 0;
    std::size_t line_no = 1;
    while (std::getline(f, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string tok;
        unsigned long long t = 0;
        unsigned long long l = 0;
        double ph = 0.0;
        char comma = 0;
        ss >> t >> comma >> l >> comma >> ph;
        if (ss.fail())
            throw std::runtime_error("load_codebook_csv: parse error at line " +
                                     std::to_string(line_no) + " of " + path);
        cols.push_back(static_cast<arma::uword>(t));
        rows.push_back(static_cast<arma::uword>(l));
        phases.push_back(ph);
        max_col = std::max(max_col, static_cast<arma::uword>(t));
        max_row = std::max(max_row, static_cast<arma::uword>(l));
    }
    if (phases.empty())
        throw std::runtime_error("load_codebook_csv: no entries in " + path);

    arma::uword L = max_row + 1;
    arma::uword T = max_col + 1;
    if (phases.size() != static_cast<std::size_t>(L) * static_cast<std::size_t>(T))
        throw std::runtime_error("load_codebook_csv: incomplete grid in " + path);

    Codebook cb;
    cb.profiles.set_size(L, T);
    double scale = 1.0 / std::sqrt(double(L));
    for (std::size_t i = 0; i < phases.size(); ++i)
        cb.profiles(rows[i], cols[i]) =
            std::complex<double>(std::cos(phases[i]), std::sin(phases[i])) * scale;
    cb.kind = CodebookKind::custom;
    return cb;
}

} // namespace rislocate
