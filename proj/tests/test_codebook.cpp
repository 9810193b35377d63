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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <set>

#include "rislocate/codebook.hpp"
#include "rislocate/geometry.hpp"
#include "rislocate/rng.hpp"

using namespace rislocate;

namespace
{

RisDescriptor make_ris(int rows, int cols)
{
    RisDescriptor d;
    d.reference_position = {0.0, 5.0, 7.0};
    d.orientation = 0.0;
    d.rows = rows;
    d.cols = cols;
    d.wavelength = 0.009993081933333333;
    d.element_spacing = d.wavelength / 2.0;
    return d;
}

} // namespace

TEST_CASE("phase grid")
{
    std::vector<double> g1 = phase_grid(1);
    REQUIRE(g1.size() == 2);
    CHECK(g1[0] == 0.0);
    CHECK(g1[1] == Catch::Approx(pi));

    std::vector<double> g3 = phase_grid(3);
    REQUIRE(g3.size() == 8);
    for (std::size_t f = 0; f < 8; ++f)
        CHECK(g3[f] == Catch::Approx(two_pi * double(f) / 8.0));

    CHECK_THROWS_AS(phase_grid(0), std::invalid_argument);
    CHECK_THROWS_AS(phase_grid(31), std::invalid_argument);
}

TEST_CASE("dft codebook structure")
{
    const int L = 16;
    Codebook full = dft_codebook(L, L);
    CHECK(full.kind == CodebookKind::full_dft);
    CHECK(full.num_elements() == L);
    CHECK(full.num_profiles() == L);
    CHECK(full.quantization_bits == 0);

    // Entry (l, t) = exp(-j 2*pi l t / L) / sqrt(L); spot check L = 4.
    Codebook small = dft_codebook(4, 4);
    std::complex<double> e13 = small.profiles(1, 3);
    CHECK(e13.real() == Catch::Approx(0.0).margin(1e-12));
    CHECK(e13.imag() == Catch::Approx(0.5));

    // Columns are orthonormal.
    arma::cx_mat gram = full.profiles.t() * full.profiles;
    CHECK(arma::norm(gram - arma::cx_mat(L, L, arma::fill::eye), "fro") < 1e-12);

    // Every entry has magnitude 1 / sqrt(L).
    for (arma::uword i = 0; i < full.profiles.n_elem; ++i)
        CHECK(std::abs(full.profiles[i]) == Catch::Approx(1.0 / 4.0));

    Codebook part = dft_codebook(L, 5);
    CHECK(part.kind == CodebookKind::partial_dft);
    CHECK(part.num_profiles() == 5);
    arma::cx_mat gp = part.profiles.t() * part.profiles;
    CHECK(arma::norm(gp - arma::cx_mat(5, 5, arma::fill::eye), "fro") < 1e-12);

    CHECK_THROWS_AS(dft_codebook(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(dft_codebook(8, 0), std::invalid_argument);
    CHECK_THROWS_AS(dft_codebook(8, 9), std::invalid_argument);
}

TEST_CASE("dft column selection")
{
    const int L = 8;
    Codebook full = dft_codebook(L, L);
    std::vector<arma::uword> cols = {1, 4, 6};
    Codebook sub = dft_codebook(L, cols);
    CHECK(sub.kind == CodebookKind::partial_dft);
    REQUIRE(sub.num_profiles() == 3);
    for (std::size_t i = 0; i < cols.size(); ++i)
        CHECK(arma::norm(sub.profiles.col(i) - full.profiles.col(cols[i])) < 1e-15);

    CHECK_THROWS_AS(dft_codebook(L, std::vector<arma::uword>{}), std::invalid_argument);
    CHECK_THROWS_AS(dft_codebook(L, std::vector<arma::uword>{8}), std::invalid_argument);
}

TEST_CASE("random partial dft")
{
    const int L = 32;
    const int T = 10;
    Rng rng(99);
    Codebook cb = random_partial_dft(L, T, rng);
    CHECK(cb.kind == CodebookKind::partial_dft);
    REQUIRE(cb.num_profiles() == T);

    // Every chosen column is an exact DFT column and no column repeats;
    // membership is recovered by matching against the full book.
    Codebook full = dft_codebook(L, L);
    std::set<arma::uword> seen;
    arma::uword last = 0;
    bool first = true;
    for (int t = 0; t < T; ++t)
    {
        arma::uword match = L;
        for (arma::uword c = 0; c < static_cast<arma::uword>(L); ++c)
            if (arma::norm(cb.profiles.col(t) - full.profiles.col(c)) < 1e-12)
            {
                match = c;
                break;
            }
        REQUIRE(match < static_cast<arma::uword>(L));
        CHECK(seen.insert(match).second);
        if (!first)
            CHECK(match > last);
        last = match;
        first = false;
    }

    // Same seed reproduces the same draw; T = L covers every column.
    Rng again(99);
    Codebook cb2 = random_partial_dft(L, T, again);
    CHECK(arma::norm(cb.profiles - cb2.profiles, "fro") == 0.0);

    Rng r3(5);
    Codebook all = random_partial_dft(8, 8, r3);
    CHECK(arma::norm(all.profiles - dft_codebook(8, 8).profiles, "fro") < 1e-15);

    Rng r4(6);
    CHECK_THROWS_AS(random_partial_dft(8, 9, r4), std::invalid_argument);
}

TEST_CASE("phase quantization")
{
    // An entry just past the top grid point rounds circularly to phase 0.
    Codebook one;
    one.profiles.set_size(1, 1);
    one.profiles(0, 0) = std::polar(1.0, 15.0 * pi / 8.0 + 0.01);
    Codebook q3 = quantize(one, 3);
    CHECK(q3.kind == CodebookKind::custom);
    CHECK(q3.quantization_bits == 3);
    CHECK(q3.profiles(0, 0).real() == Catch::Approx(1.0));
    CHECK(q3.profiles(0, 0).imag() == Catch::Approx(0.0).margin(1e-12));

    // Exact midpoint between two grid phases keeps the smaller grid index.
    Codebook mid;
    mid.profiles.set_size(1, 1);
    mid.profiles(0, 0) = std::complex<double>(1.0, 1.0) / std::sqrt(2.0);
    Codebook q2 = quantize(mid, 2);
    CHECK(q2.profiles(0, 0).real() == Catch::Approx(1.0));
    CHECK(q2.profiles(0, 0).imag() == Catch::Approx(0.0).margin(1e-12));

    // Quantizing a DFT book preserves magnitudes and lands every phase on
    // the grid within half a step of the original.
    const int L = 16;
    const int bits = 3;
    Codebook cb = dft_codebook(L, L);
    Codebook q = quantize(cb, bits);
    REQUIRE(q.profiles.n_rows == cb.profiles.n_rows);
    REQUIRE(q.profiles.n_cols == cb.profiles.n_cols);
    std::vector<double> grid = phase_grid(bits);
    double half_step = pi / double(1 << bits);
    for (arma::uword i = 0; i < q.profiles.n_elem; ++i)
    {
        CHECK(std::abs(q.profiles[i]) == Catch::Approx(std::abs(cb.profiles[i])));
        double ph = wrap_two_pi(std::arg(q.profiles[i]));
        double nearest = two_pi;
        for (double g : grid)
            nearest = std::min(nearest, std::abs(wrap_pi(ph - g)));
        CHECK(nearest < 1e-12);
        double err = std::abs(wrap_pi(std::arg(q.profiles[i]) - std::arg(cb.profiles[i])));
        CHECK(err <= half_step + 1e-12);
    }

    // Brute-force circular nearest-phase oracle on random entries.
    Rng rng(2024);
    Codebook rnd;
    rnd.profiles.set_size(6, 5);
    for (arma::uword i = 0; i < rnd.profiles.n_elem; ++i)
        rnd.profiles[i] = std::polar(0.25, rng.uniform(-pi, pi));
    for (int b : {1, 2, 4})
    {
        Codebook qq = quantize(rnd, b);
        std::vector<double> g = phase_grid(b);
        for (arma::uword i = 0; i < rnd.profiles.n_elem; ++i)
        {
            double ph = std::arg(rnd.profiles[i]);
            double best = 0.0;
            double best_dist = 1e300;
            for (double cand : g)
            {
                double dist = std::abs(std::remainder(ph - cand, two_pi));
                if (dist < best_dist)
                {
                    best_dist = dist;
                    best = cand;
                }
            }
            CHECK(std::abs(qq.profiles[i] - std::polar(0.25, best)) < 1e-12);
        }
    }
}

TEST_CASE("directive column selection")
{
    RisDescriptor ris = make_ris(4, 4);
    const int L = ris.num_elements();
    const int T = 6;
    AoaPair pointing(0.3, 1.9);

    // Zero uncertainty makes the draw deterministic; the selection order
    // must match the alignment scores computed from scratch.
    Rng rng(1);
    std::vector<arma::uword> order = directive_column_order(ris, T, pointing, 0.0, rng);
    REQUIRE(order.size() == static_cast<std::size_t>(T));

    Codebook full = dft_codebook(L, L);
    arma::cx_vec a = steering_vector(element_positions(ris), pointing, ris.wavelength);
    arma::vec score(L);
    for (int t = 0; t < L; ++t)
        score(t) = std::abs(arma::cdot(full.profiles.col(t), a));

    std::set<arma::uword> seen;
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        CHECK(order[i] < static_cast<arma::uword>(L));
        CHECK(seen.insert(order[i]).second);
        if (i > 0)
            CHECK(score(order[i]) <= score(order[i - 1]) + 1e-12);
    }
    // The first pick is the global argmax.
    CHECK(score(order[0]) == Catch::Approx(score.max()));
    // Every skipped column scores no better than the last kept one.
    double kept_min = score(order[static_cast<std::size_t>(T - 1)]);
    for (int t = 0; t < L; ++t)
        if (!seen.count(static_cast<arma::uword>(t)))
            CHECK(score(t) <= kept_min + 1e-12);

    // directive_subset materializes exactly those columns in that order.
    Rng rng2(1);
    Codebook sub = directive_subset(ris, T, pointing, 0.0, rng2);
    CHECK(sub.kind == CodebookKind::directive);
    REQUIRE(sub.num_profiles() == T);
    for (std::size_t i = 0; i < order.size(); ++i)
        CHECK(arma::norm(sub.profiles.col(i) - full.profiles.col(order[i])) < 1e-15);

    // With uncertainty, equal seeds agree and the two angle draws consume
    // exactly two stream values.
    Rng ra(7), rb(7);
    std::vector<arma::uword> oa = directive_column_order(ris, T, pointing, 0.5, ra);
    std::vector<arma::uword> ob = directive_column_order(ris, T, pointing, 0.5, rb);
    CHECK(oa == ob);
    Rng fresh(7);
    fresh.uniform();
    fresh.uniform();
    CHECK(ra.next_u64() == fresh.next_u64());

    Rng rc(8);
    CHECK_THROWS_AS(directive_column_order(ris, 0, pointing, 0.0, rc), std::invalid_argument);
    CHECK_THROWS_AS(directive_column_order(ris, L + 1, pointing, 0.0, rc), std::invalid_argument);
    CHECK_THROWS_AS(directive_column_order(ris, 4, pointing, -0.1, rc), std::invalid_argument);
}

TEST_CASE("codebook csv round trip")
{
    Rng rng(31);
    Codebook cb;
    cb.profiles.set_size(8, 3);
    double scale = 1.0 / std::sqrt(8.0);
    for (arma::uword i = 0; i < cb.profiles.n_elem; ++i)
        cb.profiles[i] = std::polar(scale, rng.uniform(-pi, pi));

    std::string path = "codebook_roundtrip_test.csv";
    save_codebook_csv(cb, path);
    Codebook back = load_codebook_csv(path);
    CHECK(back.kind == CodebookKind::custom);
    REQUIRE(back.profiles.n_rows == cb.profiles.n_rows);
    REQUIRE(back.profiles.n_cols == cb.profiles.n_cols);
    CHECK(arma::norm(back.profiles - cb.profiles, "fro") < 1e-12);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_codebook_csv("no_such_codebook_file.csv"), std::runtime_error);

    // A truncated grid is rejected.
    std::string bad = "codebook_bad_test.csv";
    {
        std::FILE *f = std::fopen(bad.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs("column,row,phase\n0,0,0.5\n0,1,0.25\n1,0,0.125\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_codebook_csv(bad), std::runtime_error);
    std::remove(bad.c_str());
}
