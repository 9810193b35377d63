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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "rislocate/experiments.hpp"

using namespace rislocate;

namespace
{

// Two orthogonal wall panels whose bearings to (5, 5, 2) land exactly on the
// default one-degree dictionary grid: both see azimuth 0 and elevation 90 deg.
ExperimentConfig twin_wall_config()
{
    ExperimentConfig cfg;
    cfg.user_position = {5.0, 5.0, 2.0};
    RisSpec a;
    a.position = {0.0, 5.0, 2.0};
    a.orientation = 0.0;
    a.rows = 4;
    a.cols = 4;
    RisSpec b;
    b.position = {5.0, 0.0, 2.0};
    b.orientation = pi / 2.0;
    b.rows = 4;
    b.cols = 4;
    cfg.ris = {a, b};
    cfg.threads = 1;
    return cfg;
}

bool records_equal(const TrialRecord &a, const TrialRecord &b)
{
    if (a.sweep_index != b.sweep_index || a.trial != b.trial || a.sweep_value != b.sweep_value)
        return false;
    auto same_vec = [](const Vec3 &u, const Vec3 &v) {
        return u.x == v.x && u.y == v.y && u.z == v.z;
    };
    if (!same_vec(a.p_true, b.p_true) || !same_vec(a.p_ls, b.p_ls) || !same_vec(a.p_ml, b.p_ml))
        return false;
    if (a.err_ls != b.err_ls || a.err_ml != b.err_ml || a.peb != b.peb)
        return false;
    if (a.angles.size() != b.angles.size())
        return false;
    for (std::size_t m = 0; m < a.angles.size(); ++m)
    {
        if (a.angles[m].azimuth_est != b.angles[m].azimuth_est ||
            a.angles[m].elevation_est != b.angles[m].elevation_est ||
            a.angles[m].azimuth_true != b.angles[m].azimuth_true ||
            a.angles[m].elevation_true != b.angles[m].elevation_true)
            return false;
    }
    return true;
}

std::string read_file(const std::string &path)
{
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

std::string temp_path(const char *name)
{
    return std::string("rislocate_test_") + name;
}

} // namespace

TEST_CASE("noise-free on-grid sweep localizes exactly")
{
    ExperimentConfig cfg = twin_wall_config();
    cfg.scenario.noise_w = 0.0;
    cfg.scenario.num_paths = 1;
    cfg.sweep.values = {10.0};
    cfg.sweep.trials = 2;
    REQUIRE(cfg.validate().empty());

    SweepResult res = run_sweep(cfg);
    REQUIRE(res.records.size() == 2);
    for (const TrialRecord &rec : res.records)
    {
        CHECK(rec.p_true.x == 5.0);
        CHECK(rec.p_true.y == 5.0);
        CHECK(rec.p_true.z == 2.0);
        // Exact on-grid bearings intersect at the true point.
        CHECK(rec.err_ls < 1e-9);
        CHECK(rec.err_ml < 1e-9);
        // Zero noise makes the Fisher bound degenerate; it is reported as 0.
        CHECK(rec.peb == 0.0);
        REQUIRE(rec.angles.size() == 2);
        for (const TrialAngles &ang : rec.angles)
        {
            CHECK(ang.azimuth_true == Catch::Approx(0.0).margin(1e-12));
            CHECK(ang.elevation_true == Catch::Approx(pi / 2.0).margin(1e-12));
            CHECK(ang.azimuth_est == Catch::Approx(ang.azimuth_true).margin(1e-9));
            CHECK(ang.elevation_est == Catch::Approx(ang.elevation_true).margin(1e-9));
        }
    }
    REQUIRE(res.summary.size() == 1);
    CHECK(res.summary[0].trials == 2);
    CHECK(res.summary[0].rmse_ls < 1e-9);
    CHECK(res.summary[0].rmse_ml < 1e-9);
}

TEST_CASE("sweep records are laid out point-major")
{
    ExperimentConfig cfg = twin_wall_config();
    cfg.sweep.values = {0.0, 10.0};
    cfg.sweep.trials = 3;
    // Coarser dictionary keeps this quick; angles stay on the grid.
    cfg.estimator.azimuth_step = 3.0 * pi / 180.0;
    cfg.estimator.elevation_step = 3.0 * pi / 180.0;

    SweepResult res = run_sweep(cfg);
    REQUIRE(res.records.size() == 6);
    for (int i = 0; i < 2; ++i)
        for (int t = 0; t < 3; ++t)
        {
            const TrialRecord &rec = res.records[static_cast<std::size_t>(i * 3 + t)];
            CHECK(rec.sweep_index == i);
            CHECK(rec.trial == t);
            CHECK(rec.sweep_value == cfg.sweep.values[static_cast<std::size_t>(i)]);
            CHECK(std::isfinite(rec.err_ls));
            CHECK(std::isfinite(rec.err_ml));
            CHECK(rec.peb > 0.0);
        }
    // More transmit power tightens the bound.
    CHECK(res.records[3].peb < res.records[0].peb);

    const std::string path = temp_path("sweep.csv");
    write_sweep_csv(res, path);
    std::string text = read_file(path);
    CHECK(text.rfind("sweep_value,trial,x_true,y_true,z_true,x_ls,y_ls,z_ls,"
                     "x_ml,y_ml,z_ml,err_ls_m,err_ml_m,peb_m\n",
                     0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
    // Each data row carries 14 comma-separated fields.
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 13);
    std::remove(path.c_str());

    std::string summary = sweep_summary_text(res);
    CHECK(summary.find("rmse_ls_m") != std::string::npos);
    CHECK(summary.find("rmse_ml_m") != std::string::npos);
}

TEST_CASE("sweeps are deterministic and thread-count independent")
{
    ExperimentConfig cfg = twin_wall_config();
    cfg.sweep.values = {5.0, 10.0};
    cfg.sweep.trials = 4;
    cfg.estimator.azimuth_step = 3.0 * pi / 180.0;
    cfg.estimator.elevation_step = 3.0 * pi / 180.0;

    cfg.threads = 1;
    SweepResult first = run_sweep(cfg);
    SweepResult again = run_sweep(cfg);
    cfg.threads = 4;
    SweepResult pooled = run_sweep(cfg);

    REQUIRE(first.records.size() == again.records.size());
    REQUIRE(first.records.size() == pooled.records.size());
    for (std::size_t i = 0; i < first.records.size(); ++i)
    {
        CHECK(records_equal(first.records[i], again.records[i]));
        CHECK(records_equal(first.records[i], pooled.records[i]));
    }

    const std::string p1 = temp_path("serial.csv");
    const std::string p4 = temp_path("pooled.csv");
    write_sweep_csv(first, p1);
    write_sweep_csv(pooled, p4);
    CHECK(read_file(p1) == read_file(p4));
    std::remove(p1.c_str());
    std::remove(p4.c_str());
}

TEST_CASE("position sweeps take values from the position list")
{
    ExperimentConfig cfg = twin_wall_config();
    cfg.sweep.axis = SweepAxis::positions_grid;
    cfg.sweep.positions = {{3.0, 3.0, 1.0}, {7.0, 6.0, 3.0}};
    cfg.sweep.values.clear();
    cfg.sweep.trials = 2;
    cfg.estimator.azimuth_step = 3.0 * pi / 180.0;
    cfg.estimator.elevation_step = 3.0 * pi / 180.0;
    REQUIRE(cfg.validate().empty());

    SweepResult res = run_sweep(cfg);
    REQUIRE(res.records.size() == 4);
    for (int i = 0; i < 2; ++i)
    {
        const TrialRecord &rec = res.records[static_cast<std::size_t>(i * 2)];
        CHECK(rec.sweep_value == static_cast<double>(i));
        CHECK(rec.p_true.x == cfg.sweep.positions[static_cast<std::size_t>(i)].x);
        CHECK(rec.p_true.y == cfg.sweep.positions[static_cast<std::size_t>(i)].y);
        CHECK(rec.p_true.z == cfg.sweep.positions[static_cast<std::size_t>(i)].z);
    }
}

TEST_CASE("isotropic covariance weighting runs end to end")
{
    ExperimentConfig cfg = twin_wall_config();
    cfg.estimator.covariance = CovarianceModel::isotropic;
    cfg.estimator.isotropic_sigma = pi / 180.0;
    cfg.sweep.trials = 2;
    cfg.estimator.azimuth_step = 3.0 * pi / 180.0;
    cfg.estimator.elevation_step = 3.0 * pi / 180.0;

    SweepResult res = run_sweep(cfg);
    REQUIRE(res.records.size() == 2);
    for (const TrialRecord &rec : res.records)
    {
        CHECK(std::isfinite(rec.err_ml));
        CHECK(rec.err_ml < 5.0);
    }
}

TEST_CASE("invalid configurations are rejected up front")
{
    ExperimentConfig cfg = twin_wall_config();
    cfg.ris.resize(1);
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
    try
    {
        run_sweep(cfg);
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()).find("at least two") != std::string::npos);
    }
}

TEST_CASE("bound maps cover the room grid")
{
    ExperimentConfig cfg = preset("fig2-diff-walls");

    SECTION("a giant step leaves a single corner sample")
    {
        PebMap map = compute_peb_map(cfg, 5.0, 20.0);
        REQUIRE(map.points.size() == 1);
        CHECK(map.points[0].position.x == 0.0);
        CHECK(map.points[0].position.y == 0.0);
        CHECK(map.points[0].position.z == 5.0);
        CHECK(map.points[0].peb > 0.0);
        CHECK(map.quantile(0.0) == map.points[0].peb);
        CHECK(map.quantile(1.0) == map.points[0].peb);
    }

    SECTION("a five metre step samples a three by three lattice")
    {
        // Of the nine lattice nodes, (0, 5, 5) sits straight below the panel
        // at (0, 5, 7) and (5, 0, 5) straight above the one at (5, 0, 1);
        // both bearings are degenerate there, so those nodes are dropped.
        PebMap map = compute_peb_map(cfg, 5.0, 5.0);
        REQUIRE(map.points.size() == 7);
        for (const PebMapPoint &p : map.points)
        {
            CHECK(std::fmod(p.position.x, 5.0) == 0.0);
            CHECK(std::fmod(p.position.y, 5.0) == 0.0);
            CHECK(p.position.z == 5.0);
            CHECK(p.peb > 0.0);
            CHECK_FALSE((p.position.x == 0.0 && p.position.y == 5.0));
            CHECK_FALSE((p.position.x == 5.0 && p.position.y == 0.0));
        }
        std::vector<double> vals = map.sorted_values();
        REQUIRE(vals.size() == 7);
        for (std::size_t i = 1; i < vals.size(); ++i)
            CHECK(vals[i] >= vals[i - 1]);
        CHECK(map.quantile(0.0) == vals.front());
        CHECK(map.quantile(1.0) == vals.back());
        // Nearest-rank: ceil(0.5 * 7) = 4th smallest.
        CHECK(map.quantile(0.5) == vals[3]);

        const std::string path = temp_path("map.csv");
        write_peb_map_csv(map, path);
        std::string text = read_file(path);
        CHECK(text.rfind("x,y,z,peb_m\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 8);
        std::remove(path.c_str());

        std::string summary = peb_map_summary_text(map);
        CHECK(summary.find("points: 7") != std::string::npos);
        CHECK(summary.find("p90") != std::string::npos);
    }

    SECTION("samples on top of a panel are dropped")
    {
        // One panel sits at (0, 5, 7): the grid node there is inside the
        // exclusion radius. The node at (5, 0, 7) is straight above the
        // panel at (5, 0, 1) and is dropped as a degenerate bearing.
        PebMap map = compute_peb_map(cfg, 7.0, 5.0);
        CHECK(map.points.size() == 7);
        for (const PebMapPoint &p : map.points)
            CHECK_FALSE((p.position.x == 0.0 && p.position.y == 5.0));
    }

    SECTION("bad requests are refused")
    {
        CHECK_THROWS_AS(compute_peb_map(cfg, 5.0, 0.0), ConfigError);
        CHECK_THROWS_AS(compute_peb_map(cfg, -1.0, 1.0), ConfigError);
        CHECK_THROWS_AS(compute_peb_map(cfg, 11.0, 1.0), ConfigError);
        ExperimentConfig quiet = cfg;
        quiet.scenario.noise_w = 0.0;
        CHECK_THROWS_AS(compute_peb_map(quiet, 5.0, 1.0), ConfigError);
        ExperimentConfig broken = cfg;
        broken.ris.clear();
        CHECK_THROWS_AS(compute_peb_map(broken, 5.0, 1.0), ConfigError);
    }

    SECTION("quantile guards its arguments")
    {
        PebMap empty;
        CHECK_THROWS_AS(empty.quantile(0.5), std::runtime_error);
        PebMap map = compute_peb_map(cfg, 5.0, 20.0);
        CHECK_THROWS_AS(map.quantile(-0.1), std::invalid_argument);
        CHECK_THROWS_AS(map.quantile(1.1), std::invalid_argument);
    }
}

TEST_CASE("panels spread over several walls tighten the bound map")
{
    ExperimentConfig same = preset("fig2-same-wall");
    ExperimentConfig diff = preset("fig2-diff-walls");

    PebMap map_same = compute_peb_map(same, 5.0, 1.0);
    PebMap map_diff = compute_peb_map(diff, 5.0, 1.0);
    REQUIRE(map_same.points.size() > 100);
    REQUIRE(map_diff.points.size() > 100);

    // Bearing lines from one wall run nearly parallel across the room, so
    // the spread-out placement wins decisively at the upper quantiles.
    CHECK(map_diff.quantile(0.9) < map_same.quantile(0.9));
    CHECK(map_diff.quantile(0.5) < map_same.quantile(0.5));
}
