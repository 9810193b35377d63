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

#include <stdexcept>
#include <string>
#include <vector>

#include "rislocate/channel.hpp"
#include "rislocate/geometry.hpp"

namespace rislocate
{

// Raised for malformed or semantically invalid configuration input.
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

enum class SweepAxis
{
    power_dbm,      // values are transmit powers in dBm
    elements_l,     // values are element counts (perfect squares)
    positions_grid  // values index into SweepSpec::positions
};

enum class CodebookChoice
{
    dft,                // first T DFT columns
    random_partial_dft, // T DFT columns drawn once per sweep point
    directive           // T best-aligned DFT columns, redrawn per trial
};

enum class CovarianceModel
{
    fim,      // angle covariance from the Fisher bound at the estimate
    isotropic // fixed sigma^2 * I
};

// One RIS entry of a configuration. Angles in radians, lengths in meters
// (the config file boundary uses degrees and converts on parse).
struct RisSpec
{
    Vec3 position;
    double orientation = 0.0;
    int rows = 8;
    int cols = 8;
    double spacing_m = 0.0; // 0 means half the carrier wavelength
    CodebookChoice codebook = CodebookChoice::dft;
    int num_profiles = 0;      // 0 means one profile per element
    int quantization_bits = 0; // 0 means continuous phases
    double pointing_uncertainty = 0.5235987755982988; // directive only, radians
};

struct EstimatorSettings
{
    double azimuth_min = -1.5707963267948966;
    double azimuth_max = 1.5707963267948966;
    double elevation_min = 0.0;
    double elevation_max = 3.141592653589793;
    double azimuth_step = 0.017453292519943295; // 1 degree
    double elevation_step = 0.017453292519943295;
    int sparsity = 0; // 0 means match the scenario path count
    int ml_max_iters = 100;
    double ml_tol = 1e-6;
    CovarianceModel covariance = CovarianceModel::fim;
    double isotropic_sigma = 0.017453292519943295; // radians
};

struct SweepSpec
{
    SweepAxis axis = SweepAxis::power_dbm;
    std::vector<double> values = {10.0};
    std::vector<Vec3> positions; // for positions_grid; values default to all indices
    int trials = 1;
};

struct ExperimentConfig
{
    ScenarioConfig scenario;
    Vec3 user_position = {4.0, 8.0, 2.0};
    std::vector<RisSpec> ris;
    EstimatorSettings estimator;
    SweepSpec sweep;
    std::string output_path = "sweep.csv";
    int threads = 0; // 0 means hardware concurrency

    // Semantic checks; returns one message per problem, empty when valid.
    std::vector<std::string> validate() const;
};

// Parses INI-style text with sections [scenario], [user], [ris] (repeated
// per panel), [estimator], [sweep], [output]. Throws ConfigError with
// line-numbered messages on syntax, type, or unknown-key problems.
ExperimentConfig parse_config_text(const std::string &text, const std::string &origin);
ExperimentConfig parse_config_file(const std::string &path);

// Built-in configurations; throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string &name);
std::vector<std::string> preset_names();

// Per-RIS angle bookkeeping of one trial, radians.
struct TrialAngles
{
    double azimuth_est = 0.0;
    double elevation_est = 0.0;
    double azimuth_true = 0.0;
    double elevation_true = 0.0;
};

struct TrialRecord
{
    int sweep_index = 0;
    double sweep_value = 0.0;
    int trial = 0;
    Vec3 p_true;
    Vec3 p_ls;
    Vec3 p_ml;
    std::vector<TrialAngles> angles; // one entry per RIS
    double err_ls = 0.0;
    double err_ml = 0.0;
    double peb = 0.0;
};

struct SweepPointSummary
{
    double sweep_value = 0.0;
    int trials = 0;
    double rmse_ls = 0.0;
    double rmse_ml = 0.0;
    double peb = 0.0;
};

struct SweepResult
{
    std::vector<TrialRecord> records; // sweep-major, trial-minor order
    std::vector<SweepPointSummary> summary;
};

// Runs the configured Monte-Carlo sweep. Every (sweep point, trial) pair
// draws from its own derived seed and writes to a fixed slot, so the result
// is identical for any thread count. Throws ConfigError when validate()
// reports problems.
SweepResult run_sweep(const ExperimentConfig &cfg);

// CSV with header sweep_value,trial,x_true,y_true,z_true,x_ls,y_ls,z_ls,
// x_ml,y_ml,z_ml,err_ls_m,err_ml_m,peb_m.
void write_sweep_csv(const SweepResult &result, const std::string &path);
std::string sweep_summary_text(const SweepResult &result);

struct PebMapPoint
{
    Vec3 position;
    double peb = 0.0;
};

// PEB sampled on a horizontal grid at z = z_plane. Grid points within 0.1 m
// of a RIS reference or with a degenerate information matrix are skipped.
struct PebMap
{
    double z_plane = 0.0;
    double step = 0.0;
    std::vector<PebMapPoint> points; // grid order

    // Ascending PEB values; entry i sits at empirical CDF level (i+1)/n.
    std::vector<double> sorted_values() const;

    // Nearest-rank quantile of the PEB values, q in [0, 1].
    double quantile(double q) const;
};

PebMap compute_peb_map(const ExperimentConfig &cfg, double z_plane, double step);

// CSV with header x,y,z,peb_m.
void write_peb_map_csv(const PebMap &map, const std::string &path);
std::string peb_map_summary_text(const PebMap &map);

} // namespace rislocate
