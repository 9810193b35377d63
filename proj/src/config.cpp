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

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rislocate/experiments.hpp"

namespace rislocate
{

namespace
{

constexpr double deg = pi / 180.0;

std::string trim(const std::string &s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s)
    {
        if (c == sep)
        {
            out.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

// One parsed "key = value" with provenance for error messages.
struct Entry
{
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
    int ris_index = -1; // which [ris] block this entry belongs to
};

class Builder
{
  public:
    explicit Builder(const std::string &origin) : origin_(origin) {}

    void fail(int line, const std::string &msg)
    {
        errors_.push_back(origin_ + ":" + std::to_string(line) + ": " + msg);
    }

    bool parse_double(const Entry &e, double &out)
    {
        const char *s = e.value.c_str();
        char *end = nullptr;
        double v = std::strtod(s, &end);
        if (end == s || *end != '\0')
        {
            fail(e.line, e.key + ": expected a number, got '" + e.value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool parse_int(const Entry &e, int &out)
    {
        double v = 0.0;
        if (!parse_double(e, v))
            return false;
        if (v != std::floor(v) || std::abs(v) > 1e9)
        {
            fail(e.line, e.key + ": expected an integer, got '" + e.value + "'");
            return false;
        }
        out = static_cast<int>(v);
        return true;
    }

    bool parse_u64(const Entry &e, std::uint64_t &out)
    {
        const char *s = e.value.c_str();
        char *end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end == s || *end != '\0')
        {
            fail(e.line, e.key + ": expected an unsigned integer, got '" + e.value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool parse_bool(const Entry &e, bool &out)
    {
        std::string v = e.value;
        for (char &c : v)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (v == "true" || v == "yes" || v == "1")
            out = true;
        else if (v == "false" || v == "no" || v == "0")
            out = false;
        else
        {
            fail(e.line, e.key + ": expected true/false, got '" + e.value + "'");
            return false;
        }
        return true;
    }

    bool parse_vec3(const Entry &e, Vec3 &out)
    {
        std::istringstream ss(e.value);
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;
        if (!(ss >> x >> y >> z) || !(ss >> std::ws).eof())
        {
            fail(e.line, e.key + ": expected three numbers, got '" + e.value + "'");
            return false;
        }
        out = {x, y, z};
        return true;
    }

    bool parse_double_list(const Entry &e, std::vector<double> &out)
    {
        std::istringstream ss(e.value);
        std::vector<double> vals;
        double v = 0.0;
        while (ss >> v)
            vals.push_back(v);
        if (!ss.eof() || vals.empty())
        {
            fail(e.line, e.key + ": expected a list of numbers, got '" + e.value + "'");
            return false;
        }
        out = std::move(vals);
        return true;
    }

    bool parse_vec3_list(const Entry &e, std::vector<Vec3> &out)
    {
        std::vector<Vec3> vals;
        for (const std::string &part : split(e.value, ';'))
        {
            std::string p = trim(part);
            if (p.empty())
                continue;
            Entry sub = e;
            sub.value = p;
            Vec3 v;
            if (!parse_vec3(sub, v))
                return false;
            vals.push_back(v);
        }
        if (vals.empty())
        {
            fail(e.line, e.key + ": expected 'x y z; x y z; ...', got '" + e.value + "'");
            return false;
        }
        out = std::move(vals);
        return true;
    }

    void apply(const Entry &e, ExperimentConfig &cfg)
    {
        if (e.section == "scenario")
            apply_scenario(e, cfg.scenario);
        else if (e.section == "user")
            apply_user(e, cfg);
        else if (e.section == "ris")
            apply_ris(e, cfg.ris[static_cast<std::size_t>(e.ris_index)]);
        else if (e.section == "estimator")
            apply_estimator(e, cfg.estimator);
        else if (e.section == "sweep")
            apply_sweep(e, cfg.sweep);
        else if (e.section == "output")
            apply_output(e, cfg);
        else
            fail(e.line, "unknown section [" + e.section + "]");
    }

    void finish()
    {
        if (errors_.empty())
            return;
        std::string joined;
        for (std::size_t i = 0; i < errors_.size(); ++i)
        {
            if (i)
                joined += '\n';
            joined += errors_[i];
        }
        throw ConfigError(joined);
    }

  private:
    void unknown(const Entry &e)
    {
        fail(e.line, "unknown key '" + e.key + "' in [" + e.section + "]");
    }

    void apply_scenario(const Entry &e, ScenarioConfig &s)
    {
        double d = 0.0;
        if (e.key == "room_m")
            parse_vec3(e, s.room);
        else if (e.key == "carrier_hz")
            parse_double(e, s.carrier_hz);
        else if (e.key == "tx_power_dbm")
        {
            if (parse_double(e, d))
                s.tx_power_w = dbm_to_watt(d);
        }
        else if (e.key == "noise_dbm")
        {
            if (parse_double(e, d))
                s.noise_w = dbm_to_watt(d);
        }
        else if (e.key == "num_paths")
            parse_int(e, s.num_paths);
        else if (e.key == "nlos_ratio_db")
            parse_double(e, s.nlos_power_ratio_db);
        else if (e.key == "field_model")
        {
            if (e.value == "far")
                s.field_model = FieldModel::far;
            else if (e.value == "near")
                s.field_model = FieldModel::near;
            else
                fail(e.line, "field_model: expected far or near, got '" + e.value + "'");
        }
        else if (e.key == "common_path_phase")
            parse_bool(e, s.common_path_phase);
        else if (e.key == "seed")
            parse_u64(e, s.seed);
        else
            unknown(e);
    }

    void apply_user(const Entry &e, ExperimentConfig &cfg)
    {
        if (e.key == "position_m")
            parse_vec3(e, cfg.user_position);
        else
            unknown(e);
    }

    void apply_ris(const Entry &e, RisSpec &r)
    {
        double d = 0.0;
        if (e.key == "position_m")
            parse_vec3(e, r.position);
        else if (e.key == "orientation_deg")
        {
            if (parse_double(e, d))
                r.orientation = d * deg;
        }
        else if (e.key == "rows")
            parse_int(e, r.rows);
        else if (e.key == "cols")
            parse_int(e, r.cols);
        else if (e.key == "spacing_m")
            parse_double(e, r.spacing_m);
        else if (e.key == "codebook")
        {
            if (e.value == "dft")
                r.codebook = CodebookChoice::dft;
            else if (e.value == "random_partial_dft")
                r.codebook = CodebookChoice::random_partial_dft;
            else if (e.value == "directive")
                r.codebook = CodebookChoice::directive;
            else
                fail(e.line,
                     "codebook: expected dft, random_partial_dft or directive, got '" + e.value +
                         "'");
        }
        else if (e.key == "num_profiles")
            parse_int(e, r.num_profiles);
        else if (e.key == "bits")
            parse_int(e, r.quantization_bits);
        else if (e.key == "pointing_uncertainty_deg")
        {
            if (parse_double(e, d))
                r.pointing_uncertainty = d * deg;
        }
        else
            unknown(e);
    }

    void apply_estimator(const Entry &e, EstimatorSettings &est)
    {
        double d = 0.0;
        if (e.key == "azimuth_min_deg")
        {
            if (parse_double(e, d))
                est.azimuth_min = d * deg;
        }
        else if (e.key == "azimuth_max_deg")
        {
            if (parse_double(e, d))
                est.azimuth_max = d * deg;
        }
        else if (e.key == "elevation_min_deg")
        {
            if (parse_double(e, d))
                est.elevation_min = d * deg;
        }
        else if (e.key == "elevation_max_deg")
        {
            if (parse_double(e, d))
                est.elevation_max = d * deg;
        }
        else if (e.key == "azimuth_step_deg")
        {
            if (parse_double(e, d))
                est.azimuth_step = d * deg;
        }
        else if (e.key == "elevation_step_deg")
        {
            if (parse_double(e, d))
                est.elevation_step = d * deg;
        }
        else if (e.key == "sparsity")
            parse_int(e, est.sparsity);
        else if (e.key == "ml_max_iters")
            parse_int(e, est.ml_max_iters);
        else if (e.key == "ml_tol_m")
            parse_double(e, est.ml_tol);
        else if (e.key == "covariance")
        {
            if (e.value == "fim")
                est.covariance = CovarianceModel::fim;
            else if (e.value == "isotropic")
                est.covariance = CovarianceModel::isotropic;
            else
                fail(e.line, "covariance: expected fim or isotropic, got '" + e.value + "'");
        }
        else if (e.key == "isotropic_sigma_deg")
        {
            if (parse_double(e, d))
                est.isotropic_sigma = d * deg;
        }
        else
            unknown(e);
    }

    void apply_sweep(const Entry &e, SweepSpec &s)
    {
        if (e.key == "axis")
        {
            if (e.value == "power_dbm")
                s.axis = SweepAxis::power_dbm;
            else if (e.value == "elements_l")
                s.axis = SweepAxis::elements_l;
            else if (e.value == "positions_grid")
                s.axis = SweepAxis::positions_grid;
            else
                fail(e.line,
                     "axis: expected power_dbm, elements_l or positions_grid, got '" + e.value +
                         "'");
        }
        else if (e.key == "values")
            parse_double_list(e, s.values);
        else if (e.key == "positions_m")
            parse_vec3_list(e, s.positions);
        else if (e.key == "trials")
            parse_int(e, s.trials);
        else
            unknown(e);
    }

    void apply_output(const Entry &e, ExperimentConfig &cfg)
    {
        if (e.key == "path")
            cfg.output_path = e.value;
        else if (e.key == "threads")
            parse_int(e, cfg.threads);
        else
            unknown(e);
    }

    std::string origin_;
    std::vector<std::string> errors_;
};

bool inside_box(const Vec3 &p, const Vec3 &box)
{
    return p.x >= 0.0 && p.x <= box.x && p.y >= 0.0 && p.y <= box.y && p.z >= 0.0 && p.z <= box.z;
}

} // namespace

ExperimentConfig parse_config_text(const std::string &text, const std::string &origin)
{
    ExperimentConfig cfg;
    Builder builder(origin);

    std::istringstream ss(text);
    std::string raw;
    std::string section;
    int ris_index = -1;
    int line_no = 0;
    while (std::getline(ss, raw))
    {
        ++line_no;
        std::string line = raw;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;

        if (line.front() == '[')
        {
            if (line.back() != ']')
            {
                builder.fail(line_no, "unterminated section header '" + line + "'");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section == "ris")
            {
                cfg.ris.emplace_back();
                ++ris_index;
            }
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
        {
            builder.fail(line_no, "expected 'key = value', got '" + line + "'");
            continue;
        }
        if (section.empty())
        {
            builder.fail(line_no, "key outside any [section]");
            continue;
        }

        Entry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = line_no;
        e.ris_index = ris_index;
        if (e.key.empty())
        {
            builder.fail(line_no, "empty key before '='");
            continue;
        }
        builder.apply(e, cfg);
    }
    builder.finish();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::vector<std::string> ExperimentConfig::validate() const
{
    std::vector<std::string> errs;
    auto need = [&errs](bool ok, const std::string &msg) {
        if (!ok)
            errs.push_back(msg);
    };

    need(scenario.room.x > 0.0 && scenario.room.y > 0.0 && scenario.room.z > 0.0,
         "scenario.room_m: extents must be positive");
    need(scenario.carrier_hz > 0.0, "scenario.carrier_hz: must be positive");
    need(scenario.tx_power_w > 0.0, "scenario.tx_power_dbm: must be finite");
    need(scenario.noise_w >= 0.0, "scenario.noise_dbm: must be finite");
    need(scenario.num_paths >= 1, "scenario.num_paths: must be >= 1");
    need(scenario.nlos_power_ratio_db >= 0.0, "scenario.nlos_ratio_db: must be >= 0");
    need(inside_box(user_position, scenario.room), "user.position_m: must lie inside the room");

    need(ris.size() >= 2, "ris: at least two [ris] sections are required");
    for (std::size_t m = 0; m < ris.size(); ++m)
    {
        const RisSpec &r = ris[m];
        std::string tag = "ris[" + std::to_string(m) + "].";
        need(r.rows >= 1 && r.cols >= 1, tag + "rows/cols: must be >= 1");
        need(r.spacing_m >= 0.0, tag + "spacing_m: must be >= 0");
        need(inside_box(r.position, scenario.room), tag + "position_m: must lie inside the room");
        int L = r.rows * r.cols;
        need(r.num_profiles >= 0 && r.num_profiles <= L,
             tag + "num_profiles: must be in [0, rows*cols]");
        need(r.quantization_bits >= 0 && r.quantization_bits <= 30,
             tag + "bits: must be in [0, 30]");
        need(r.pointing_uncertainty >= 0.0, tag + "pointing_uncertainty_deg: must be >= 0");
    }

    need(estimator.azimuth_max >= estimator.azimuth_min,
         "estimator.azimuth_max_deg: must be >= azimuth_min_deg");
    need(estimator.elevation_max >= estimator.elevation_min,
         "estimator.elevation_max_deg: must be >= elevation_min_deg");
    need(estimator.elevation_min >= 0.0 && estimator.elevation_max <= pi + 1e-12,
         "estimator.elevation range: must lie within [0, 180] degrees");
    need(estimator.azimuth_step > 0.0 && estimator.elevation_step > 0.0,
         "estimator steps: must be positive");
    need(estimator.sparsity >= 0, "estimator.sparsity: must be >= 0");
    need(estimator.ml_max_iters >= 0, "estimator.ml_max_iters: must be >= 0");
    need(estimator.ml_tol > 0.0, "estimator.ml_tol_m: must be positive");
    need(estimator.isotropic_sigma > 0.0, "estimator.isotropic_sigma_deg: must be positive");

    need(sweep.trials >= 1, "sweep.trials: must be >= 1");
    switch (sweep.axis)
    {
        case SweepAxis::power_dbm:
            need(!sweep.values.empty(), "sweep.values: must not be empty");
            break;
        case SweepAxis::elements_l:
            need(!sweep.values.empty(), "sweep.values: must not be empty");
            for (double v : sweep.values)
            {
                double root = std::sqrt(v);
                bool square = v >= 4.0 && std::floor(root) == root;
                need(square, "sweep.values: element counts must be perfect squares >= 4");
            }
            break;
        case SweepAxis::positions_grid:
            need(!sweep.positions.empty(),
                 "sweep.positions_m: required for axis = positions_grid");
            for (const Vec3 &p : sweep.positions)
                need(inside_box(p, scenario.room),
                     "sweep.positions_m: every position must lie inside the room");
            for (double v : sweep.values)
                need(v == std::floor(v) && v >= 0.0 &&
                         v < static_cast<double>(sweep.positions.size()),
                     "sweep.values: must index into positions_m");
            break;
    }

    need(threads >= 0, "output.threads: must be >= 0");
    need(!output_path.empty(), "output.path: must not be empty");
    return errs;
}

namespace
{

const char *const preset_fig3 = R"(# Element-count sweep, three panels on different walls.
[scenario]
room_m = 10 10 10
carrier_hz = 30e9
tx_power_dbm = 10
noise_dbm = -79
num_paths = 3
nlos_ratio_db = 20
field_model = far
seed = 1

[user]
position_m = 4 8 2

[ris]
position_m = 0 5 7
orientation_deg = 0
codebook = dft

[ris]
position_m = 5 0 1
orientation_deg = 90
codebook = dft

[ris]
position_m = 10 6 8
orientation_deg = 180
codebook = dft

[estimator]
azimuth_step_deg = 1
elevation_step_deg = 1

[sweep]
axis = elements_l
values = 25 36 49 64 81 100
trials = 300

[output]
path = fig3_sweep.csv
)";

const char *const preset_fig4 = R"(# Power sweep, four 8x8 panels with 3-bit DFT profiles.
[scenario]
room_m = 10 10 10
carrier_hz = 30e9
tx_power_dbm = 10
noise_dbm = -79
num_paths = 3
nlos_ratio_db = 20
field_model = far
seed = 1

[user]
position_m = 4 8 2

[ris]
position_m = 0 5 7
orientation_deg = 0
rows = 8
cols = 8
codebook = dft
bits = 3

[ris]
position_m = 5 0 1
orientation_deg = 90
rows = 8
cols = 8
codebook = dft
bits = 3

[ris]
position_m = 10 6 8
orientation_deg = 180
rows = 8
cols = 8
codebook = dft
bits = 3

[ris]
position_m = 4 10 6
orientation_deg = -90
rows = 8
cols = 8
codebook = dft
bits = 3

[estimator]
azimuth_step_deg = 1
elevation_step_deg = 1

[sweep]
axis = power_dbm
values = -15 -10 -5 0 5 10 15
trials = 500

[output]
path = fig4_sweep.csv
)";

const char *const preset_fig2_same_wall = R"(# Coverage-map geometry: three panels on one wall.
[scenario]
room_m = 10 10 10
carrier_hz = 30e9
tx_power_dbm = 10
noise_dbm = -79

[user]
position_m = 4 8 2

[ris]
position_m = 0 2 6
orientation_deg = 0
codebook = dft

[ris]
position_m = 0 5 6
orientation_deg = 0
codebook = dft

[ris]
position_m = 0 8 6
orientation_deg = 0
codebook = dft

[sweep]
axis = power_dbm
values = 10
trials = 1

[output]
path = fig2_same_wall.csv
)";

const char *const preset_fig2_diff_walls = R"(# Coverage-map geometry: three panels on different walls.
[scenario]
room_m = 10 10 10
carrier_hz = 30e9
tx_power_dbm = 10
noise_dbm = -79

[user]
position_m = 4 8 2

[ris]
position_m = 0 5 7
orientation_deg = 0
codebook = dft

[ris]
position_m = 5 0 1
orientation_deg = 90
codebook = dft

[ris]
position_m = 10 6 8
orientation_deg = 180
codebook = dft

[sweep]
axis = power_dbm
values = 10
trials = 1

[output]
path = fig2_diff_walls.csv
)";

} // namespace

ExperimentConfig preset(const std::string &name)
{
    if (name == "fig3")
        return parse_config_text(preset_fig3, "preset:fig3");
    if (name == "fig4")
        return parse_config_text(preset_fig4, "preset:fig4");
    if (name == "fig2-same-wall")
        return parse_config_text(preset_fig2_same_wall, "preset:fig2-same-wall");
    if (name == "fig2-diff-walls")
        return parse_config_text(preset_fig2_diff_walls, "preset:fig2-diff-walls");
    throw ConfigError("unknown preset '" + name + "' (available: fig3, fig4, fig2-same-wall, fig2-diff-walls)");
}

std::vector<std::string> preset_names()
{
    return {"fig3", "fig4", "fig2-same-wall", "fig2-diff-walls"};
}

} // namespace rislocate
