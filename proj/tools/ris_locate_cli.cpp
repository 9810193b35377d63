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
//
// Command-line front end over the ris_locate C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ris_locate.h"

namespace
{

// Common per-subcommand options.
struct CommonOpts
{
    std::string config_path;
    std::string preset_name;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;
};

void add_common(CLI::App *cmd, CommonOpts &opts)
{
    auto *cfg = cmd->add_option("--config", opts.config_path, "configuration file path");
    auto *pre = cmd->add_option("--preset", opts.preset_name,
                                "built-in configuration (fig3, fig4, fig2-same-wall, "
                                "fig2-diff-walls)");
    cfg->excludes(pre);
    cmd->add_option("--seed", opts.seed, "override the master seed")
        ->each([&opts](const std::string &) { opts.seed_set = true; });
    cmd->add_option("--out", opts.out_path, "output CSV path");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)")
        ->envname("RIS_LOCATE_THREADS");
}

int fail(const char *stage, ris_status status)
{
    std::fprintf(stderr, "ris-locate: %s: %s\n", stage, ris_last_error());
    return status == RIS_ERR_CONFIG ? 1 : 2;
}

// Loads the configuration named by --config/--preset and applies overrides.
// Returns nullptr after printing the error (exit code via *code).
ris_config *load_config(const CommonOpts &opts, int *code)
{
    ris_config *cfg = nullptr;
    ris_status st = RIS_OK;
    if (!opts.config_path.empty())
        st = ris_config_load(opts.config_path.c_str(), &cfg);
    else if (!opts.preset_name.empty())
        st = ris_config_preset(opts.preset_name.c_str(), &cfg);
    else
    {
        std::fprintf(stderr, "ris-locate: one of --config or --preset is required\n");
        *code = 1;
        return nullptr;
    }
    if (st != RIS_OK)
    {
        *code = fail("loading configuration", st);
        return nullptr;
    }
    if (opts.seed_set)
        ris_config_set_seed(cfg, opts.seed);
    if (opts.threads >= 0)
        ris_config_set_threads(cfg, opts.threads);
    if (!opts.out_path.empty())
        ris_config_set_output(cfg, opts.out_path.c_str());
    *code = 0;
    return cfg;
}

int run_validate(const CommonOpts &opts)
{
    int code = 0;
    ris_config *cfg = load_config(opts, &code);
    if (!cfg)
        return code;
    std::vector<char> buf(16384);
    int n = 0;
    ris_status st = ris_config_validate(cfg, buf.data(), buf.size(), &n);
    if (st != RIS_OK)
    {
        ris_config_free(cfg);
        return fail("validating configuration", st);
    }
    if (n > 0)
    {
        std::fprintf(stderr, "configuration has %d problem%s:\n%s\n", n, n == 1 ? "" : "s",
                     buf.data());
        ris_config_free(cfg);
        return 1;
    }
    std::printf("configuration OK\n");
    ris_config_free(cfg);
    return 0;
}

int run_sweep_cmd(const CommonOpts &opts)
{
    int code = 0;
    ris_config *cfg = load_config(opts, &code);
    if (!cfg)
        return code;

    ris_sweep *sweep = nullptr;
    ris_status st = ris_sweep_run(cfg, &sweep);
    if (st != RIS_OK)
    {
        ris_config_free(cfg);
        return fail("running sweep", st);
    }

    std::string out = ris_config_output(cfg);
    st = ris_sweep_write_csv(sweep, out.c_str());
    if (st != RIS_OK)
    {
        ris_sweep_free(sweep);
        ris_config_free(cfg);
        return fail("writing CSV", st);
    }

    size_t records = 0;
    ris_sweep_record_count(sweep, &records);
    std::printf("%s", ris_sweep_summary(sweep));
    std::printf("wrote %zu records to %s\n", records, out.c_str());
    ris_sweep_free(sweep);
    ris_config_free(cfg);
    return 0;
}

int run_pebmap_cmd(const CommonOpts &opts, double z_plane, double step)
{
    int code = 0;
    ris_config *cfg = load_config(opts, &code);
    if (!cfg)
        return code;

    ris_pebmap *map = nullptr;
    ris_status st = ris_pebmap_run(cfg, z_plane, step, &map);
    if (st != RIS_OK)
    {
        ris_config_free(cfg);
        return fail("computing PEB map", st);
    }

    std::string out = opts.out_path.empty() ? "peb_map.csv" : opts.out_path;
    st = ris_pebmap_write_csv(map, out.c_str());
    if (st != RIS_OK)
    {
        ris_pebmap_free(map);
        ris_config_free(cfg);
        return fail("writing CSV", st);
    }

    size_t points = 0;
    ris_pebmap_point_count(map, &points);
    std::printf("%s", ris_pebmap_summary(map));
    std::printf("wrote %zu points to %s\n", points, out.c_str());
    ris_pebmap_free(map);
    ris_config_free(cfg);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"user localization with multiple single-RX-RF-chain reconfigurable "
                 "intelligent surfaces"};
    app.set_version_flag("--version", []() { return std::string(ris_version()); });
    app.require_subcommand(1);

    CommonOpts sweep_opts;
    CLI::App *sweep = app.add_subcommand("sweep", "run the configured Monte-Carlo sweep");
    add_common(sweep, sweep_opts);

    CommonOpts map_opts;
    double z_plane = 5.0;
    double step = 0.5;
    CLI::App *pebmap = app.add_subcommand("peb-map", "sample the position error bound on a grid");
    add_common(pebmap, map_opts);
    pebmap->add_option("--z", z_plane, "height of the evaluation plane in meters");
    pebmap->add_option("--step", step, "grid step in meters");

    CommonOpts validate_opts;
    CLI::App *validate = app.add_subcommand("validate", "check a configuration and exit");
    add_common(validate, validate_opts);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 1;
    }

    if (sweep->parsed())
        return run_sweep_cmd(sweep_opts);
    if (pebmap->parsed())
        return run_pebmap_cmd(map_opts, z_plane, step);
    return run_validate(validate_opts);
}
