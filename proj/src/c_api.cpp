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

#include "ris_locate.h"

#include <cstring>
#include <string>

#include "rislocate/experiments.hpp"
#include "rislocate/fisher.hpp"

namespace
{

thread_local std::string g_last_error;

void set_error(const std::string &msg)
{
    g_last_error = msg;
}

// Runs fn, translating exceptions into status codes and the thread-local
// error message.
template <typename Fn> ris_status guarded(Fn &&fn)
{
    try
    {
        fn();
        return RIS_OK;
    }
    catch (const rislocate::ConfigError &e)
    {
        set_error(e.what());
        return RIS_ERR_CONFIG;
    }
    catch (const std::invalid_argument &e)
    {
        set_error(e.what());
        return RIS_ERR_ARG;
    }
    catch (const std::exception &e)
    {
        set_error(e.what());
        return RIS_ERR_RUNTIME;
    }
    catch (...)
    {
        set_error("unknown failure");
        return RIS_ERR_RUNTIME;
    }
}

ris_status null_arg(const char *what)
{
    set_error(std::string(what) + ": null argument");
    return RIS_ERR_ARG;
}

} // namespace

struct ris_config_s
{
    rislocate::ExperimentConfig cfg;
};

struct ris_sweep_s
{
    rislocate::SweepResult result;
    std::string summary;
};

struct ris_pebmap_s
{
    rislocate::PebMap map;
    std::string summary;
};

extern "C"
{

const char *ris_version(void)
{
    return "1.0.0";
}

const char *ris_last_error(void)
{
    return g_last_error.c_str();
}

ris_status ris_config_load(const char *path, ris_config **out)
{
    if (!path || !out)
        return null_arg("ris_config_load");
    *out = nullptr;
    return guarded([&]() { *out = new ris_config_s{rislocate::parse_config_file(path)}; });
}

ris_status ris_config_from_string(const char *text, ris_config **out)
{
    if (!text || !out)
        return null_arg("ris_config_from_string");
    *out = nullptr;
    return guarded(
        [&]() { *out = new ris_config_s{rislocate::parse_config_text(text, "<string>")}; });
}

ris_status ris_config_preset(const char *name, ris_config **out)
{
    if (!name || !out)
        return null_arg("ris_config_preset");
    *out = nullptr;
    return guarded([&]() { *out = new ris_config_s{rislocate::preset(name)}; });
}

ris_status ris_config_validate(const ris_config *cfg, char *buf, size_t cap, int *n_problems)
{
    if (!cfg || !n_problems)
        return null_arg("ris_config_validate");
    return guarded([&]() {
        std::vector<std::string> problems = cfg->cfg.validate();
        *n_problems = static_cast<int>(problems.size());
        if (buf && cap > 0)
        {
            std::string joined;
            for (std::size_t i = 0; i < problems.size(); ++i)
            {
                if (i)
                    joined += '\n';
                joined += problems[i];
            }
            std::size_t n = std::min(joined.size(), cap - 1);
            std::memcpy(buf, joined.data(), n);
            buf[n] = '\0';
        }
    });
}

ris_status ris_config_set_seed(ris_config *cfg, uint64_t seed)
{
    if (!cfg)
        return null_arg("ris_config_set_seed");
    cfg->cfg.scenario.seed = seed;
    return RIS_OK;
}

ris_status ris_config_set_threads(ris_config *cfg, int threads)
{
    if (!cfg)
        return null_arg("ris_config_set_threads");
    if (threads < 0)
    {
        set_error("ris_config_set_threads: threads must be >= 0");
        return RIS_ERR_ARG;
    }
    cfg->cfg.threads = threads;
    return RIS_OK;
}

ris_status ris_config_set_output(ris_config *cfg, const char *path)
{
    if (!cfg || !path)
        return null_arg("ris_config_set_output");
    cfg->cfg.output_path = path;
    return RIS_OK;
}

const char *ris_config_output(const ris_config *cfg)
{
    return cfg ? cfg->cfg.output_path.c_str() : "";
}

void ris_config_free(ris_config *cfg)
{
    delete cfg;
}

ris_status ris_sweep_run(const ris_config *cfg, ris_sweep **out)
{
    if (!cfg || !out)
        return null_arg("ris_sweep_run");
    *out = nullptr;
    return guarded([&]() {
        auto *handle = new ris_sweep_s;
        try
        {
            handle->result = rislocate::run_sweep(cfg->cfg);
            handle->summary = rislocate::sweep_summary_text(handle->result);
        }
        catch (...)
        {
            delete handle;
            throw;
        }
        *out = handle;
    });
}

ris_status ris_sweep_record_count(const ris_sweep *sweep, size_t *out)
{
    if (!sweep || !out)
        return null_arg("ris_sweep_record_count");
    *out = sweep->result.records.size();
    return RIS_OK;
}

ris_status ris_sweep_write_csv(const ris_sweep *sweep, const char *path)
{
    if (!sweep || !path)
        return null_arg("ris_sweep_write_csv");
    return guarded([&]() { rislocate::write_sweep_csv(sweep->result, path); });
}

const char *ris_sweep_summary(const ris_sweep *sweep)
{
    return sweep ? sweep->summary.c_str() : "";
}

void ris_sweep_free(ris_sweep *sweep)
{
    delete sweep;
}

ris_status ris_pebmap_run(const ris_config *cfg, double z_plane, double grid_step,
                          ris_pebmap **out)
{
    if (!cfg || !out)
        return null_arg("ris_pebmap_run");
    *out = nullptr;
    return guarded([&]() {
        auto *handle = new ris_pebmap_s;
        try
        {
            handle->map = rislocate::compute_peb_map(cfg->cfg, z_plane, grid_step);
            handle->summary = rislocate::peb_map_summary_text(handle->map);
        }
        catch (...)
        {
            delete handle;
            throw;
        }
        *out = handle;
    });
}

ris_status ris_pebmap_point_count(const ris_pebmap *map, size_t *out)
{
    if (!map || !out)
        return null_arg("ris_pebmap_point_count");
    *out = map->map.points.size();
    return RIS_OK;
}

ris_status ris_pebmap_quantile(const ris_pebmap *map, double q, double *out)
{
    if (!map || !out)
        return null_arg("ris_pebmap_quantile");
    return guarded([&]() { *out = map->map.quantile(q); });
}

ris_status ris_pebmap_write_csv(const ris_pebmap *map, const char *path)
{
    if (!map || !path)
        return null_arg("ris_pebmap_write_csv");
    return guarded([&]() { rislocate::write_peb_map_csv(map->map, path); });
}

const char *ris_pebmap_summary(const ris_pebmap *map)
{
    return map ? map->summary.c_str() : "";
}

void ris_pebmap_free(ris_pebmap *map)
{
    delete map;
}

ris_status ris_peb_at(const ris_config *cfg, double x, double y, double z, double *out)
{
    if (!cfg || !out)
        return null_arg("ris_peb_at");
    return guarded([&]() {
        const rislocate::ExperimentConfig &c = cfg->cfg;
        std::vector<std::string> errs = c.validate();
        if (!errs.empty())
            throw rislocate::ConfigError(errs.front());

        double lambda = c.scenario.wavelength();
        std::vector<rislocate::RisDescriptor> descs;
        std::vector<rislocate::Codebook> books;
        for (const rislocate::RisSpec &spec : c.ris)
        {
            rislocate::RisDescriptor d;
            d.reference_position = spec.position;
            d.orientation = spec.orientation;
            d.rows = spec.rows;
            d.cols = spec.cols;
            d.element_spacing = spec.spacing_m > 0.0 ? spec.spacing_m : lambda / 2.0;
            d.wavelength = lambda;
            int L = d.num_elements();
            int T = spec.num_profiles == 0 ? L : spec.num_profiles;

            rislocate::Codebook cb;
            switch (spec.codebook)
            {
                case rislocate::CodebookChoice::dft:
                    cb = rislocate::dft_codebook(L, T);
                    break;
                case rislocate::CodebookChoice::random_partial_dft:
                {
                    rislocate::Rng cb_rng(rislocate::derive_seed(c.scenario.seed, 0, descs.size()));
                    cb = rislocate::random_partial_dft(L, T, cb_rng);
                    break;
                }
                case rislocate::CodebookChoice::directive:
                {
                    rislocate::Rng centered(0);
                    cb = rislocate::directive_subset(
                        d, T, rislocate::local_aoa(d, {x, y, z}), 0.0, centered);
                    break;
                }
            }
            if (spec.quantization_bits > 0)
                cb = rislocate::quantize(cb, spec.quantization_bits);
            descs.push_back(d);
            books.push_back(cb);
        }
        *out = rislocate::peb_at({x, y, z}, descs, books, c.scenario.tx_power_w,
                                 c.scenario.noise_w);
    });
}

} // extern "C"
