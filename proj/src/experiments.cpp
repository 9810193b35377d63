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

#include "rislocate/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "rislocate/aoa.hpp"
#include "rislocate/fisher.hpp"
#include "rislocate/fusion.hpp"

namespace rislocate
{

namespace
{

// Stream-family tag separating per-point codebook draws from per-trial
// draws in the derived-seed space.
constexpr std::uint64_t codebook_stream_tag = 0x636F6465626F6F6BULL;

int resolve_threads(int requested, int work_items)
{
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    int n = requested > 0 ? requested : std::max(hw, 1);
    return std::max(1, std::min(n, std::max(work_items, 1)));
}

std::string join_lines(const std::vector<std::string> &lines)
{
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i)
    {
        if (i)
            out += '\n';
        out += lines[i];
    }
    return out;
}

// Everything fixed across the trials of one sweep point.
struct PerRisContext
{
    RisDescriptor desc;
    bool directive = false;
    int num_profiles = 0;
    int quantization_bits = 0;
    double pointing_uncertainty = 0.0;
    std::size_t dict_index = 0;
    Codebook fixed_cb;         // non-directive: used by every trial
    BeamspaceCache fixed_beam; // non-directive
    Codebook full_book;        // directive: all L (possibly quantized) DFT columns
    BeamspaceCache full_beam;  // directive: L x J, sliced by row per trial
    Codebook nominal_cb;       // bound computations
};

struct PointContext
{
    ScenarioConfig scenario;
    Vec3 user;
    std::complex<double> pilot;
    int sparsity = 1;
    std::vector<PerRisContext> ris;
    std::vector<Dictionary> dictionaries;
    double peb_value = 0.0;

    std::vector<RisDescriptor> descriptors() const
    {
        std::vector<RisDescriptor> out;
        out.reserve(ris.size());
        for (const PerRisContext &r : ris)
            out.push_back(r.desc);
        return out;
    }
};

Codebook select_columns(const Codebook &full, const std::vector<arma::uword> &order)
{
    Codebook cb;
    cb.profiles.set_size(full.profiles.n_rows, order.size());
    for (std::size_t t = 0; t < order.size(); ++t)
        cb.profiles.col(t) = full.profiles.col(order[t]);
    cb.kind = CodebookKind::directive;
    cb.quantization_bits = full.quantization_bits;
    return cb;
}

BeamspaceCache select_rows(const BeamspaceCache &full, const std::vector<arma::uword> &order)
{
    BeamspaceCache out;
    out.psi.set_size(order.size(), full.psi.n_cols);
    for (std::size_t t = 0; t < order.size(); ++t)
        out.psi.row(t) = full.psi.row(order[t]);
    out.column_norms = arma::sqrt(arma::sum(arma::square(arma::abs(out.psi)), 0)).t();
    return out;
}

PointContext build_point_context(const ExperimentConfig &cfg, int point_index, double value)
{
    PointContext ctx;
    ctx.scenario = cfg.scenario;
    ctx.user = cfg.user_position;

    int rows_override = 0;
    switch (cfg.sweep.axis)
    {
        case SweepAxis::power_dbm:
            ctx.scenario.tx_power_w = dbm_to_watt(value);
            break;
        case SweepAxis::elements_l:
            rows_override = static_cast<int>(std::sqrt(value) + 0.5);
            break;
        case SweepAxis::positions_grid:
            ctx.user = cfg.sweep.positions[static_cast<std::size_t>(value)];
            break;
    }

    double lambda = ctx.scenario.wavelength();
    ctx.pilot = std::complex<double>(std::sqrt(ctx.scenario.tx_power_w), 0.0);

    std::map<std::tuple<int, int, double>, std::size_t> dict_cache;
    const EstimatorSettings &est = cfg.estimator;

    int min_profiles = 1 << 30;
    std::vector<Codebook> nominal;
    for (std::size_t m = 0; m < cfg.ris.size(); ++m)
    {
        const RisSpec &spec = cfg.ris[m];
        PerRisContext rc;
        rc.desc.reference_position = spec.position;
        rc.desc.orientation = spec.orientation;
        rc.desc.rows = rows_override > 0 ? rows_override : spec.rows;
        rc.desc.cols = rows_override > 0 ? rows_override : spec.cols;
        rc.desc.element_spacing = spec.spacing_m > 0.0 ? spec.spacing_m : lambda / 2.0;
        rc.desc.wavelength = lambda;

        int L = rc.desc.num_elements();
        int T = spec.num_profiles == 0 ? L : spec.num_profiles;
        if (T > L)
            throw ConfigError("ris[" + std::to_string(m) + "].num_profiles: " + std::to_string(T) +
                              " exceeds the element count " + std::to_string(L));
        rc.num_profiles = T;
        rc.quantization_bits = spec.quantization_bits;
        rc.pointing_uncertainty = spec.pointing_uncertainty;
        min_profiles = std::min(min_profiles, T);

        auto key = std::make_tuple(rc.desc.rows, rc.desc.cols, rc.desc.element_spacing);
        auto it = dict_cache.find(key);
        if (it == dict_cache.end())
        {
            ctx.dictionaries.push_back(build_dictionary(rc.desc, est.azimuth_min, est.azimuth_max,
                                                        est.elevation_min, est.elevation_max,
                                                        est.azimuth_step, est.elevation_step));
            it = dict_cache.emplace(key, ctx.dictionaries.size() - 1).first;
        }
        rc.dict_index = it->second;
        const Dictionary &dict = ctx.dictionaries[rc.dict_index];

        switch (spec.codebook)
        {
            case CodebookChoice::dft:
            {
                Codebook cb = dft_codebook(L, T);
                if (spec.quantization_bits > 0)
                    cb = quantize(cb, spec.quantization_bits);
                rc.fixed_cb = cb;
                rc.fixed_beam = make_beamspace(cb, dict);
                rc.nominal_cb = cb;
                break;
            }
            case CodebookChoice::random_partial_dft:
            {
                Rng cb_rng(derive_seed(cfg.scenario.seed,
                                       codebook_stream_tag + static_cast<std::uint64_t>(point_index),
                                       static_cast<std::uint64_t>(m)));
                Codebook cb = random_partial_dft(L, T, cb_rng);
                if (spec.quantization_bits > 0)
                    cb = quantize(cb, spec.quantization_bits);
                rc.fixed_cb = cb;
                rc.fixed_beam = make_beamspace(cb, dict);
                rc.nominal_cb = cb;
                break;
            }
            case CodebookChoice::directive:
            {
                rc.directive = true;
                Codebook full = dft_codebook(L, L);
                if (spec.quantization_bits > 0)
                    full = quantize(full, spec.quantization_bits);
                rc.full_book = full;
                rc.full_beam = make_beamspace(full, dict);
                Rng centered(0);
                std::vector<arma::uword> order = directive_column_order(
                    rc.desc, T, local_aoa(rc.desc, ctx.user), 0.0, centered);
                rc.nominal_cb = select_columns(full, order);
                break;
            }
        }
        nominal.push_back(rc.nominal_cb);
        ctx.ris.push_back(std::move(rc));
    }

    int requested = est.sparsity == 0 ? ctx.scenario.num_paths : est.sparsity;
    ctx.sparsity = std::max(1, std::min(requested, min_profiles));

    // Zero noise makes the Fisher bound vanish; report 0 instead of dividing
    // by the noise power.
    ctx.peb_value = ctx.scenario.noise_w > 0.0
                        ? peb_at(ctx.user, ctx.descriptors(), nominal, ctx.scenario.tx_power_w,
                                 ctx.scenario.noise_w)
                        : 0.0;
    return ctx;
}

TrialRecord run_trial(const ExperimentConfig &cfg, const PointContext &ctx, int point_index,
                      double value, int trial)
{
    Rng rng(derive_seed(cfg.scenario.seed, static_cast<std::uint64_t>(point_index),
                        static_cast<std::uint64_t>(trial)));

    std::size_t M = ctx.ris.size();
    std::vector<RisDescriptor> descs = ctx.descriptors();
    std::vector<AoaEstimate> estimates(M);
    std::vector<TrialAngles> angles(M);

    for (std::size_t m = 0; m < M; ++m)
    {
        const PerRisContext &rc = ctx.ris[m];
        const Dictionary &dict = ctx.dictionaries[rc.dict_index];

        Codebook trial_cb;
        BeamspaceCache trial_beam;
        const Codebook *cb = &rc.fixed_cb;
        const BeamspaceCache *beam = &rc.fixed_beam;
        if (rc.directive)
        {
            std::vector<arma::uword> order =
                directive_column_order(rc.desc, rc.num_profiles, local_aoa(rc.desc, ctx.user),
                                       rc.pointing_uncertainty, rng);
            trial_cb = select_columns(rc.full_book, order);
            trial_beam = select_rows(rc.full_beam, order);
            cb = &trial_cb;
            beam = &trial_beam;
        }

        PathSet ps = generate_paths(ctx.scenario, rc.desc, static_cast<int>(m), ctx.user, rng);
        ObservationBlock ob = observe(ps, rc.desc, *cb, ctx.pilot, ctx.scenario.noise_w,
                                      ctx.scenario.field_model, rng);
        AoaEstimate est = estimate_los(ob, *beam, dict, ctx.sparsity, rc.desc, ctx.pilot,
                                       ctx.scenario.noise_w);
        if (cfg.estimator.covariance == CovarianceModel::isotropic)
        {
            double s2 = cfg.estimator.isotropic_sigma * cfg.estimator.isotropic_sigma;
            est.covariance = s2 * arma::eye(2, 2);
        }

        AoaPair truth = local_aoa(rc.desc, ctx.user);
        angles[m] = {est.aoa.azimuth, est.aoa.elevation, truth.azimuth, truth.elevation};
        estimates[m] = std::move(est);
    }

    PositionEstimate ls = ls_intersect(make_line_bundle(estimates, descs));
    PositionEstimate ml = ml_refine(estimates, descs, ls.position, cfg.estimator.ml_max_iters,
                                    cfg.estimator.ml_tol);

    TrialRecord rec;
    rec.sweep_index = point_index;
    rec.sweep_value = value;
    rec.trial = trial;
    rec.p_true = ctx.user;
    rec.p_ls = ls.position;
    rec.p_ml = ml.position;
    rec.angles = std::move(angles);
    rec.err_ls = (ls.position - ctx.user).norm();
    rec.err_ml = (ml.position - ctx.user).norm();
    rec.peb = ctx.peb_value;
    return rec;
}

// Runs fn(i) for i in [0, count) on `threads` workers; the first exception
// wins and aborts the remaining work.
template <typename Fn> void parallel_for(int count, int threads, Fn &&fn)
{
    if (threads <= 1)
    {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&]() {
        while (!failed.load(std::memory_order_relaxed))
        {
            int i = next.fetch_add(1);
            if (i >= count)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
        pool.emplace_back(work);
    for (std::thread &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::vector<double> sweep_point_values(const ExperimentConfig &cfg)
{
    if (cfg.sweep.axis == SweepAxis::positions_grid)
    {
        std::vector<double> vals(cfg.sweep.positions.size());
        for (std::size_t i = 0; i < vals.size(); ++i)
            vals[i] = static_cast<double>(i);
        return vals;
    }
    return cfg.sweep.values;
}

} // namespace

SweepResult run_sweep(const ExperimentConfig &cfg)
{
    std::vector<std::string> errs = cfg.validate();
    if (!errs.empty())
        throw ConfigError(join_lines(errs));

    std::vector<double> values = sweep_point_values(cfg);
    int trials = cfg.sweep.trials;
    int threads = resolve_threads(cfg.threads, trials);

    SweepResult result;
    result.records.resize(values.size() * static_cast<std::size_t>(trials));
    result.summary.reserve(values.size());

    for (std::size_t i = 0; i < values.size(); ++i)
    {
        PointContext ctx = build_point_context(cfg, static_cast<int>(i), values[i]);
        TrialRecord *slots = result.records.data() + i * static_cast<std::size_t>(trials);
        parallel_for(trials, threads, [&](int t) {
            slots[t] = run_trial(cfg, ctx, static_cast<int>(i), values[i], t);
        });

        SweepPointSummary s;
        s.sweep_value = values[i];
        s.trials = trials;
        s.peb = ctx.peb_value;
        double acc_ls = 0.0;
        double acc_ml = 0.0;
        for (int t = 0; t < trials; ++t)
        {
            acc_ls += slots[t].err_ls * slots[t].err_ls;
            acc_ml += slots[t].err_ml * slots[t].err_ml;
        }
        s.rmse_ls = std::sqrt(acc_ls / trials);
        s.rmse_ml = std::sqrt(acc_ml / trials);
        result.summary.push_back(s);
    }
    return result;
}

void write_sweep_csv(const SweepResult &result, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_sweep_csv: cannot open " + path);
    f << "sweep_value,trial,x_true,y_true,z_true,x_ls,y_ls,z_ls,x_ml,y_ml,z_ml,"
         "err_ls_m,err_ml_m,peb_m\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        f << buf;
    };
    for (const TrialRecord &r : result.records)
    {
        num(r.sweep_value);
        f << ',' << r.trial << ',';
        num(r.p_true.x);
        f << ',';
        num(r.p_true.y);
        f << ',';
        num(r.p_true.z);
        f << ',';
        num(r.p_ls.x);
        f << ',';
        num(r.p_ls.y);
        f << ',';
        num(r.p_ls.z);
        f << ',';
        num(r.p_ml.x);
        f << ',';
        num(r.p_ml.y);
        f << ',';
        num(r.p_ml.z);
        f << ',';
        num(r.err_ls);
        f << ',';
        num(r.err_ml);
        f << ',';
        num(r.peb);
        f << '\n';
    }
    if (!f)
        throw std::runtime_error("write_sweep_csv: write failed for " + path);
}

std::string sweep_summary_text(const SweepResult &result)
{
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %-8s %-12s %-12s %-12s\n", "sweep_value", "trials",
                  "rmse_ls_m", "rmse_ml_m", "peb_m");
    out << line;
    for (const SweepPointSummary &s : result.summary)
    {
        std::snprintf(line, sizeof(line), "%-14.6g %-8d %-12.6g %-12.6g %-12.6g\n", s.sweep_value,
                      s.trials, s.rmse_ls, s.rmse_ml, s.peb);
        out << line;
    }
    return out.str();
}

std::vector<double> PebMap::sorted_values() const
{
    std::vector<double> vals;
    vals.reserve(points.size());
    for (const PebMapPoint &p : points)
        vals.push_back(p.peb);
    std::sort(vals.begin(), vals.end());
    return vals;
}

double PebMap::quantile(double q) const
{
    if (points.empty())
        throw std::runtime_error("PebMap::quantile: the map is empty");
    if (q < 0.0 || q > 1.0)
        throw std::invalid_argument("PebMap::quantile: q must be in [0, 1]");
    std::vector<double> vals = sorted_values();
    std::size_t n = vals.size();
    std::size_t rank = q <= 0.0 ? 1 : static_cast<std::size_t>(std::ceil(q * double(n)));
    rank = std::min(std::max<std::size_t>(rank, 1), n);
    return vals[rank - 1];
}

PebMap compute_peb_map(const ExperimentConfig &cfg, double z_plane, double step)
{
    std::vector<std::string> errs = cfg.validate();
    if (!errs.empty())
        throw ConfigError(join_lines(errs));
    if (!(step > 0.0))
        throw ConfigError("peb-map: grid step must be positive");
    if (z_plane < 0.0 || z_plane > cfg.scenario.room.z)
        throw ConfigError("peb-map: z plane lies outside the room");
    if (!(cfg.scenario.noise_w > 0.0))
        throw ConfigError("peb-map: scenario noise power must be positive");

    double lambda = cfg.scenario.wavelength();
    std::vector<RisDescriptor> descs;
    std::vector<const RisSpec *> specs;
    for (const RisSpec &spec : cfg.ris)
    {
        RisDescriptor d;
        d.reference_position = spec.position;
        d.orientation = spec.orientation;
        d.rows = spec.rows;
        d.cols = spec.cols;
        d.element_spacing = spec.spacing_m > 0.0 ? spec.spacing_m : lambda / 2.0;
        d.wavelength = lambda;
        descs.push_back(d);
        specs.push_back(&spec);
    }

    // Directive panels aim at the evaluation point itself; fixed books are
    // shared across the grid.
    std::vector<Codebook> fixed(descs.size());
    std::vector<Codebook> full_books(descs.size());
    for (std::size_t m = 0; m < descs.size(); ++m)
    {
        int L = descs[m].num_elements();
        int T = specs[m]->num_profiles == 0 ? L : specs[m]->num_profiles;
        if (T > L)
            throw ConfigError("ris[" + std::to_string(m) + "].num_profiles exceeds element count");
        switch (specs[m]->codebook)
        {
            case CodebookChoice::dft:
                fixed[m] = dft_codebook(L, T);
                break;
            case CodebookChoice::random_partial_dft:
            {
                Rng cb_rng(derive_seed(cfg.scenario.seed, codebook_stream_tag,
                                       static_cast<std::uint64_t>(m)));
                fixed[m] = random_partial_dft(L, T, cb_rng);
                break;
            }
            case CodebookChoice::directive:
            {
                Codebook full = dft_codebook(L, L);
                if (specs[m]->quantization_bits > 0)
                    full = quantize(full, specs[m]->quantization_bits);
                full_books[m] = full;
                break;
            }
        }
        if (specs[m]->codebook != CodebookChoice::directive && specs[m]->quantization_bits > 0)
            fixed[m] = quantize(fixed[m], specs[m]->quantization_bits);
    }

    int nx = 1 + static_cast<int>(std::floor(cfg.scenario.room.x / step + 1e-9));
    int ny = 1 + static_cast<int>(std::floor(cfg.scenario.room.y / step + 1e-9));
    int total = nx * ny;

    std::vector<double> peb_values(static_cast<std::size_t>(total),
                                   std::numeric_limits<double>::quiet_NaN());
    int threads = resolve_threads(cfg.threads, total);

    parallel_for(total, threads, [&](int idx) {
        int ix = idx / ny;
        int iy = idx % ny;
        Vec3 p = {ix * step, iy * step, z_plane};

        for (const RisDescriptor &d : descs)
            if ((p - d.reference_position).norm() < 0.1)
                return;

        std::vector<Codebook> books = fixed;
        for (std::size_t m = 0; m < descs.size(); ++m)
        {
            if (specs[m]->codebook != CodebookChoice::directive)
                continue;
            int L = descs[m].num_elements();
            int T = specs[m]->num_profiles == 0 ? L : specs[m]->num_profiles;
            Rng centered(0);
            AoaPair pointing;
            try
            {
                pointing = local_aoa(descs[m], p);
            }
            catch (const std::domain_error &)
            {
                return;
            }
            books[m] = select_columns(full_books[m],
                                      directive_column_order(descs[m], T, pointing, 0.0, centered));
        }

        try
        {
            peb_values[static_cast<std::size_t>(idx)] =
                peb_at(p, descs, books, cfg.scenario.tx_power_w, cfg.scenario.noise_w);
        }
        catch (const std::domain_error &)
        {
        }
        catch (const std::runtime_error &)
        {
        }
    });

    PebMap map;
    map.z_plane = z_plane;
    map.step = step;
    for (int idx = 0; idx < total; ++idx)
    {
        double v = peb_values[static_cast<std::size_t>(idx)];
        if (std::isnan(v))
            continue;
        int ix = idx / ny;
        int iy = idx % ny;
        map.points.push_back({{ix * step, iy * step, z_plane}, v});
    }
    return map;
}

void write_peb_map_csv(const PebMap &map, const std::string &path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_peb_map_csv: cannot open " + path);
    f << "x,y,z,peb_m\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        f << buf;
    };
    for (const PebMapPoint &p : map.points)
    {
        num(p.position.x);
        f << ',';
        num(p.position.y);
        f << ',';
        num(p.position.z);
        f << ',';
        num(p.peb);
        f << '\n';
    }
    if (!f)
        throw std::runtime_error("write_peb_map_csv: write failed for " + path);
}

std::string peb_map_summary_text(const PebMap &map)
{
    std::ostringstream out;
    out << "points: " << map.points.size() << " (z = " << map.z_plane << " m, step = " << map.step
        << " m)\n";
    if (map.points.empty())
        return out.str();
    char line[160];
    std::snprintf(line, sizeof(line), "peb_m quantiles: p10 %.6g  p50 %.6g  p90 %.6g\n",
                  map.quantile(0.10), map.quantile(0.50), map.quantile(0.90));
    out << line;
    return out.str();
}

} // namespace rislocate
