#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "baselines.hpp"
#include "domain.hpp"
#include "field.hpp"
#include "gvf.hpp"
#include "io.hpp"
#include "mesh_io.hpp"
#include "metrics.hpp"
#include "render.hpp"
#include "smoothing.hpp"

namespace gradvar {

enum class Method { gvf, smooth, harmonic, mls, shepard };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::gvf: return "gvf";
    case Method::smooth: return "smooth";
    case Method::harmonic: return "harmonic";
    case Method::mls: return "mls";
    case Method::shepard: return "shepard";
    }
    return "?";
}

inline Method parse_method(const std::string& name) {
    if (name == "gvf") return Method::gvf;
    if (name == "smooth") return Method::smooth;
    if (name == "harmonic") return Method::harmonic;
    if (name == "mls") return Method::mls;
    if (name == "shepard") return Method::shepard;
    throw InvalidArgument("unknown method '" + name + "'");
}

enum class Generator { affine, gaussian_bump, sinusoid, two_line_samples, boundary_ring };

inline const char* to_string(Generator g) {
    switch (g) {
    case Generator::affine: return "affine";
    case Generator::gaussian_bump: return "gaussian-bump";
    case Generator::sinusoid: return "sinusoid";
    case Generator::two_line_samples: return "two-line-samples";
    case Generator::boundary_ring: return "boundary-ring";
    }
    return "?";
}

inline Generator parse_generator(const std::string& name) {
    for (Generator g : {Generator::affine, Generator::gaussian_bump, Generator::sinusoid, Generator::two_line_samples,
                        Generator::boundary_ring})
        if (name == to_string(g)) return g;
    throw InvalidArgument("unknown generator '" + name + "'");
}

struct DomainSource {
    std::optional<GridSpec> grid;
    std::string mesh_path;
    std::string edges_path;
    std::size_t edge_vertices = 0;
};

struct ExperimentConfig {
    DomainSource domain;
    std::string samples_path;
    Method method = Method::gvf;
    std::optional<double> delta; // nullopt: Lipschitz bound
    ExtensionPolicy policy = ExtensionPolicy::midpoint;
    int order = 1;
    std::size_t sweeps = 100;
    std::size_t iters = 100;
    double tol = 1e-9;
    MlsConfig mls;
    ShepardConfig shepard;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::string truth_path;

    // bench
    Generator generator = Generator::affine;
    std::size_t trials = 5;
    std::size_t sample_count = 20;

    // render
    std::string field_path;
};

struct LoadedDomain {
    Domain domain;
    std::optional<GridSpec> grid;
};

inline LoadedDomain load_domain(const DomainSource& src) {
    const int given = (src.grid ? 1 : 0) + (src.mesh_path.empty() ? 0 : 1) + (src.edges_path.empty() ? 0 : 1);
    if (given != 1) throw InvalidArgument("specify exactly one of --grid, --mesh, --edges");
    if (src.grid) return {build_grid(*src.grid), src.grid};
    if (!src.mesh_path.empty()) return {load_mesh(src.mesh_path), std::nullopt};
    return {load_edge_list(src.edges_path, src.edge_vertices), std::nullopt};
}

inline nlohmann::json domain_json(const LoadedDomain& d) {
    nlohmann::json j;
    if (d.grid) {
        j["kind"] = "grid";
        j["width"] = d.grid->width;
        j["height"] = d.grid->height;
        j["connectivity"] = to_string(d.grid->connectivity);
        j["spacing"] = d.grid->spacing;
    } else {
        j["kind"] = "graph";
    }
    j["vertices"] = d.domain.vertex_count();
    j["edges"] = d.domain.edge_count();
    return j;
}

/// One method's output plus whatever the method reports about itself.
struct MethodRun {
    ScalarField field;
    std::optional<std::vector<int>> idx;
    std::optional<LevelTable> levels;
    bool auto_delta = true;
    std::optional<RelaxReport> relax;
    std::size_t fallback_vertices = 0;
};

/**
 * Runs one reconstruction method on vertex samples.
 * Throws InfeasibleError when an explicit delta gives infeasible guiding data.
 */
inline MethodRun run_method(const ExperimentConfig& cfg, const LoadedDomain& ld, const SampleMap& samples) {
    const Domain& domain = ld.domain;
    MethodRun run;
    switch (cfg.method) {
    case Method::gvf:
    case Method::harmonic: {
        const LevelFit fit = fit_levels(domain, samples, cfg.delta);
        const LevelField lf = gvf_extend(domain, fit.guiding, fit.table, cfg.policy);
        run.levels = fit.table;
        run.auto_delta = fit.auto_delta;
        run.field = to_scalar(lf);
        if (cfg.method == Method::gvf) {
            run.idx = lf.idx;
        } else {
            auto [relaxed, report] = harmonic_relax(domain, run.field, samples, {cfg.iters, cfg.tol});
            run.field = std::move(relaxed);
            run.relax = report;
        }
        break;
    }
    case Method::smooth: {
        if (cfg.delta) throw InvalidArgument("smooth uses the Lipschitz spacing; drop --delta");
        const GridSpec grid = ld.grid.value_or(GridSpec{domain.vertex_count(), 1});
        if (cfg.order > 0 && !ld.grid) throw InvalidArgument("smooth with order >= 1 requires --grid");
        run.levels = fit_levels(domain, samples).table;
        SmoothOptions opts;
        opts.order = cfg.order;
        opts.sweeps = cfg.sweeps;
        opts.policy = cfg.policy;
        run.field = smooth_reconstruct(domain, grid, samples, opts);
        break;
    }
    case Method::mls: {
        auto eval = evaluate_on_domain(cfg.mls, SamplePoints::from_vertices(domain, samples), domain);
        run.field = std::move(eval.field);
        run.fallback_vertices = eval.fallback_count;
        break;
    }
    case Method::shepard:
        run.field = evaluate_on_domain(cfg.shepard, SamplePoints::from_vertices(domain, samples), domain).field;
        break;
    }
    return run;
}

namespace detail {

inline double generator_truth(Generator g, const GridSpec& grid, Point2 p) {
    const double w = static_cast<double>(grid.width - 1) * grid.spacing;
    const double h = static_cast<double>(grid.height - 1) * grid.spacing;
    switch (g) {
    case Generator::affine: return 0.3 * p.x - 0.7 * p.y + 2.0;
    case Generator::sinusoid:
    case Generator::boundary_ring:
        return std::sin(2.0 * std::numbers::pi * p.x / std::max(w, 1.0)) *
               std::cos(2.0 * std::numbers::pi * p.y / std::max(h, 1.0));
    case Generator::gaussian_bump:
    case Generator::two_line_samples: {
        const double sigma = 0.22 * std::max(std::min(w, h), 1.0);
        const double dx = p.x - 0.5 * w, dy = p.y - 0.5 * h;
        return 10.0 * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
    }
    return 0.0;
}

// k distinct picks from `pool` by partial Fisher-Yates
inline std::vector<VertexId> pick_distinct(std::vector<VertexId> pool, std::size_t k, std::mt19937_64& rng) {
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace detail

struct SyntheticProblem {
    ScalarField truth;
    SampleMap samples;
};

/**
 * Truth field and sample set for one benchmark trial. two-line-samples puts
 * every sample on one grid row for even trials and on two rows for odd ones;
 * boundary-ring samples the whole outer ring.
 */
inline SyntheticProblem make_problem(Generator g, const GridSpec& grid, std::size_t count, std::uint64_t seed,
                                     std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    SyntheticProblem prob;
    prob.truth.values.resize(grid.vertex_count());
    for (VertexId v = 0; v < grid.vertex_count(); ++v)
        prob.truth[v] = detail::generator_truth(
            g, grid, {static_cast<double>(grid.col(v)) * grid.spacing, static_cast<double>(grid.row(v)) * grid.spacing});

    std::vector<VertexId> pool;
    if (g == Generator::two_line_samples) {
        std::vector<std::size_t> rows;
        if (trial % 2 == 0 || grid.height < 3)
            rows = {grid.height / 2};
        else
            rows = {grid.height / 3, (2 * grid.height) / 3};
        for (std::size_t r : rows)
            for (std::size_t c = 0; c < grid.width; ++c) pool.push_back(grid.vertex(c, r));
    } else if (g == Generator::boundary_ring) {
        for (VertexId v = 0; v < grid.vertex_count(); ++v) {
            const std::size_t c = grid.col(v), r = grid.row(v);
            if (c == 0 || r == 0 || c + 1 == grid.width || r + 1 == grid.height) pool.push_back(v);
        }
        count = pool.size();
    } else {
        for (VertexId v = 0; v < grid.vertex_count(); ++v) pool.push_back(v);
    }
    for (VertexId v : detail::pick_distinct(pool, count, rng)) prob.samples[v] = prob.truth[v];
    return prob;
}

struct BenchRow {
    std::string generator;
    std::size_t trial = 0;
    std::string method;
    bool ok = true;
    Metrics metrics;
    std::optional<double> delta;
    std::size_t fallback_vertices = 0;
    std::optional<std::size_t> iterations;
    std::string error;
};

inline std::string bench_csv_header() {
    return "generator,trial,method,status,rmse,max_abs_error,tv_gradient,delta,fallback_vertices,iterations,error\n";
}

inline std::string format_bench_row(const BenchRow& r) {
    auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    return r.generator + "," + std::to_string(r.trial) + "," + r.method + "," + (r.ok ? "ok" : "error") + "," +
           (r.ok ? format_double(r.metrics.rmse) : "") + "," + (r.ok ? format_double(r.metrics.max_abs_error) : "") +
           "," + (r.ok ? opt(r.metrics.tv_gradient) : "") + "," + opt(r.delta) + "," +
           std::to_string(r.fallback_vertices) + "," + (r.iterations ? std::to_string(*r.iterations) : "") + "," +
           err + "\n";
}

/// Every method on `trials` seeded problems; a failing method becomes an error row.
inline std::vector<BenchRow> run_bench(const ExperimentConfig& cfg, const GridSpec& grid) {
    const LoadedDomain ld{build_grid(grid), grid};
    std::vector<BenchRow> rows;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        const SyntheticProblem prob = make_problem(cfg.generator, grid, cfg.sample_count, cfg.seed, trial);
        for (Method m : {Method::gvf, Method::smooth, Method::harmonic, Method::mls, Method::shepard}) {
            BenchRow row;
            row.generator = to_string(cfg.generator);
            row.trial = trial;
            row.method = to_string(m);
            ExperimentConfig mc = cfg;
            mc.method = m;
            mc.delta.reset();
            try {
                const MethodRun run = run_method(mc, ld, prob.samples);
                row.metrics = compute_metrics(ld.domain, run.field, prob.truth, grid);
                if (run.levels) row.delta = run.levels->delta;
                row.fallback_vertices = run.fallback_vertices;
                if (run.relax) row.iterations = run.relax->iterations_run;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace gradvar
