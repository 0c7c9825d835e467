#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "experiment.hpp"

namespace gradvar {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInfeasible = 2 };

namespace detail {

inline SnappedSamples load_snapped_samples(const ExperimentConfig& cfg, const LoadedDomain& ld, std::ostream& err) {
    if (cfg.samples_path.empty()) throw InvalidArgument("--samples is required");
    SnappedSamples s = snap_samples(ld.domain, load_samples_csv(cfg.samples_path), ld.grid);
    if (s.collisions > 0)
        err << "warning: " << s.collisions << " vertices received several samples; values averaged\n";
    return s;
}

inline void print_witness(std::ostream& out, const Witness& w) { out << "infeasible: " << w.describe() << "\n"; }

template <class Fn>
int guarded(std::ostream& out, std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const InfeasibleError& e) {
        print_witness(out, e.witness());
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace detail

/// Feasibility of the quantized samples: exit 0 feasible, 2 infeasible (witness printed), 1 on usage/IO errors.
inline int cmd_check(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(out, err, [&] {
        const LoadedDomain ld = load_domain(cfg.domain);
        const SnappedSamples s = detail::load_snapped_samples(cfg, ld, err);
        const LevelFit fit = fit_levels(ld.domain, s.samples, cfg.delta);
        const Feasibility f = check_feasibility(ld.domain, fit.guiding);
        if (!f) {
            detail::print_witness(out, *f.witness);
            return int(kExitInfeasible);
        }
        out << "feasible: " << fit.guiding.entries.size() << " guiding points, " << fit.table.count
            << " levels, delta " << format_double(fit.table.delta) << (fit.auto_delta ? " (auto)" : "") << "\n";
        return int(kExitOk);
    });
}

/// Reconstructs a field and writes field.csv, metrics.json and, on grids, field.ppm/field.pgm/field.obj.
inline int cmd_fit(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(out, err, [&] {
        const LoadedDomain ld = load_domain(cfg.domain);
        const SnappedSamples s = detail::load_snapped_samples(cfg, ld, err);
        std::optional<ScalarField> truth;
        if (!cfg.truth_path.empty()) {
            truth = load_field_csv(cfg.truth_path).field;
            if (truth->size() != ld.domain.vertex_count()) throw InvalidArgument("truth field does not match domain");
        }

        const MethodRun run = run_method(cfg, ld, s.samples);
        const std::filesystem::path dir(cfg.out_dir);
        write_file_atomic(dir / "field.csv", format_field_csv(run.field, run.idx ? &*run.idx : nullptr));
        if (ld.grid) {
            write_file_atomic(dir / "field.ppm", render_heatmap(ld.domain, run.field, *ld.grid));
            write_file_atomic(dir / "field.pgm", render_pgm16(ld.domain, run.field, *ld.grid));
            write_file_atomic(dir / "field.obj", render_heightmesh(ld.domain, run.field, *ld.grid));
        }

        nlohmann::json j;
        j["schema"] = 1;
        j["command"] = "fit";
        j["method"] = to_string(cfg.method);
        j["seed"] = cfg.seed;
        j["domain"] = domain_json(ld);
        j["samples"] = s.samples.size();
        j["sample_collisions"] = s.collisions;
        if (cfg.method == Method::gvf || cfg.method == Method::harmonic || cfg.method == Method::smooth)
            j["policy"] = to_string(cfg.policy);
        if (run.levels)
            j["levels"] = {{"base", run.levels->base},
                           {"delta", run.levels->delta},
                           {"count", run.levels->count},
                           {"auto", run.auto_delta}};
        if (cfg.method == Method::smooth) j["smooth"] = {{"order", cfg.order}, {"sweeps", cfg.sweeps}};
        if (run.relax)
            j["relax"] = {{"iterations", run.relax->iterations_run}, {"final_residual", run.relax->final_residual}};
        if (cfg.method == Method::mls) j["mls"] = {{"degree", cfg.mls.degree}, {"fallback_vertices", run.fallback_vertices}};
        if (truth) {
            const Metrics m = compute_metrics(ld.domain, run.field, *truth, ld.grid);
            j["metrics"] = {{"rmse", m.rmse}, {"max_abs_error", m.max_abs_error}};
            j["metrics"]["tv_gradient"] = m.tv_gradient ? nlohmann::json(*m.tv_gradient) : nlohmann::json(nullptr);
        }
        write_file_atomic(dir / "metrics.json", j.dump(2) + "\n");

        out << to_string(cfg.method) << ": wrote " << (dir / "field.csv").string();
        if (truth) out << " rmse " << format_double(j["metrics"]["rmse"].get<double>());
        out << "\n";
        return int(kExitOk);
    });
}

/// Seeded synthetic comparison of every method; writes bench.csv and echoes it.
inline int cmd_bench(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(out, err, [&] {
        if (!cfg.domain.grid) throw InvalidArgument("bench requires --grid");
        const auto rows = run_bench(cfg, *cfg.domain.grid);
        std::string csv = bench_csv_header();
        for (const auto& r : rows) csv += format_bench_row(r);
        write_file_atomic(std::filesystem::path(cfg.out_dir) / "bench.csv", csv);
        out << csv;
        return int(kExitOk);
    });
}

/// Renders an existing field CSV onto a grid.
inline int cmd_render(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(out, err, [&] {
        if (!cfg.domain.grid) throw InvalidArgument("render requires --grid");
        if (cfg.field_path.empty()) throw InvalidArgument("--field is required");
        const LoadedDomain ld = load_domain(cfg.domain);
        const ScalarField field = load_field_csv(cfg.field_path).field;
        const std::filesystem::path dir(cfg.out_dir);
        write_file_atomic(dir / "field.ppm", render_heatmap(ld.domain, field, *ld.grid));
        write_file_atomic(dir / "field.pgm", render_pgm16(ld.domain, field, *ld.grid));
        write_file_atomic(dir / "field.obj", render_heightmesh(ld.domain, field, *ld.grid));
        out << "rendered " << cfg.field_path << " to " << dir.string() << "\n";
        return int(kExitOk);
    });
}

namespace detail {

inline GridSpec parse_grid(const std::string& text) {
    const auto x = text.find_first_of("xX");
    std::size_t w = 0, h = 0;
    if (x == std::string::npos || !parse_number(std::string_view(text).substr(0, x), w) ||
        !parse_number(std::string_view(text).substr(x + 1), h))
        throw InvalidArgument("--grid expects WxH, got '" + text + "'");
    GridSpec g{w, h};
    g.validate();
    return g;
}

} // namespace detail

/// Parses argv and dispatches; the return value is the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"gradvar: gradually varied surface reconstruction"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string grid_text, connectivity = "4", delta_text = "auto", method = "gvf", policy = "midpoint";
    std::string generator = "affine", mls_weight = "gaussian";
    double spacing = 1.0, mls_scale = 1.0, mls_power = 2.0, mls_epsilon = 0.0;

    auto add_domain = [&](CLI::App* sub) {
        sub->add_option("--grid", grid_text, "grid domain WxH");
        sub->add_option("--connectivity", connectivity, "grid adjacency")->check(CLI::IsMember({"4", "8"}));
        sub->add_option("--spacing", spacing, "grid spacing")->check(CLI::PositiveNumber);
        sub->add_option("--mesh", cfg.domain.mesh_path, "OBJ mesh domain");
        sub->add_option("--edges", cfg.domain.edges_path, "edge-list domain");
        sub->add_option("--vertices", cfg.domain.edge_vertices, "vertex count for --edges (default max id + 1)");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "random seed");
    };
    auto add_method = [&](CLI::App* sub) {
        sub->add_option("--samples", cfg.samples_path, "sample CSV (x,y,value or vertex,value)");
        sub->add_option("--method", method, "gvf|smooth|harmonic|mls|shepard")
            ->check(CLI::IsMember({"gvf", "smooth", "harmonic", "mls", "shepard"}));
        sub->add_option("--delta", delta_text, "level spacing, or auto");
        sub->add_option("--policy", policy, "midpoint|lower|upper")->check(CLI::IsMember({"midpoint", "lower", "upper"}));
        sub->add_option("--order", cfg.order, "smoothing order")->check(CLI::Range(0, 2));
        sub->add_option("--sweeps", cfg.sweeps, "Taylor-blend sweeps per order");
        sub->add_option("--iters", cfg.iters, "harmonic iterations");
        sub->add_option("--tol", cfg.tol, "harmonic tolerance")->check(CLI::NonNegativeNumber);
        sub->add_option("--mls-degree", cfg.mls.degree, "MLS polynomial degree")->check(CLI::Range(0, 2));
        sub->add_option("--mls-weight", mls_weight, "gaussian|inverse")->check(CLI::IsMember({"gaussian", "inverse"}));
        sub->add_option("--mls-scale", mls_scale, "Gaussian weight scale")->check(CLI::PositiveNumber);
        sub->add_option("--mls-power", mls_power, "inverse weight exponent")->check(CLI::PositiveNumber);
        sub->add_option("--mls-epsilon", mls_epsilon, "inverse weight offset")->check(CLI::NonNegativeNumber);
        sub->add_option("--shepard-power", cfg.shepard.power, "Shepard exponent")->check(CLI::PositiveNumber);
    };

    auto* check = app.add_subcommand("check", "test whether the samples admit a gradually varied extension");
    auto* fit = app.add_subcommand("fit", "reconstruct a field from samples");
    auto* bench = app.add_subcommand("bench", "compare methods on synthetic data");
    auto* render = app.add_subcommand("render", "render a field CSV on a grid");
    for (auto* sub : {check, fit, bench, render}) add_domain(sub);
    for (auto* sub : {check, fit, bench}) add_method(sub);
    fit->add_option("--truth", cfg.truth_path, "ground-truth field CSV");
    bench->add_option("--generator", generator, "affine|gaussian-bump|sinusoid|two-line-samples|boundary-ring")
        ->check(CLI::IsMember({"affine", "gaussian-bump", "sinusoid", "two-line-samples", "boundary-ring"}));
    bench->add_option("--trials", cfg.trials, "number of seeded trials");
    bench->add_option("--count", cfg.sample_count, "samples per trial");
    render->add_option("--field", cfg.field_path, "field CSV to render");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (!grid_text.empty()) {
            GridSpec g = detail::parse_grid(grid_text);
            g.connectivity = connectivity == "8" ? Connectivity::eight : Connectivity::four;
            g.spacing = spacing;
            cfg.domain.grid = g;
        }
        if (delta_text != "auto") {
            double d = 0.0;
            if (!detail::parse_number(std::string_view(delta_text), d) || !(d > 0.0))
                throw InvalidArgument("--delta expects a positive number or 'auto'");
            cfg.delta = d;
        }
        cfg.method = parse_method(method);
        cfg.policy = policy == "lower" ? ExtensionPolicy::lower
                     : policy == "upper" ? ExtensionPolicy::upper
                                         : ExtensionPolicy::midpoint;
        cfg.generator = parse_generator(generator);
        if (mls_weight == "gaussian")
            cfg.mls.weight = GaussianWeight{mls_scale};
        else
            cfg.mls.weight = InversePowerWeight{mls_power, mls_epsilon};
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (check->parsed()) return cmd_check(cfg, out, err);
    if (fit->parsed()) return cmd_fit(cfg, out, err);
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    return cmd_render(cfg, out, err);
}

} // namespace gradvar
