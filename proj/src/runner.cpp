#include "niche/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "niche/io.hpp"
#include "niche/phantom.hpp"
#include "niche/validation.hpp"

namespace niche {

using nlohmann::json;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

void write_json(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json point_json(const Point& x) {
    json a = json::array();
    for (int k = 0; k < x.dim(); ++k) a.push_back(x[k]);
    return a;
}

json grid_json(const Lattice& L, const GridSpec& spec) {
    json cells = json::array();
    for (int k = 0; k < L.dim(); ++k) cells.push_back(L.interior_cells(k));
    return {{"dx", L.dx()}, {"band_width", spec.band_width}, {"band_cells", L.band()}, {"cells", cells}};
}

EnsembleConfig ensemble_config(const RunConfig& cfg, const HistogramGrid& grid) {
    EnsembleConfig ec;
    ec.params = cfg.params;
    ec.domain = cfg.domain;
    ec.particles = cfg.particles;
    ec.final_time = cfg.final_time;
    ec.snapshot_times = cfg.snapshots;
    ec.initial = cfg.initial.to_condition();
    ec.grid = grid;
    ec.seed = cfg.seed;
    ec.workers = std::max(1, cfg.workers);
    return ec;
}

EffectiveCoefficients coefficients(const RunConfig& cfg) {
    auto coeff = EffectiveCoefficients::from_process(cfg.params, cfg.domain.dim());
    if (cfg.alpha_override) coeff.alpha = *cfg.alpha_override;
    if (cfg.beta_override) coeff.beta = *cfg.beta_override;
    return coeff;
}

json entry_json(const ResidualEntry& e) {
    return {{"id", e.id},          {"computed", e.computed}, {"reference", e.reference},
            {"tolerance", e.tolerance}, {"pass", e.pass},    {"method", e.method},
            {"seed", e.seed}};
}

int run_simulate(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const auto grid = HistogramGrid::over_domain(cfg.domain, cfg.grid.dx);
    for (const auto& snap : run_ensemble(ensemble_config(cfg, grid))) {
        const std::string stem = "hist_step_" + std::to_string(snap.step);
        write_text_file(out_path(cfg, stem + ".csv"), histogram_csv(snap.histogram));
        write_json(out_path(cfg, stem + ".json"),
                   {{"step", snap.step}, {"time", snap.time}, {"particles", snap.histogram.total},
                    {"mean", point_json(snap.mean)}, {"variance", snap.variance}, {"seed", cfg.seed}});
        if (!quiet)
            log << "simulate step " << snap.step << " t=" << format_double(snap.time)
                << " variance=" << format_double(snap.variance) << "\n";
    }
    return 0;
}

int run_solve(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const auto coeff = coefficients(cfg);
    PdeSolver solver(cfg.domain, cfg.params.s(), coeff, cfg.grid);
    const auto snaps = solver.solve(solver.initial_field(cfg.initial.to_condition()), cfg.final_time, cfg.snapshots);
    for (const auto& snap : snaps) {
        const std::string stem = "field_step_" + std::to_string(snap.step);
        write_text_file(out_path(cfg, stem + ".csv"), field_csv(snap.field));
        write_json(out_path(cfg, stem + ".json"),
                   {{"step", snap.step},
                    {"time", snap.time},
                    {"dt", snap.dt},
                    {"mass", snap.mass},
                    {"neumann_local_residual", snap.neumann_local},
                    {"neumann_nonlocal_residual", snap.neumann_nonlocal},
                    {"alpha", coeff.alpha},
                    {"beta", coeff.beta},
                    {"grid", grid_json(solver.lattice(), cfg.grid)}});
        if (!quiet)
            log << "solve step " << snap.step << " t=" << format_double(snap.time)
                << " mass=" << format_double(snap.mass) << "\n";
    }
    return 0;
}

int run_phantom(const RunConfig& cfg, std::ostream& log, bool quiet) {
    PhantomConfig pc;
    pc.params = cfg.params;
    pc.domain = cfg.domain;
    pc.grid = cfg.grid;
    pc.final_time = cfg.final_time;
    pc.snapshot_times = cfg.snapshots;
    pc.initial = cfg.initial.to_condition();
    PhantomProcess process(pc);
    const auto probes = band_probes(process.lattice(), 50);
    for (const auto& snap : process.run()) {
        const auto residuals = neumann_nonlocal_residuals(snap.field, cfg.params.s(), probes);
        double worst = 0.0;
        for (double r : residuals) worst = std::max(worst, std::abs(r));
        const std::string stem = "phantom_step_" + std::to_string(snap.step);
        write_text_file(out_path(cfg, stem + ".csv"), field_csv(snap.field));
        write_text_file(out_path(cfg, "phantom_band_step_" + std::to_string(snap.step) + ".csv"),
                        band_csv(snap.field));
        write_json(out_path(cfg, stem + ".json"),
                   {{"step", snap.step},
                    {"time", snap.time},
                    {"mass", snap.mass},
                    {"extension_residual", worst},
                    {"grid", grid_json(process.lattice(), cfg.grid)}});
        if (!quiet)
            log << "phantom step " << snap.step << " t=" << format_double(snap.time)
                << " mass=" << format_double(snap.mass) << "\n";
    }
    return 0;
}

int run_compare(const RunConfig& cfg, std::ostream& log, bool quiet) {
    DensityTable hist, field;
    std::string source;
    if (!cfg.histogram_csv.empty()) {
        hist = read_density_csv(cfg.histogram_csv);
        field = read_density_csv(cfg.field_csv);
        source = "files";
    } else {
        PdeSolver solver(cfg.domain, cfg.params.s(), coefficients(cfg), cfg.grid);
        const auto grid = solver.lattice().interior_grid();
        RunConfig ens = cfg;
        ens.snapshots.clear();
        const auto particles = run_ensemble(ensemble_config(ens, grid)).back();
        const auto pde = solver.solve(solver.initial_field(cfg.initial.to_condition()), cfg.final_time, {}).back();
        write_text_file(out_path(cfg, "compare_histogram.csv"), histogram_csv(particles.histogram));
        write_text_file(out_path(cfg, "compare_field.csv"), field_csv(pde.field));
        hist = density_table(particles.histogram);
        field = density_table(pde.field);
        source = "computed";
    }
    const double l1 = l1_distance(hist, field);
    const bool pass = l1 <= cfg.compare_tolerance;
    write_json(out_path(cfg, "compare.json"),
               {{"l1", l1}, {"tolerance", cfg.compare_tolerance}, {"pass", pass}, {"source", source},
                {"seed", cfg.seed}});
    if (!quiet) log << "compare l1=" << format_double(l1) << (pass ? " pass" : " FAIL") << "\n";
    return pass ? 0 : 1;
}

int run_validate(const RunConfig& cfg, std::ostream& log, bool quiet) {
    ValidationSuiteConfig vc;
    vc.params = cfg.params;
    vc.domain = cfg.domain;
    vc.grid = cfg.grid;
    vc.final_time = cfg.final_time;
    vc.initial = cfg.initial.to_condition();
    vc.seed = cfg.seed;
    vc.c_star_samples = cfg.c_star_samples;
    const auto report = run_validation_suite(vc);
    json arr = json::array();
    for (const auto& e : report.entries) {
        arr.push_back(entry_json(e));
        if (!quiet)
            log << (e.pass ? "pass " : "FAIL ") << e.id << " computed=" << format_double(e.computed)
                << " reference=" << format_double(e.reference) << "\n";
    }
    write_json(out_path(cfg, "validation.json"), arr);
    return report.all_pass() ? 0 : 1;
}

int run_constants(const RunConfig& cfg, std::ostream& log, bool quiet) {
    json arr = json::array();
    for (int n = 1; n <= 3; ++n) {
        const auto hc = compute_c_star(n, cfg.c_star_samples, cfg.seed);
        arr.push_back({{"n", n},
                       {"c_o", compute_c_o(n)},
                       {"c_star", hc.c_star},
                       {"c_star_stderr", hc.c_star_stderr},
                       {"tangential", hc.tangential},
                       {"tangential_stderr", hc.tangential_stderr},
                       {"a_0", hc.a_0},
                       {"b_0", hc.b_0},
                       {"varpi", hc.varpi},
                       {"method", hc.method},
                       {"seed", cfg.seed}});
        if (!quiet)
            log << "constants n=" << n << " c_o=" << format_double(compute_c_o(n))
                << " c_star=" << format_double(hc.c_star) << "\n";
    }
    write_json(out_path(cfg, "constants.json"), arr);
    return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log, bool quiet) {
    switch (config.subcommand) {
        case Subcommand::Simulate: return run_simulate(config, log, quiet);
        case Subcommand::Solve: return run_solve(config, log, quiet);
        case Subcommand::Phantom: return run_phantom(config, log, quiet);
        case Subcommand::Compare: return run_compare(config, log, quiet);
        case Subcommand::Validate: return run_validate(config, log, quiet);
        case Subcommand::Constants: return run_constants(config, log, quiet);
    }
    return 0;
}

}  // namespace niche
