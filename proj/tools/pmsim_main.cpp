#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmsim/config.hpp"
#include "pmsim/io.hpp"

namespace fs = std::filesystem;
using namespace pmsim;

namespace {

std::function<double(double)> point_rate_fn(const RunConfig& cfg) {
    if (cfg.scan.scenario == Scenario::loss_only) {
        const double eta = cfg.point.eta;
        return [eta](double mu) { return lossonly_keyrate(eta, mu); };
    }
    const double eta = cfg.point.eta;
    const ImperfectionParams imp = cfg.scan.imperfections;
    return [eta, imp](double mu) { return noisy_keyrate(eta, mu, imp); };
}

int run_akr_scan(const RunConfig& cfg, const fs::path& out_dir) {
    std::vector<std::pair<int, fs::path>> sample_files;
    SampleObserver observer = nullptr;
    if (cfg.dump_samples) {
        observer = [&](int point, const std::vector<BeamParams>& beams,
                       const std::vector<double>& etas) {
            const fs::path path = out_dir / ("samples_point" + std::to_string(point) + ".csv");
            write_samples_csv(path.string(), beams, etas);
            sample_files.emplace_back(point, path);
        };
    }
    const std::vector<AkrPoint> points = akr_scan(cfg.scan, observer);
    const fs::path csv = out_dir / "akr_scan.csv";
    write_akr_csv(csv.string(), points);
    for (const auto& [point, path] : sample_files)
        std::cout << "wrote " << path.string() << " (" << cfg.scan.samples_per_point
                  << " samples, zenith point " << point << ")\n";
    std::cout << "wrote " << csv.string() << " (" << points.size() << " zenith points, "
              << (cfg.scan.scenario == Scenario::loss_only ? "loss-only" : "noisy") << ")\n";
    return 0;
}

int run_pdr(const RunConfig& cfg, const fs::path& out_dir) {
    const PdrResult result = pdr(cfg.scan, cfg.pdr.zenith_deg, cfg.pdr.fiber_km,
                                 cfg.pdr.n_samples, cfg.pdr.batch_size, cfg.pdr.round_digits);
    const fs::path csv = out_dir / "pdr.csv";
    write_pdr_csv(csv.string(), result);
    std::cout << "wrote " << csv.string() << " (" << result.rate_values.size()
              << " distinct rate values, spread " << format_value(result.spread()) << ")\n";
    return 0;
}

int run_beamwidth(const RunConfig& cfg, const fs::path& out_dir) {
    ScanSpec spec = cfg.scan;
    if (cfg.beamwidth.samples_per_point) spec.samples_per_point = *cfg.beamwidth.samples_per_point;
    std::vector<std::pair<std::string, AtmosphereCondition>> conds;
    conds.reserve(cfg.beamwidth.conditions.size());
    for (const std::string& label : cfg.beamwidth.conditions)
        conds.emplace_back(label, cfg.condition(label));
    const std::vector<BeamwidthRow> rows =
        transmittance_vs_beamwidth(spec, conds, cfg.beamwidth.w0_grid);
    const fs::path csv = out_dir / "beamwidth.csv";
    write_beamwidth_csv(csv.string(), rows);
    std::cout << "wrote " << csv.string() << " (" << cfg.beamwidth.w0_grid.size() << " widths x "
              << conds.size() << " conditions)\n";
    return 0;
}

int run_rate_point(const RunConfig& cfg, const fs::path& out_dir, bool dump_povm) {
    const double rate = point_rate_fn(cfg)(cfg.point.mu);
    const fs::path json = out_dir / "rate_point.json";
    write_text(json.string(),
               rate_point_json(cfg.point.eta, cfg.point.mu, cfg.scan.scenario,
                               cfg.scan.imperfections, rate));
    std::cout << "rate-point: eta=" << format_value(cfg.point.eta)
              << " mu=" << format_value(cfg.point.mu) << " rate=" << format_value(rate)
              << " -> " << json.string() << "\n";
    if (dump_povm) {
        const fs::path povm = out_dir / "povm.json";
        write_text(povm.string(), povm_debug_json(cfg.point.eta, cfg.point.mu,
                                                  cfg.scan.scenario, cfg.scan.imperfections));
        std::cout << "wrote " << povm.string() << " (measurement operators and announcement"
                  << " statistics)\n";
    }
    return 0;
}

int run_optimize_mu(const RunConfig& cfg) {
    const IntensityOptimum opt = optimize_intensity(point_rate_fn(cfg), cfg.scan.optimizer);
    std::cout << "optimize-mu: eta=" << format_value(cfg.point.eta)
              << " mu_star=" << format_value(opt.mu_star)
              << " rate_star=" << format_value(opt.rate_star) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic key-rate simulator for a twin-field style protocol over a hybrid"
                 " fiber and satellite down-link"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::uint64_t seed = 0;
    bool dump_povm = false;
    app.add_option("--config", config_path, "Run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (created if absent)");
    app.add_option("--workers", workers, "Worker threads (overrides config)")
        ->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides config)");
    app.add_flag("--dump-povm", dump_povm, "With rate-point: write povm.json debug dump");

    CLI::App* cmd_akr = app.add_subcommand("akr-scan", "Average key rate per zenith angle");
    CLI::App* cmd_pdr =
        app.add_subcommand("pdr", "Probability distribution of per-batch average key rates");
    CLI::App* cmd_bw =
        app.add_subcommand("beamwidth-scan", "Mean transmittance per initial beam width");
    CLI::App* cmd_rate = app.add_subcommand("rate-point", "Key rate at one (eta, mu) point");
    CLI::App* cmd_opt =
        app.add_subcommand("optimize-mu", "Best intensity and rate at fixed eta");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (workers > 0) cfg.scan.workers = workers;
        if (seed_opt->count() > 0) cfg.scan.seed = seed;

        const fs::path out(out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw std::runtime_error("cannot create output directory: " + out.string());

        if (cmd_akr->parsed()) return run_akr_scan(cfg, out);
        if (cmd_pdr->parsed()) return run_pdr(cfg, out);
        if (cmd_bw->parsed()) return run_beamwidth(cfg, out);
        if (cmd_rate->parsed()) return run_rate_point(cfg, out, dump_povm);
        if (cmd_opt->parsed()) return run_optimize_mu(cfg);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
