#include "chronoclock/config.hpp"
#include "chronoclock/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace chronoclock;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, long seed_override,
            long threads_override) {
    Config cfg = Config::parse_file(config_path);
    if (!out_dir.empty()) cfg.set("experiment", "output_dir", out_dir);
    if (seed_override >= 0) cfg.set("experiment", "seed", std::to_string(seed_override));
    if (threads_override > 0) cfg.set("experiment", "threads", std::to_string(threads_override));

    const ExperimentConfig e = parse_experiment(cfg);
    const ComparisonReport rep = run_experiment(e);

    std::cout << "experiment finished\n"
              << "  l2_relative   = " << rep.l2_relative << "\n"
              << "  sup_relative  = " << rep.sup_relative << "\n"
              << "  mass sim/pred = " << rep.mass_simulated << " / " << rep.mass_predicted
              << "\n";
    for (const auto& [name, ok] : rep.pass)
        std::cout << "  " << name << ": " << (ok ? "pass" : "FAIL") << "\n";
    for (const auto& w : rep.warnings) std::cout << "  warning: " << w << "\n";
    std::cout << "  outputs in " << e.output_dir << "\n";
    return rep.all_pass() ? 0 : 1;
}

int cmd_pdx_check(const std::string& out_dir, long seed) {
    const auto rows = run_pdx_checks(static_cast<unsigned long>(seed < 0 ? 0 : seed));
    fs::create_directories(out_dir);
    write_pdx_table_csv((fs::path(out_dir) / "pdx_check.csv").string(), rows);
    bool all = true;
    for (const auto& r : rows) {
        std::printf("%-36s err=%-12.4g tol=%-8.3g %s\n", r.name.c_str(), r.error,
                    r.tolerance, r.pass ? "pass" : "FAIL");
        all = all && r.pass;
    }
    std::cout << "table written to " << (fs::path(out_dir) / "pdx_check.csv").string() << "\n";
    return all ? 0 : 1;
}

int cmd_resolution_scan(double lambda, double sigma_eps, double eps0, long n_points,
                        const std::string& out_dir) {
    const auto rows =
        run_resolution_scan(lambda, sigma_eps, eps0, static_cast<std::size_t>(n_points));
    fs::create_directories(out_dir);
    write_resolution_csv((fs::path(out_dir) / "resolution.csv").string(), rows);
    double max_err = 0.0;
    for (const auto& r : rows) max_err = std::max(max_err, std::abs(r.overlap_abs - r.analytic));
    std::cout << "max |overlap - gaussian law| = " << max_err << "\n"
              << "table written to " << (fs::path(out_dir) / "resolution.csv").string() << "\n";
    return 0;
}

int cmd_plot_data(const std::string& result_dir) {
    // Merge pointer.csv and predicted.csv into gnuplot-ready columns.
    auto read_csv = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::string line;
        std::getline(in, line); // header
        std::vector<std::pair<double, double>> rows;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            rows.emplace_back(std::stod(line.substr(0, comma)),
                              std::stod(line.substr(comma + 1)));
        }
        return rows;
    };
    const auto sim = read_csv((fs::path(result_dir) / "pointer.csv").string());
    const auto pred = read_csv((fs::path(result_dir) / "predicted.csv").string());
    if (sim.size() != pred.size())
        throw std::runtime_error("pointer.csv and predicted.csv have different lattices");
    const std::string out_path = (fs::path(result_dir) / "plot.dat").string();
    std::ofstream out(out_path, std::ios::binary);
    out << "# y  simulated  predicted\n";
    for (std::size_t i = 0; i < sim.size(); ++i)
        out << sim[i].first << ' ' << sim[i].second << ' ' << pred[i].second << '\n';
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chronoclock: idealized-clock arrival and dwell time experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, result_dir;
    long seed = -1, threads = 0, n_points = 512;
    double lambda = 0.0, sigma_eps = 0.0, eps0 = 1.0;

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");
    run->add_option("--seed", seed, "seed recorded in the report");
    run->add_option("--threads", threads, "worker threads for clock channels");

    auto* pdx = app.add_subcommand("pdx-check", "verify the propagator identities");
    pdx->add_option("--out", out_dir, "output directory")->default_str("out");
    pdx->add_option("--seed", seed, "seed for the random endpoint triples");

    auto* scan = app.add_subcommand("resolution-scan",
                                    "clock overlap vs the gaussian resolution law");
    scan->add_option("--lambda", lambda, "coupling strength")->required();
    scan->add_option("--sigma-eps", sigma_eps, "clock energy spread")->required();
    scan->add_option("--eps0", eps0, "clock energy center");
    scan->add_option("--n-points", n_points, "clock lattice size");
    scan->add_option("--out", out_dir, "output directory")->default_str("out");

    auto* plot = app.add_subcommand("plot-data", "merge result CSVs into gnuplot columns");
    plot->add_option("dir", result_dir, "experiment output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_dir, seed, threads);
        if (*pdx) return cmd_pdx_check(out_dir.empty() ? "out" : out_dir, seed);
        if (*scan)
            return cmd_resolution_scan(lambda, sigma_eps, eps0, n_points,
                                       out_dir.empty() ? "out" : out_dir);
        if (*plot) return cmd_plot_data(result_dir);
    } catch (const GuardError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
