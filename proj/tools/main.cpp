#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qiplane/data.hpp"
#include "qiplane/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, int threads_override,
            const std::string& out_override, long long seed_override) {
    qip::ExperimentConfig config = qip::load_experiment_config(config_path);
    if (threads_override > 0) config.threads = threads_override;
    if (!out_override.empty()) config.out_dir = out_override;
    if (seed_override >= 0) {
        config.seeds = {std::uint64_t(seed_override)};
    }
    const auto result = qip::run(config);
    qip::emit(result, config.out_dir);
    int failed = 0;
    for (const auto& cell : result.cells) {
        if (!cell.ok) {
            ++failed;
            std::cerr << "cell alpha=" << cell.alpha << " seed=" << cell.seed
                      << " failed: " << cell.error << "\n";
        }
    }
    std::cout << "sweep complete: " << result.cells.size() - size_t(failed) << "/"
              << result.cells.size() << " cells ok, results in " << config.out_dir
              << "\n";
    return failed == 0 ? 0 : 1;
}

int cmd_gen_data(const std::string& experiment, std::uint64_t seed,
                 const std::string& out_path) {
    qip::Dataset data;
    if (experiment == "synthetic") {
        data = qip::gen_clouds(seed);
    } else if (experiment == "regression") {
        data = qip::gen_regression(seed);
    } else {
        std::cerr << "unknown experiment for gen-data: " << experiment << "\n";
        return 1;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write: " << out_path << "\n";
        return 1;
    }
    for (const auto& name : data.feature_names) out << name << ',';
    out << "label\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
            out << data.features(i, j) << ',';
        }
        out << data.labels(i) << '\n';
    }
    std::cout << "wrote " << data.size() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_report(const std::string& result_dir) {
    std::ifstream in(result_dir + "/summary.json");
    if (!in) {
        std::cerr << "no summary.json in " << result_dir << "\n";
        return 1;
    }
    nlohmann::json summary;
    in >> summary;
    std::cout << "experiment: " << summary["experiment"].get<std::string>() << "\n";
    std::cout << "best metric: " << summary["best_metric"].get<double>() << "\n";
    std::cout << "alpha    seed    metric    steps\n";
    for (const auto& cell : summary["cells"]) {
        if (!cell["ok"].get<bool>()) {
            std::cout << cell["alpha"].get<double>() << "  " << cell["seed"]
                      << "  FAILED: " << cell["error"].get<std::string>() << "\n";
            continue;
        }
        std::cout << cell["alpha"].get<double>() << "  " << cell["seed"].get<std::uint64_t>()
                  << "  " << cell["best_metric"].get<double>() << "  "
                  << cell["steps_to_converge_epochs"].get<int>();
        if (cell.contains("high_alpha_warning")) std::cout << "  [high-alpha]";
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-plane instrumented variational circuit experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, gen_experiment = "synthetic", gen_out, result_dir;
    int threads = 0;
    long long seed_override = -1;
    std::uint64_t gen_seed = 1234;

    auto* run = app.add_subcommand("run", "execute a sweep from a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--threads", threads, "parallel worker slots for grid cells");
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--seed-override", seed_override, "replace the seed list with one seed");

    auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset as CSV");
    gen->add_option("--experiment", gen_experiment, "synthetic | regression");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output CSV path")->required();

    auto* report = app.add_subcommand("report", "print a summary of a result directory");
    report->add_option("dir", result_dir, "result directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, threads, out_dir, seed_override);
        if (gen->parsed()) return cmd_gen_data(gen_experiment, gen_seed, gen_out);
        if (report->parsed()) return cmd_report(result_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
