#include "qiplane/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <memory>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace qip {

namespace {

Experiment parse_experiment(const std::string& s) {
    if (s == "synthetic_classification") return Experiment::SYNTHETIC_CLASSIFICATION;
    if (s == "tabular_classification") return Experiment::TABULAR_CLASSIFICATION;
    if (s == "hybrid_regression") return Experiment::HYBRID_REGRESSION;
    if (s == "classical_nn") return Experiment::CLASSICAL_NN;
    throw std::runtime_error("unknown experiment: " + s);
}

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::SYNTHETIC_CLASSIFICATION: return "synthetic_classification";
        case Experiment::TABULAR_CLASSIFICATION: return "tabular_classification";
        case Experiment::HYBRID_REGRESSION: return "hybrid_regression";
        case Experiment::CLASSICAL_NN: return "classical_nn";
    }
    return "?";
}

std::string format_alpha(double alpha) {
    std::ostringstream ss;
    ss << alpha;
    std::string s = ss.str();
    for (auto& c : s) {
        if (c == '.') c = 'p';  // filename-safe
    }
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (alphas.empty()) throw std::invalid_argument("config: need at least one alpha");
    if (seeds.empty()) throw std::invalid_argument("config: need at least one seed");
    for (double a : alphas) {
        if (a < 0.0) throw std::invalid_argument("config: alpha must be >= 0");
    }
    if (binning.m_scalar < 2 || binning.b_component < 2) {
        throw std::invalid_argument("config: bin counts must be >= 2");
    }
    if (experiment == Experiment::TABULAR_CLASSIFICATION && csv_path.empty()) {
        throw std::invalid_argument("config: tabular experiment needs a csv path");
    }
    if (experiment == Experiment::HYBRID_REGRESSION &&
        train.task != Task::REGRESSION) {
        throw std::invalid_argument("config: hybrid experiment requires task=regression");
    }
    if ((experiment == Experiment::SYNTHETIC_CLASSIFICATION ||
         experiment == Experiment::TABULAR_CLASSIFICATION ||
         experiment == Experiment::CLASSICAL_NN) &&
        train.task != Task::CLASSIFICATION) {
        throw std::invalid_argument("config: classification experiment requires task=classification");
    }
}

ExperimentConfig experiment_config_from(const Config& cfg) {
    ExperimentConfig out;
    out.experiment = parse_experiment(cfg.get("", "experiment"));
    out.out_dir = cfg.get_or("", "out_dir", "results");
    out.threads = int(cfg.get_int_or("", "threads", 1));

    out.csv_path = cfg.get_or("data", "csv", "");
    out.csv_schema.label_column = cfg.get_or("data", "label_column", "label");
    if (cfg.has("data", "categorical")) {
        out.csv_schema.categorical_columns = cfg.get_list("data", "categorical");
    }
    out.data_seed = std::uint64_t(cfg.get_int_or("data", "seed", 1234));
    if (cfg.has("data", "split")) {
        out.split_fractions = cfg.get_double_list("data", "split");
    }
    out.pca_components = int(cfg.get_int_or("data", "pca_components", 0));
    out.minmax = cfg.get_or("data", "minmax", "on") != "off";
    out.feature_scale = cfg.get_double_or("data", "feature_scale", 1.0);

    out.n_qubits = int(cfg.get_int_or("model", "qubits", 4));
    out.n_reupload_layers = int(cfg.get_int_or("model", "reupload_layers", 3));
    out.n_variational_layers = int(cfg.get_int_or("model", "variational_layers", 2));
    const std::string metric = cfg.get_or("model", "metric", "accuracy");
    if (metric == "accuracy") out.metric = MetricKind::ACCURACY;
    else if (metric == "auc") out.metric = MetricKind::AUC;
    else if (metric == "r2") out.metric = MetricKind::R2;
    else throw std::runtime_error("unknown metric: " + metric);
    if (cfg.has("model", "dense_dims")) {
        for (double d : cfg.get_double_list("model", "dense_dims")) {
            out.dense_dims.push_back(int(d));
        }
    }
    out.dropout_rate = cfg.get_double_or("model", "dropout", 0.5);
    out.hybrid_basis_change = cfg.get_or("model", "basis_change", "on") != "off";

    out.train.learning_rate = cfg.get_double_or("train", "learning_rate", 0.05);
    out.train.epochs = int(cfg.get_int_or("train", "epochs", 100));
    out.train.batch_size = int(cfg.get_int_or("train", "batch_size", 32));
    const std::string opt = cfg.get_or("train", "optimizer", "sgd");
    if (opt == "sgd") out.train.optimizer = OptimizerKind::SGD;
    else if (opt == "adam") out.train.optimizer = OptimizerKind::ADAM;
    else throw std::runtime_error("unknown optimizer: " + opt);
    const std::string task = cfg.get_or("train", "task", "classification");
    if (task == "classification") out.train.task = Task::CLASSIFICATION;
    else if (task == "regression") out.train.task = Task::REGRESSION;
    else throw std::runtime_error("unknown task: " + task);
    const std::string mode = cfg.get_or("train", "feedback_mode", "scheduler");
    if (mode == "scheduler") out.train.feedback_mode = FeedbackMode::SCHEDULER;
    else if (mode == "loss_regularizer") out.train.feedback_mode = FeedbackMode::LOSS_REGULARIZER;
    else throw std::runtime_error("unknown feedback mode: " + mode);
    if (cfg.has("train", "early_stop_patience")) {
        out.train.early_stop_patience = int(cfg.get_int("train", "early_stop_patience"));
    }

    const std::string amode = cfg.get_or("alpha", "mode", "static");
    if (amode == "static") out.train.alpha.mode = AlphaMode::STATIC;
    else if (amode == "dynamic") out.train.alpha.mode = AlphaMode::DYNAMIC;
    else throw std::runtime_error("unknown alpha mode: " + amode);
    out.train.alpha.s_max = int(cfg.get_int_or("alpha", "s_max", 30));
    out.alphas = cfg.get_double_list("alpha", "values");

    for (const auto& s : cfg.get_list("sweep", "seeds")) {
        out.seeds.push_back(std::uint64_t(std::stoull(s)));
    }

    out.binning.m_scalar = int(cfg.get_int_or("binning", "m_scalar", 6));
    out.binning.b_component = int(cfg.get_int_or("binning", "b_component", 6));

    out.validate();
    return out;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_config_from(Config::parse_file(path));
}

PreparedData prepare_data(const ExperimentConfig& config) {
    Dataset full;
    switch (config.experiment) {
        case Experiment::SYNTHETIC_CLASSIFICATION:
            full = gen_clouds(config.data_seed);
            break;
        case Experiment::HYBRID_REGRESSION:
            if (config.csv_path.empty()) {
                full = gen_regression(config.data_seed);
            } else {
                full = load_csv(config.csv_path, config.csv_schema);
            }
            break;
        case Experiment::TABULAR_CLASSIFICATION:
            full = load_csv(config.csv_path, config.csv_schema);
            break;
        case Experiment::CLASSICAL_NN:
            if (config.csv_path.empty()) {
                full = gen_clouds(config.data_seed);
                // dense nets train on {0,1} targets
                full.labels = (full.labels.array() > 0.0).cast<double>();
            } else {
                full = load_csv(config.csv_path, config.csv_schema);
            }
            break;
    }

    auto splits = split(full, config.split_fractions, config.data_seed);
    PreparedData out;
    out.train = std::move(splits.front());
    out.test = std::move(splits.back());
    // Preprocessing statistics come from the train split only.
    if (config.minmax) {
        MinMaxScaler scaler;
        scaler.fit(out.train.features);
        out.train.features = scaler.transform(out.train.features);
        out.test.features = scaler.transform(out.test.features);
        for (size_t i = 1; i + 1 < splits.size(); ++i) {
            splits[i].features = scaler.transform(splits[i].features);
        }
    }
    if (config.pca_components > 0) {
        Pca pca;
        pca.fit(out.train.features, config.pca_components);
        out.train.features = pca.transform(out.train.features);
        out.test.features = pca.transform(out.test.features);
        for (size_t i = 1; i + 1 < splits.size(); ++i) {
            splits[i].features = pca.transform(splits[i].features);
        }
    }
    if (splits.size() > 2) {
        out.val = std::move(splits[1]);
    }
    if (config.feature_scale != 1.0) {
        out.train.features *= config.feature_scale;
        out.test.features *= config.feature_scale;
        if (out.val.size() > 0) out.val.features *= config.feature_scale;
    }
    return out;
}

namespace {

std::unique_ptr<Trainable> build_model(const ExperimentConfig& config,
                                       const PreparedData& data,
                                       std::uint64_t seed) {
    Rng rng(seed);
    const int d = int(data.train.features.cols());
    switch (config.experiment) {
        case Experiment::SYNTHETIC_CLASSIFICATION:
        case Experiment::TABULAR_CLASSIFICATION: {
            PqcModel model;
            model.spec.n_qubits = config.n_qubits;
            model.spec.n_reupload_layers = config.n_reupload_layers;
            model.spec.n_variational_layers = config.n_variational_layers;
            if (d > config.n_qubits) {
                throw std::invalid_argument("more features than qubits; add PCA");
            }
            for (int f = 0; f < d; ++f) model.spec.feature_assignment.push_back(f + 1);
            model.params.resize(size_t(model.spec.param_count()));
            for (auto& p : model.params) p = rng.uniform();
            return std::make_unique<PqcTrainable>(std::move(model), config.metric);
        }
        case Experiment::HYBRID_REGRESSION: {
            HybridModel model = HybridModel::make(d, rng);
            model.basis_change = config.hybrid_basis_change;
            return std::make_unique<HybridTrainable>(std::move(model));
        }
        case Experiment::CLASSICAL_NN: {
            std::vector<int> dims = config.dense_dims;
            if (dims.empty()) dims = {d, 36, 36, 1};
            dims.front() = d;
            DenseNet net = DenseNet::make(dims, DenseNet::Output::Sigmoid,
                                          config.dropout_rate, rng);
            return std::make_unique<DenseTrainable>(std::move(net));
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

CellResult run_cell(const ExperimentConfig& config, const PreparedData& data,
                    double alpha, std::uint64_t seed) {
    CellResult cell;
    cell.alpha = alpha;
    cell.seed = seed;
    cell.high_alpha_warning = alpha > config.alpha_warning_threshold;
    try {
        auto model = build_model(config, data, seed);
        TrainConfig tc = config.train;
        tc.alpha.alpha_max = alpha;
        tc.seed = seed;
        // With a three-way split the middle set is the monitor; the
        // held-out test set scores the final model.
        const Dataset& monitor = data.val.size() > 0 ? data.val : data.test;
        const auto result = fit(*model, data.train, monitor, tc, config.binning);
        cell.records = result.records;
        cell.trace = result.trace;
        cell.steps_to_converge = result.best_epoch;
        cell.batch_steps = result.best_batch_step;
        if (data.val.size() > 0) {
            const auto scores = model->predict(data.test.features);
            const std::vector<double> y(data.test.labels.begin(), data.test.labels.end());
            cell.best_metric = model->metric(y, scores);
        } else {
            cell.best_metric = result.best_test_metric;
        }
        const auto& best_rec = result.records[size_t(result.best_epoch - 1)];
        cell.train_test_ratio = best_rec.test_metric != 0.0
                                    ? best_rec.train_metric / best_rec.test_metric
                                    : 0.0;
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    return cell;
}

bool SweepResult::any_failed() const {
    for (const auto& c : cells) {
        if (!c.ok) return true;
    }
    return false;
}

SweepResult run(const ExperimentConfig& config) {
    config.validate();
    const PreparedData data = prepare_data(config);

    struct Cell {
        double alpha;
        std::uint64_t seed;
    };
    std::vector<Cell> grid;
    for (double a : config.alphas) {
        for (auto s : config.seeds) grid.push_back({a, s});
    }

    SweepResult result;
    result.config = config;
    result.cells.resize(grid.size());

    const int n_threads = std::max(1, config.threads);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            result.cells[i] = run_cell(config, data, grid[i].alpha, grid[i].seed);
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

std::vector<AggregateRow> aggregate(const SweepResult& result) {
    if (result.cells.empty()) throw std::invalid_argument("aggregate: empty result");
    std::vector<AggregateRow> rows;
    for (double alpha : result.config.alphas) {
        AggregateRow row;
        row.alpha = alpha;
        std::vector<double> metrics, steps, ratios;
        for (const auto& c : result.cells) {
            if (c.alpha != alpha || !c.ok) continue;
            metrics.push_back(c.best_metric);
            steps.push_back(double(c.steps_to_converge));
            ratios.push_back(c.train_test_ratio);
        }
        row.n_cells = int(metrics.size());
        if (!metrics.empty()) {
            auto mean = [](const std::vector<double>& v) {
                double s = 0.0;
                for (double x : v) s += x;
                return s / double(v.size());
            };
            auto sample_std = [&](const std::vector<double>& v, double m) {
                if (v.size() < 2) return 0.0;
                double s = 0.0;
                for (double x : v) s += (x - m) * (x - m);
                return std::sqrt(s / double(v.size() - 1));
            };
            row.mean_metric = mean(metrics);
            row.std_metric = sample_std(metrics, row.mean_metric);
            row.min_metric = *std::min_element(metrics.begin(), metrics.end());
            row.max_metric = *std::max_element(metrics.begin(), metrics.end());
            row.mean_steps = mean(steps);
            row.std_steps = sample_std(steps, row.mean_steps);
            row.mean_ratio = mean(ratios);
        }
        rows.push_back(row);
    }
    return rows;
}

void emit(const SweepResult& result, const std::string& outdir) {
    bool any_ok = false;
    for (const auto& c : result.cells) any_ok = any_ok || c.ok;
    if (!any_ok) throw std::runtime_error("emit: no completed cells");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + outdir);

    {
        std::ofstream out(outdir + "/sweep_summary.csv");
        if (!out) throw std::runtime_error("cannot write: " + outdir + "/sweep_summary.csv");
        out << "alpha,mean_metric,std_metric,min_metric,max_metric,mean_steps,"
               "std_steps,mean_ratio\n";
        out.precision(12);
        for (const auto& row : aggregate(result)) {
            out << row.alpha << ',' << row.mean_metric << ',' << row.std_metric << ','
                << row.min_metric << ',' << row.max_metric << ',' << row.mean_steps
                << ',' << row.std_steps << ',' << row.mean_ratio << '\n';
        }
    }

    nlohmann::json summary;
    summary["experiment"] = experiment_name(result.config.experiment);
    summary["alphas"] = result.config.alphas;
    summary["seeds"] = result.config.seeds;
    summary["cells"] = nlohmann::json::array();
    double best = 0.0;
    bool have_best = false;
    for (const auto& c : result.cells) {
        const std::string tag = format_alpha(c.alpha) + "_" + std::to_string(c.seed);
        nlohmann::json jc;
        jc["alpha"] = c.alpha;
        jc["seed"] = c.seed;
        jc["ok"] = c.ok;
        if (c.ok) {
            jc["best_metric"] = c.best_metric;
            jc["steps_to_converge_epochs"] = c.steps_to_converge;
            jc["steps_to_converge_batches"] = c.batch_steps;
            jc["train_test_ratio"] = c.train_test_ratio;
            write_epochs_csv(outdir + "/epochs_" + tag + ".csv", c.records);
            write_infoplane_csv(outdir + "/infoplane_" + tag + ".csv", c.trace);
            if (!have_best || c.best_metric > best) {
                best = c.best_metric;
                have_best = true;
            }
        } else {
            jc["error"] = c.error;
        }
        if (c.high_alpha_warning) jc["high_alpha_warning"] = true;
        summary["cells"].push_back(jc);
    }
    summary["best_metric"] = best;
    {
        std::ofstream out(outdir + "/summary.json");
        if (!out) throw std::runtime_error("cannot write: " + outdir + "/summary.json");
        out << summary.dump(2) << '\n';
    }
}

}  // namespace qip
