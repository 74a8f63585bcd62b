#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qiplane/config.hpp"
#include "qiplane/data.hpp"
#include "qiplane/train.hpp"

namespace qip {

enum class Experiment {
    SYNTHETIC_CLASSIFICATION,
    TABULAR_CLASSIFICATION,
    HYBRID_REGRESSION,
    CLASSICAL_NN,
};

struct ExperimentConfig {
    Experiment experiment = Experiment::SYNTHETIC_CLASSIFICATION;

    // data
    std::string csv_path;  // tabular / classical experiments
    CsvSchema csv_schema;
    std::uint64_t data_seed = 1234;
    std::vector<double> split_fractions = {0.8, 0.2};
    int pca_components = 0;  // 0 = no PCA
    bool minmax = true;
    // Multiplies normalized features before the model sees them. Rotation
    // encodings need more than one radian of range to resolve several
    // feature bands.
    double feature_scale = 1.0;

    // model
    int n_qubits = 4;
    int n_reupload_layers = 3;
    int n_variational_layers = 2;
    MetricKind metric = MetricKind::ACCURACY;
    std::vector<int> dense_dims;  // classical NN
    double dropout_rate = 0.5;
    bool hybrid_basis_change = true;

    TrainConfig train;
    std::vector<double> alphas;
    std::vector<std::uint64_t> seeds;
    BinningConfig binning;
    std::string out_dir = "results";
    int threads = 1;

    // Cells with alpha above this get a stability warning annotation.
    double alpha_warning_threshold = 20.0;

    void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from(const Config& cfg);

struct CellResult {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double best_metric = 0.0;
    int steps_to_converge = 0;       // epochs, first attainment of the maximum
    long long batch_steps = 0;       // optimizer steps at that epoch
    double train_test_ratio = 0.0;   // train metric / test metric at best epoch
    bool high_alpha_warning = false;
    std::vector<EpochRecord> records;
    InfoPlaneTrace trace;
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<CellResult> cells;  // complete grid alphas x seeds
    bool any_failed() const;
};

/// Prepared splits with fitted preprocessing applied; shared by every
/// cell of a sweep.
struct PreparedData {
    Dataset train;
    Dataset val;  // empty unless a three-way split is configured
    Dataset test;
};

PreparedData prepare_data(const ExperimentConfig& config);

/// Run one grid cell (used by run(), exposed for tests).
CellResult run_cell(const ExperimentConfig& config, const PreparedData& data,
                    double alpha, std::uint64_t seed);

SweepResult run(const ExperimentConfig& config);

struct AggregateRow {
    double alpha = 0.0;
    int n_cells = 0;
    double mean_metric = 0.0, std_metric = 0.0, min_metric = 0.0, max_metric = 0.0;
    double mean_steps = 0.0, std_steps = 0.0;
    double mean_ratio = 0.0;
};

std::vector<AggregateRow> aggregate(const SweepResult& result);

/// Writes sweep_summary.csv, epochs_<alpha>_<seed>.csv,
/// infoplane_<alpha>_<seed>.csv and summary.json under outdir.
void emit(const SweepResult& result, const std::string& outdir);

}  // namespace qip
