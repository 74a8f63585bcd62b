#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qiplane/data.hpp"
#include "qiplane/infoplane.hpp"
#include "qiplane/models.hpp"

namespace qip {

enum class AlphaMode { STATIC, DYNAMIC };

struct AlphaSchedule {
    AlphaMode mode = AlphaMode::STATIC;
    double alpha_max = 0.0;
    int s_max = 1;  // dynamic mode only
};

/// STATIC -> alpha_max; DYNAMIC -> (alpha_max+1)^(s/s_max) - 1 for
/// s <= s_max, alpha_max after.
double alpha_value(const AlphaSchedule& schedule, int s);

enum class OptimizerKind { SGD, ADAM };
enum class FeedbackMode { LOSS_REGULARIZER, SCHEDULER };
enum class Task { CLASSIFICATION, REGRESSION };

struct TrainConfig {
    double learning_rate = 0.05;
    int epochs = 100;
    int batch_size = 32;
    OptimizerKind optimizer = OptimizerKind::SGD;
    AlphaSchedule alpha;
    FeedbackMode feedback_mode = FeedbackMode::SCHEDULER;
    Task task = Task::CLASSIFICATION;
    std::optional<int> early_stop_patience;
    std::uint64_t seed = 0;
};

struct EpochRecord {
    int epoch = 0;
    double alpha = 0.0;
    double train_loss = 0.0;
    double comp_loss = 0.0;
    double train_metric = 0.0;
    double test_metric = 0.0;
};

// ---- losses ----

double mse_loss(std::span<const double> y, std::span<const double> yhat);
double bce_loss(std::span<const double> y01, std::span<const double> p);
double comp_loss_classification(double mi_data, double h_y);
double comp_loss_regression(double mi_data);
/// l_err * (1 + alpha * l_comp)
double combined_loss(double l_err, double alpha, double l_comp);

// ---- gradients / optimizers ----

/// Gradient of the MSE term for a PQC via the parameter-shift rule
/// (two circuit evaluations per parameter per sample).
std::vector<double> grad_pqc(const PqcModel& model, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y);

/// Both modes scale grad_err by (1 + alpha * l_comp). The binned MI is
/// piecewise constant in the parameters, so the extra product-rule term
/// of the regularized loss vanishes almost everywhere and the two modes
/// produce identical updates.
std::vector<double> feedback_step(std::span<const double> grad_err, double l_err,
                                  double alpha, double l_comp, FeedbackMode mode);

void sgd_step(std::span<double> params, std::span<const double> grad, double lr);

struct AdamState {
    std::vector<double> m, v;
    long long step = 0;
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double eps = 1e-8;
    void init(size_t n);
};

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad, double lr);

/// Deterministic pairwise tree reduction over per-sample contributions.
std::vector<double> pairwise_sum(const std::vector<std::vector<double>>& terms);

// ---- metrics ----

double accuracy(std::span<const double> y_true, std::span<const double> scores);
double roc_auc(std::span<const double> y_true, std::span<const double> scores);
double r2_score(std::span<const double> y_true, std::span<const double> yhat);

int steps_to_converge(const std::vector<EpochRecord>& records);

// ---- training loop ----

/// Model adapter used by the generic epoch loop.
class Trainable {
public:
    virtual ~Trainable() = default;
    virtual int n_params() const = 0;
    virtual std::vector<double> get_params() const = 0;
    virtual void set_params(std::span<const double> params) = 0;
    /// Raw scores (no dropout / inference mode).
    virtual std::vector<double> predict(const Eigen::MatrixXd& x) const = 0;
    /// L_Err on the batch and its gradient.
    virtual double loss_and_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 std::vector<double>& grad_out, Rng& rng) = 0;
    /// Probe records for this epoch; the first record's mi_data drives the
    /// compression feedback.
    virtual std::vector<InfoPlaneRecord> probes(const Eigen::MatrixXd& x,
                                                const std::vector<int>& label_bins,
                                                const BinningConfig& cfg,
                                                const std::vector<int>* x_groups,
                                                int epoch) const = 0;
    virtual double err_loss(std::span<const double> y,
                            std::span<const double> scores) const = 0;
    virtual double metric(std::span<const double> y,
                          std::span<const double> scores) const = 0;
};

enum class MetricKind { ACCURACY, AUC, R2 };

class PqcTrainable final : public Trainable {
public:
    explicit PqcTrainable(PqcModel model, MetricKind metric_kind = MetricKind::ACCURACY)
        : model_(std::move(model)), metric_kind_(metric_kind) {}
    PqcModel& model() { return model_; }
    int n_params() const override { return int(model_.params.size()); }
    std::vector<double> get_params() const override { return model_.params; }
    void set_params(std::span<const double> p) override {
        model_.params.assign(p.begin(), p.end());
    }
    std::vector<double> predict(const Eigen::MatrixXd& x) const override;
    double loss_and_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::vector<double>& grad_out, Rng& rng) override;
    std::vector<InfoPlaneRecord> probes(const Eigen::MatrixXd& x,
                                        const std::vector<int>& label_bins,
                                        const BinningConfig& cfg,
                                        const std::vector<int>* x_groups,
                                        int epoch) const override;
    double err_loss(std::span<const double> y,
                    std::span<const double> scores) const override;
    double metric(std::span<const double> y,
                  std::span<const double> scores) const override;

private:
    std::vector<StateVector> run_all(const Eigen::MatrixXd& x) const;
    PqcModel model_;
    MetricKind metric_kind_;
};

/// Binary classifier with {0,1} labels, BCE loss, sigmoid output.
/// Its compression probe bins the output probability over [0,1].
class DenseTrainable final : public Trainable {
public:
    explicit DenseTrainable(DenseNet net) : net_(std::move(net)) {}
    DenseNet& net() { return net_; }
    int n_params() const override { return net_.n_params(); }
    std::vector<double> get_params() const override;
    void set_params(std::span<const double> p) override;
    std::vector<double> predict(const Eigen::MatrixXd& x) const override;
    double loss_and_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::vector<double>& grad_out, Rng& rng) override;
    std::vector<InfoPlaneRecord> probes(const Eigen::MatrixXd& x,
                                        const std::vector<int>& label_bins,
                                        const BinningConfig& cfg,
                                        const std::vector<int>* x_groups,
                                        int epoch) const override;
    double err_loss(std::span<const double> y,
                    std::span<const double> scores) const override;
    double metric(std::span<const double> y,
                  std::span<const double> scores) const override;

private:
    DenseNet net_;
};

/// Regressor with MSE loss. Its compression probe bins the per-qubit
/// sigma_Y readout vector over [-1,1].
class HybridTrainable final : public Trainable {
public:
    explicit HybridTrainable(HybridModel model) : model_(std::move(model)) {}
    HybridModel& model() { return model_; }
    int n_params() const override { return model_.n_params(); }
    std::vector<double> get_params() const override { return model_.get_params(); }
    void set_params(std::span<const double> p) override { model_.set_params(p); }
    std::vector<double> predict(const Eigen::MatrixXd& x) const override;
    double loss_and_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::vector<double>& grad_out, Rng& rng) override;
    std::vector<InfoPlaneRecord> probes(const Eigen::MatrixXd& x,
                                        const std::vector<int>& label_bins,
                                        const BinningConfig& cfg,
                                        const std::vector<int>* x_groups,
                                        int epoch) const override;
    double err_loss(std::span<const double> y,
                    std::span<const double> scores) const override;
    double metric(std::span<const double> y,
                  std::span<const double> scores) const override;

private:
    HybridModel model_;
};

struct FitResult {
    std::vector<EpochRecord> records;
    InfoPlaneTrace trace;
    int best_epoch = 0;             // 1-based, first attainment of the max
    double best_test_metric = 0.0;
    long long best_batch_step = 0;  // optimizer steps completed at best_epoch
    int epochs_run = 0;
};

/// Per epoch: probe MI on the full training set, seeded shuffle,
/// minibatch parameter-shift/backprop gradients scaled by the
/// compression feedback, optimizer update, train/test metrics.
FitResult fit(Trainable& model, const Dataset& train, const Dataset& test,
              const TrainConfig& config, const BinningConfig& binning);

void write_epochs_csv(const std::string& path,
                      const std::vector<EpochRecord>& records);

}  // namespace qip
