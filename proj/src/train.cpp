#include "qiplane/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qip {

double alpha_value(const AlphaSchedule& schedule, int s) {
    if (s < 0) throw std::invalid_argument("alpha_value: s must be >= 0");
    if (schedule.mode == AlphaMode::STATIC) return schedule.alpha_max;
    if (schedule.s_max < 1) throw std::invalid_argument("alpha_value: s_max must be >= 1");
    if (s >= schedule.s_max) return schedule.alpha_max;
    return std::pow(schedule.alpha_max + 1.0, double(s) / double(schedule.s_max)) - 1.0;
}

double mse_loss(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw std::invalid_argument("mse: length mismatch");
    if (y.empty()) throw std::invalid_argument("mse: empty input");
    double sum = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        sum += d * d;
    }
    return sum / double(y.size());
}

double bce_loss(std::span<const double> y01, std::span<const double> p) {
    if (y01.size() != p.size()) throw std::invalid_argument("bce: length mismatch");
    if (y01.empty()) throw std::invalid_argument("bce: empty input");
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double pc = std::clamp(p[i], 1e-12, 1.0 - 1e-12);
        sum -= y01[i] * std::log(pc) + (1.0 - y01[i]) * std::log(1.0 - pc);
    }
    return sum / double(p.size());
}

double comp_loss_classification(double mi_data, double h_y) {
    const double d = mi_data - h_y;
    return d * d;
}

double comp_loss_regression(double mi_data) { return mi_data; }

double combined_loss(double l_err, double alpha, double l_comp) {
    return l_err * (1.0 + alpha * l_comp);
}

std::vector<double> pairwise_sum(const std::vector<std::vector<double>>& terms) {
    if (terms.empty()) throw std::invalid_argument("pairwise_sum: no terms");
    std::vector<std::vector<double>> level = terms;
    while (level.size() > 1) {
        std::vector<std::vector<double>> next;
        for (size_t i = 0; i + 1 < level.size(); i += 2) {
            std::vector<double> s = level[i];
            for (size_t k = 0; k < s.size(); ++k) s[k] += level[i + 1][k];
            next.push_back(std::move(s));
        }
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
    }
    return level.front();
}

std::vector<double> grad_pqc(const PqcModel& model, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y) {
    if (x.rows() == 0) throw std::invalid_argument("grad_pqc: empty batch");
    if (x.rows() != y.size()) throw std::invalid_argument("grad_pqc: label mismatch");
    const size_t n_params = model.params.size();
    const double shift = std::numbers::pi / 2.0;

    std::vector<std::vector<double>> per_sample;
    per_sample.reserve(size_t(x.rows()));
    PqcModel shifted = model;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::vector<double> features(x.row(i).begin(), x.row(i).end());
        const double yhat = pqc_forward(model, features);
        const double resid = 2.0 * (yhat - y(i)) / double(x.rows());
        std::vector<double> g(n_params);
        for (size_t k = 0; k < n_params; ++k) {
            shifted.params[k] = model.params[k] + shift;
            const double plus = pqc_forward(shifted, features);
            shifted.params[k] = model.params[k] - shift;
            const double minus = pqc_forward(shifted, features);
            shifted.params[k] = model.params[k];
            g[k] = resid * (plus - minus) / 2.0;
        }
        per_sample.push_back(std::move(g));
    }
    return pairwise_sum(per_sample);
}

std::vector<double> feedback_step(std::span<const double> grad_err, double l_err,
                                  double alpha, double l_comp, FeedbackMode mode) {
    (void)l_err;  // the compression-term gradient vanishes under binning,
    (void)mode;   // so LOSS_REGULARIZER and SCHEDULER coincide
    if (alpha < 0.0) throw std::invalid_argument("feedback_step: alpha must be >= 0");
    const double scale = 1.0 + alpha * l_comp;
    std::vector<double> out(grad_err.begin(), grad_err.end());
    for (auto& g : out) g *= scale;
    return out;
}

void sgd_step(std::span<double> params, std::span<const double> grad, double lr) {
    if (params.size() != grad.size()) throw std::invalid_argument("sgd: shape mismatch");
    for (size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

void AdamState::init(size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    step = 0;
}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad, double lr) {
    if (params.size() != grad.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam: shape mismatch");
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(AdamState::beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(AdamState::beta2, double(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = AdamState::beta1 * state.m[i] + (1.0 - AdamState::beta1) * grad[i];
        state.v[i] =
            AdamState::beta2 * state.v[i] + (1.0 - AdamState::beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + AdamState::eps);
    }
}

double accuracy(std::span<const double> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) throw std::invalid_argument("accuracy: length mismatch");
    if (y_true.empty()) throw std::invalid_argument("accuracy: empty input");
    size_t hits = 0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        const int pred = scores[i] >= 0.0 ? 1 : -1;
        const int truth = y_true[i] > 0.0 ? 1 : -1;
        if (pred == truth) ++hits;
    }
    return double(hits) / double(y_true.size());
}

double roc_auc(std::span<const double> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) throw std::invalid_argument("auc: length mismatch");
    const size_t n = y_true.size();
    size_t n_pos = 0;
    for (double y : y_true) {
        if (y > 0.0) ++n_pos;
    }
    const size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("auc: both classes must be present");
    }
    // Rank statistic with ties averaged; equivalent to the trapezoid
    // rule over all score thresholds.
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = (double(i + 1) + double(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg_rank;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (size_t k = 0; k < n; ++k) {
        if (y_true[k] > 0.0) rank_sum_pos += rank[k];
    }
    return (rank_sum_pos - double(n_pos) * double(n_pos + 1) / 2.0) /
           (double(n_pos) * double(n_neg));
}

double r2_score(std::span<const double> y_true, std::span<const double> yhat) {
    if (y_true.size() != yhat.size()) throw std::invalid_argument("r2: length mismatch");
    if (y_true.empty()) throw std::invalid_argument("r2: empty input");
    const double mean =
        std::accumulate(y_true.begin(), y_true.end(), 0.0) / double(y_true.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        ss_res += (y_true[i] - yhat[i]) * (y_true[i] - yhat[i]);
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
    }
    if (ss_tot == 0.0) throw std::invalid_argument("r2: undefined for constant targets");
    return 1.0 - ss_res / ss_tot;
}

int steps_to_converge(const std::vector<EpochRecord>& records) {
    if (records.empty()) throw std::invalid_argument("steps_to_converge: no records");
    double best = records.front().test_metric;
    int best_epoch = 1;
    for (size_t i = 1; i < records.size(); ++i) {
        if (records[i].test_metric > best) {
            best = records[i].test_metric;
            best_epoch = int(i) + 1;
        }
    }
    return best_epoch;
}

// ---- PqcTrainable ----

std::vector<StateVector> PqcTrainable::run_all(const Eigen::MatrixXd& x) const {
    std::vector<StateVector> states;
    states.reserve(size_t(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::vector<double> features(x.row(i).begin(), x.row(i).end());
        states.push_back(run_circuit(model_.spec, model_.params, features));
    }
    return states;
}

std::vector<double> PqcTrainable::predict(const Eigen::MatrixXd& x) const {
    std::vector<double> out;
    out.reserve(size_t(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::vector<double> features(x.row(i).begin(), x.row(i).end());
        out.push_back(pqc_forward(model_, features));
    }
    return out;
}

double PqcTrainable::loss_and_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   std::vector<double>& grad_out, Rng&) {
    grad_out = grad_pqc(model_, x, y);
    const auto scores = predict(x);
    std::vector<double> yv(y.begin(), y.end());
    return mse_loss(yv, scores);
}

std::vector<InfoPlaneRecord> PqcTrainable::probes(const Eigen::MatrixXd& x,
                                                  const std::vector<int>& label_bins,
                                                  const BinningConfig& cfg,
                                                  const std::vector<int>* x_groups,
                                                  int epoch) const {
    const auto states = run_all(x);
    std::vector<InfoPlaneRecord> out;
    std::vector<ProbeKind> kinds = {ProbeKind::T_1_Z};
    // The full-state probe costs O(4^n) per sample; only record the
    // richer probes for small circuits.
    if (model_.spec.n_qubits <= 6) {
        kinds.push_back(ProbeKind::T_1);
        kinds.push_back(ProbeKind::T_ALL);
    }
    for (auto kind : kinds) {
        const auto [mi_data, mi_label] = probe(states, kind, label_bins, cfg, x_groups);
        out.push_back({epoch, kind, mi_data, mi_label});
    }
    return out;
}

double PqcTrainable::err_loss(std::span<const double> y,
                              std::span<const double> scores) const {
    return mse_loss(y, scores);
}

double PqcTrainable::metric(std::span<const double> y,
                            std::span<const double> scores) const {
    switch (metric_kind_) {
        case MetricKind::AUC: return roc_auc(y, scores);
        case MetricKind::R2: return r2_score(y, scores);
        case MetricKind::ACCURACY: break;
    }
    return accuracy(y, scores);
}

// ---- DenseTrainable ----

std::vector<double> DenseTrainable::get_params() const {
    std::vector<double> out;
    for (size_t l = 0; l < net_.weights.size(); ++l) {
        out.insert(out.end(), net_.weights[l].data(),
                   net_.weights[l].data() + net_.weights[l].size());
        out.insert(out.end(), net_.biases[l].data(),
                   net_.biases[l].data() + net_.biases[l].size());
    }
    return out;
}

void DenseTrainable::set_params(std::span<const double> p) {
    if (int(p.size()) != n_params()) {
        throw std::invalid_argument("dense: parameter count mismatch");
    }
    size_t pos = 0;
    for (size_t l = 0; l < net_.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < net_.weights[l].size(); ++i) {
            net_.weights[l].data()[i] = p[pos++];
        }
        for (Eigen::Index i = 0; i < net_.biases[l].size(); ++i) {
            net_.biases[l].data()[i] = p[pos++];
        }
    }
}

std::vector<double> DenseTrainable::predict(const Eigen::MatrixXd& x) const {
    Rng rng(0);
    std::vector<double> out;
    out.reserve(size_t(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out.push_back(dense_forward(net_, x.row(i).transpose(), false, rng)(0));
    }
    return out;
}

double DenseTrainable::loss_and_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     std::vector<double>& grad_out, Rng& rng) {
    const Eigen::Index n = x.rows();
    if (n == 0) throw std::invalid_argument("dense: empty batch");
    std::vector<std::vector<double>> per_sample;
    per_sample.reserve(size_t(n));
    std::vector<double> probs(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        DenseCache cache;
        const double p = dense_forward(net_, x.row(i).transpose(), true, rng, &cache)(0);
        probs[size_t(i)] = p;
        // BCE with sigmoid output: dL/dz = (p - y)/n, fold through
        // dL/dp = (p - y) / (p (1 - p)) / n.
        const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
        Eigen::VectorXd dout(1);
        dout(0) = (pc - y(i)) / (pc * (1.0 - pc)) / double(n);
        const auto g = dense_backward(net_, cache, dout);
        std::vector<double> flat;
        for (size_t l = 0; l < g.d_weights.size(); ++l) {
            flat.insert(flat.end(), g.d_weights[l].data(),
                        g.d_weights[l].data() + g.d_weights[l].size());
            flat.insert(flat.end(), g.d_biases[l].data(),
                        g.d_biases[l].data() + g.d_biases[l].size());
        }
        per_sample.push_back(std::move(flat));
    }
    grad_out = pairwise_sum(per_sample);
    std::vector<double> yv(y.begin(), y.end());
    return bce_loss(yv, probs);
}

std::vector<InfoPlaneRecord> DenseTrainable::probes(const Eigen::MatrixXd& x,
                                                    const std::vector<int>& label_bins,
                                                    const BinningConfig& cfg,
                                                    const std::vector<int>* x_groups,
                                                    int epoch) const {
    const auto scores = predict(x);
    std::vector<std::vector<int>> symbols;
    symbols.reserve(scores.size());
    for (double p : scores) symbols.push_back({bin_scalar(p, cfg.m_scalar, 0.0, 1.0)});
    const double mi_data =
        x_groups ? mi_joint(symbols, *x_groups) : mi_deterministic(symbols);
    const double mi_label = mi_joint(symbols, label_bins);
    return {{epoch, ProbeKind::T_1_Z, mi_data, mi_label}};
}

double DenseTrainable::err_loss(std::span<const double> y,
                                std::span<const double> scores) const {
    return bce_loss(y, scores);
}

double DenseTrainable::metric(std::span<const double> y,
                              std::span<const double> scores) const {
    size_t hits = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if ((scores[i] >= 0.5) == (y[i] >= 0.5)) ++hits;
    }
    return double(hits) / double(y.size());
}

// ---- HybridTrainable ----

std::vector<double> HybridTrainable::predict(const Eigen::MatrixXd& x) const {
    std::vector<double> out;
    out.reserve(size_t(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out.push_back(hybrid_forward(model_, x.row(i).transpose()));
    }
    return out;
}

double HybridTrainable::loss_and_grad(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      std::vector<double>& grad_out, Rng&) {
    const Eigen::Index n = x.rows();
    if (n == 0) throw std::invalid_argument("hybrid: empty batch");
    std::vector<std::vector<double>> per_sample;
    per_sample.reserve(size_t(n));
    std::vector<double> preds(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yhat = hybrid_forward(model_, x.row(i).transpose());
        preds[size_t(i)] = yhat;
        const double dout = 2.0 * (yhat - y(i)) / double(n);
        per_sample.push_back(hybrid_backward(model_, x.row(i).transpose(), dout).flat());
    }
    grad_out = pairwise_sum(per_sample);
    std::vector<double> yv(y.begin(), y.end());
    return mse_loss(yv, preds);
}

std::vector<InfoPlaneRecord> HybridTrainable::probes(const Eigen::MatrixXd& x,
                                                     const std::vector<int>& label_bins,
                                                     const BinningConfig& cfg,
                                                     const std::vector<int>* x_groups,
                                                     int epoch) const {
    Rng rng(0);
    std::vector<std::vector<int>> symbols;
    symbols.reserve(size_t(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto angles =
            dense_forward(model_.front, x.row(i).transpose(), false, rng).cwiseMax(0.0);
        const auto readout = hybrid_vqc_readout(model_, angles);
        std::vector<int> sym(size_t(readout.size()));
        for (Eigen::Index q = 0; q < readout.size(); ++q) {
            sym[size_t(q)] = bin_scalar(readout(q), cfg.m_scalar, -1.0, 1.0);
        }
        symbols.push_back(std::move(sym));
    }
    const double mi_data =
        x_groups ? mi_joint(symbols, *x_groups) : mi_deterministic(symbols);
    const double mi_label = mi_joint(symbols, label_bins);
    return {{epoch, ProbeKind::T_1_Z, mi_data, mi_label}};
}

double HybridTrainable::err_loss(std::span<const double> y,
                                 std::span<const double> scores) const {
    return mse_loss(y, scores);
}

double HybridTrainable::metric(std::span<const double> y,
                               std::span<const double> scores) const {
    return r2_score(y, scores);
}

// ---- fit ----

namespace {

std::vector<int> make_label_bins(const Eigen::VectorXd& y, Task task,
                                 const BinningConfig& cfg) {
    std::vector<int> bins(size_t(y.size()));
    if (task == Task::CLASSIFICATION) {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            bins[size_t(i)] = y(i) > 0.5 ? 1 : (y(i) < -0.5 ? -1 : 0);
        }
    } else {
        const double lo = y.minCoeff();
        const double hi = y.maxCoeff();
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            bins[size_t(i)] =
                (hi > lo) ? bin_scalar(y(i), cfg.m_scalar, lo, hi) : 1;
        }
    }
    return bins;
}

double label_entropy(const std::vector<int>& bins) {
    std::map<int, std::int64_t> counts;
    for (int b : bins) ++counts[b];
    std::vector<std::int64_t> c;
    for (const auto& [k, v] : counts) c.push_back(v);
    return entropy_bits(c);
}

}  // namespace

FitResult fit(Trainable& model, const Dataset& train, const Dataset& test,
              const TrainConfig& config, const BinningConfig& binning) {
    if (train.size() == 0 || test.size() == 0) {
        throw std::invalid_argument("fit: empty train or test split");
    }
    if (config.batch_size < 1) throw std::invalid_argument("fit: batch_size must be >= 1");
    if (config.early_stop_patience && *config.early_stop_patience < 1) {
        throw std::invalid_argument("fit: patience must be >= 1");
    }

    const auto train_label_bins = make_label_bins(train.labels, config.task, binning);
    const double h_y = label_entropy(train_label_bins);

    const bool distinct = all_rows_distinct(train.features);
    std::vector<int> x_groups;
    if (!distinct) x_groups = row_group_ids(train.features);
    const std::vector<int>* x_groups_ptr = distinct ? nullptr : &x_groups;

    Rng rng(config.seed);
    AdamState adam;
    adam.init(size_t(model.n_params()));

    const std::vector<double> y_train(train.labels.begin(), train.labels.end());
    const std::vector<double> y_test(test.labels.begin(), test.labels.end());

    FitResult result;
    long long batch_steps = 0;
    double best_metric = -std::numeric_limits<double>::infinity();
    int epochs_since_best = 0;

    std::vector<Eigen::Index> order(size_t(train.size()));
    std::iota(order.begin(), order.end(), Eigen::Index(0));

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        // Probe MI once per epoch on the full training set, pre-update.
        const auto probe_records =
            model.probes(train.features, train_label_bins, binning, x_groups_ptr, epoch);
        for (const auto& r : probe_records) result.trace.push_back(r);
        const double mi_data = probe_records.front().mi_data;
        const double l_comp = (config.task == Task::CLASSIFICATION)
                                  ? comp_loss_classification(mi_data, h_y)
                                  : comp_loss_regression(mi_data);
        const double alpha = alpha_value(config.alpha, epoch - 1);

        // Seeded Fisher-Yates shuffle, portable across platforms.
        for (size_t i = order.size() - 1; i > 0; --i) {
            const size_t j = size_t(rng.next_u64() % std::uint64_t(i + 1));
            std::swap(order[i], order[j]);
        }

        for (size_t start = 0; start < order.size(); start += size_t(config.batch_size)) {
            const size_t count = std::min(size_t(config.batch_size), order.size() - start);
            Eigen::MatrixXd bx(Eigen::Index(count), train.features.cols());
            Eigen::VectorXd by(static_cast<Eigen::Index>(count));
            for (size_t i = 0; i < count; ++i) {
                bx.row(Eigen::Index(i)) = train.features.row(order[start + i]);
                by(Eigen::Index(i)) = train.labels(order[start + i]);
            }
            std::vector<double> grad;
            const double l_err = model.loss_and_grad(bx, by, grad, rng);
            const auto eff_grad =
                feedback_step(grad, l_err, alpha, l_comp, config.feedback_mode);
            auto params = model.get_params();
            if (config.optimizer == OptimizerKind::SGD) {
                sgd_step(params, eff_grad, config.learning_rate);
            } else {
                adam_step(adam, params, eff_grad, config.learning_rate);
            }
            model.set_params(params);
            ++batch_steps;
        }

        const auto train_scores = model.predict(train.features);
        const auto test_scores = model.predict(test.features);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.alpha = alpha;
        rec.comp_loss = l_comp;
        rec.train_loss = model.err_loss(y_train, train_scores);
        rec.train_metric = model.metric(y_train, train_scores);
        rec.test_metric = model.metric(y_test, test_scores);
        result.records.push_back(rec);
        result.epochs_run = epoch;

        if (rec.test_metric > best_metric) {
            best_metric = rec.test_metric;
            result.best_epoch = epoch;
            result.best_test_metric = best_metric;
            result.best_batch_step = batch_steps;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
        }
        if (config.early_stop_patience && epochs_since_best >= *config.early_stop_patience) {
            break;
        }
    }
    return result;
}

void write_epochs_csv(const std::string& path,
                      const std::vector<EpochRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "epoch,alpha,train_loss,comp_loss,train_metric,test_metric\n";
    out.precision(12);
    for (const auto& r : records) {
        out << r.epoch << ',' << r.alpha << ',' << r.train_loss << ',' << r.comp_loss
            << ',' << r.train_metric << ',' << r.test_metric << '\n';
    }
}

}  // namespace qip
