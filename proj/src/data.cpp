#include "qiplane/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qip {

std::uint64_t Rng::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

Dataset gen_clouds(std::uint64_t seed) {
    Rng rng(seed);
    const double cos60 = 0.5;
    const double centers[4] = {0.0, 2.0, 4.0, 6.0};
    const double labels[4] = {-1.0, 1.0, -1.0, 1.0};
    const int per_cloud = 200;

    Dataset out;
    out.features.resize(4 * per_cloud, 3);
    out.labels.resize(4 * per_cloud);
    out.feature_names = {"x", "y", "z"};
    int row = 0;
    for (int c = 0; c < 4; ++c) {
        for (int i = 0; i < per_cloud; ++i, ++row) {
            const double x = rng.normal();
            const double y = rng.normal();
            out.features(row, 0) = x;
            out.features(row, 1) = y;
            out.features(row, 2) = centers[c] + x * cos60;
            out.labels(row) = labels[c];
        }
    }
    return out;
}

Dataset gen_regression(std::uint64_t seed, int n_points, int n_features) {
    Rng rng(seed);
    Dataset out;
    out.features.resize(n_points, n_features);
    out.labels.resize(n_points);
    for (int j = 0; j < n_features; ++j) {
        out.feature_names.push_back("f" + std::to_string(j));
    }
    for (int i = 0; i < n_points; ++i) {
        for (int j = 0; j < n_features; ++j) {
            out.features(i, j) = 2.0 * rng.uniform() - 1.0;
        }
        const auto r = out.features.row(i);
        double y = std::sin(std::numbers::pi * r(0)) + 0.5 * r(1) * r(1);
        if (n_features > 2) y += 0.3 * std::cos(2.0 * r(2));
        if (n_features > 3) y += 0.2 * r(3);
        out.labels(i) = y;
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "nan" || cell == "NaN";
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line);

    int label_idx = -1;
    std::vector<bool> categorical(header.size(), false);
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == schema.label_column) label_idx = int(i);
        for (const auto& c : schema.categorical_columns) {
            if (header[i] == c) categorical[i] = true;
        }
    }
    if (label_idx < 0) {
        throw std::runtime_error("label column not found: " + schema.label_column);
    }

    std::vector<std::vector<std::string>> rows;
    int dropped = 0;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(line_no) +
                                     ": wrong number of columns");
        }
        bool missing = false;
        for (const auto& c : cells) {
            if (is_missing(c)) missing = true;
        }
        if (missing) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw std::runtime_error("no usable rows in: " + path);

    // Category vocabularies, sorted for determinism.
    std::vector<std::vector<std::string>> vocab(header.size());
    for (size_t j = 0; j < header.size(); ++j) {
        if (!categorical[j]) continue;
        std::set<std::string> values;
        for (const auto& r : rows) values.insert(r[j]);
        vocab[j].assign(values.begin(), values.end());
    }

    Dataset out;
    out.rows_dropped = dropped;
    for (size_t j = 0; j < header.size(); ++j) {
        if (int(j) == label_idx) continue;
        if (categorical[j]) {
            for (const auto& v : vocab[j]) {
                out.feature_names.push_back(header[j] + "=" + v);
            }
        } else {
            out.feature_names.push_back(header[j]);
        }
    }

    out.features.resize(Eigen::Index(rows.size()),
                        Eigen::Index(out.feature_names.size()));
    out.labels.resize(Eigen::Index(rows.size()));

    auto parse_cell = [](const std::string& cell, size_t row, size_t col) {
        try {
            size_t pos = 0;
            const double v = std::stod(cell, &pos);
            if (pos != cell.size()) throw std::invalid_argument("trailing chars");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("unparseable cell at row " + std::to_string(row) +
                                     ", column " + std::to_string(col) + ": '" + cell + "'");
        }
    };

    for (size_t i = 0; i < rows.size(); ++i) {
        Eigen::Index col = 0;
        for (size_t j = 0; j < header.size(); ++j) {
            if (int(j) == label_idx) {
                out.labels(Eigen::Index(i)) = parse_cell(rows[i][j], i + 2, j + 1);
                continue;
            }
            if (categorical[j]) {
                for (const auto& v : vocab[j]) {
                    out.features(Eigen::Index(i), col++) = (rows[i][j] == v) ? 1.0 : 0.0;
                }
            } else {
                out.features(Eigen::Index(i), col++) = parse_cell(rows[i][j], i + 2, j + 1);
            }
        }
    }
    if (!out.features.allFinite() || !out.labels.allFinite()) {
        throw std::runtime_error("non-finite values after load: " + path);
    }
    return out;
}

void MinMaxScaler::fit(const Eigen::MatrixXd& train) {
    if (train.rows() < 1) throw std::invalid_argument("minmax: empty train set");
    min_ = train.colwise().minCoeff();
    range_ = train.colwise().maxCoeff().transpose() - min_;
    fitted_ = true;
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd& x) const {
    if (!fitted_) throw std::logic_error("minmax: transform before fit");
    if (x.cols() != min_.size()) throw std::invalid_argument("minmax: width mismatch");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (range_(j) == 0.0) {
            out.col(j).setZero();  // constant feature
        } else {
            out.col(j) = (x.col(j).array() - min_(j)) / range_(j);
        }
    }
    return out;
}

Eigen::MatrixXd MinMaxScaler::fit_transform(const Eigen::MatrixXd& train) {
    fit(train);
    return transform(train);
}

void Pca::fit(const Eigen::MatrixXd& train, int k) {
    if (train.rows() < 2) throw std::invalid_argument("pca: need at least 2 rows");
    if (k < 1 || k > train.cols()) throw std::invalid_argument("pca: invalid k");
    mean_ = train.colwise().mean();
    Eigen::MatrixXd centered = train.rowwise() - mean_.transpose();
    Eigen::MatrixXd cov =
        centered.transpose() * centered / double(train.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    // Eigen returns ascending eigenvalues; take the top k in descending order.
    components_.resize(train.cols(), k);
    variances_.resize(k);
    for (int i = 0; i < k; ++i) {
        const Eigen::Index src = train.cols() - 1 - i;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        // Fix the sign so the largest-magnitude loading is positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        components_.col(i) = v;
        variances_(i) = solver.eigenvalues()(src);
    }
    fitted_ = true;
}

Eigen::MatrixXd Pca::transform(const Eigen::MatrixXd& x) const {
    if (!fitted_) throw std::logic_error("pca: transform before fit");
    if (x.cols() != mean_.size()) throw std::invalid_argument("pca: width mismatch");
    return (x.rowwise() - mean_.transpose()) * components_;
}

Eigen::MatrixXd Pca::fit_transform(const Eigen::MatrixXd& train, int k) {
    fit(train, k);
    return transform(train);
}

std::vector<Dataset> split(const Dataset& data, const std::vector<double>& fractions,
                           std::uint64_t seed) {
    if (fractions.empty()) throw std::invalid_argument("split: no fractions");
    double sum = 0.0;
    for (double f : fractions) {
        if (f <= 0.0) throw std::invalid_argument("split: fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("split: fractions must sum to 1");
    }
    const Eigen::Index n = data.size();
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[size_t(i)] = i;
    // Fisher-Yates with an explicit PRNG so shuffles are portable.
    Rng rng(seed);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const Eigen::Index j = Eigen::Index(rng.next_u64() % std::uint64_t(i + 1));
        std::swap(idx[size_t(i)], idx[size_t(j)]);
    }

    std::vector<Dataset> out;
    Eigen::Index start = 0;
    for (size_t s = 0; s < fractions.size(); ++s) {
        Eigen::Index count = (s + 1 == fractions.size())
                                 ? n - start
                                 : Eigen::Index(std::llround(fractions[s] * double(n)));
        if (count < 1) throw std::invalid_argument("split: a split received 0 rows");
        Dataset part;
        part.features.resize(count, data.features.cols());
        part.labels.resize(count);
        part.feature_names = data.feature_names;
        for (Eigen::Index i = 0; i < count; ++i) {
            part.features.row(i) = data.features.row(idx[size_t(start + i)]);
            part.labels(i) = data.labels(idx[size_t(start + i)]);
        }
        out.push_back(std::move(part));
        start += count;
    }
    return out;
}

bool all_rows_distinct(const Eigen::MatrixXd& x) {
    const auto ids = row_group_ids(x);
    std::set<int> unique(ids.begin(), ids.end());
    return Eigen::Index(unique.size()) == x.rows();
}

std::vector<int> row_group_ids(const Eigen::MatrixXd& x) {
    std::map<std::vector<double>, int> seen;
    std::vector<int> ids;
    ids.reserve(size_t(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::vector<double> row(x.row(i).begin(), x.row(i).end());
        auto [it, inserted] = seen.emplace(std::move(row), int(seen.size()));
        ids.push_back(it->second);
    }
    return ids;
}

}  // namespace qip
