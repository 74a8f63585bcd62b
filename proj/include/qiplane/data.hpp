#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qip {

struct Dataset {
    Eigen::MatrixXd features;  // n x d
    Eigen::VectorXd labels;    // +-1, {0,1}, or real targets
    std::vector<std::string> feature_names;
    int rows_dropped = 0;  // rows removed for missing values at load

    Eigen::Index size() const { return features.rows(); }
};

/// Four overlapping Gaussian clouds of 200 points each in 3D:
/// (x, y) ~ N(0, I), z = a + x*cos(60deg) with a in {0, 2, 4, 6}.
/// Clouds a in {0, 4} are labeled -1, clouds a in {2, 6} are +1.
Dataset gen_clouds(std::uint64_t seed);

/// Smooth synthetic regression surface for desk-scale hybrid runs.
Dataset gen_regression(std::uint64_t seed, int n_points = 256, int n_features = 4);

struct CsvSchema {
    std::string label_column;
    std::vector<std::string> categorical_columns;  // one-hot encoded
};

/// Comma-separated, header row required. Rows with missing cells
/// (empty, "NA", "nan") are dropped and counted in rows_dropped.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

class MinMaxScaler {
public:
    void fit(const Eigen::MatrixXd& train);
    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd fit_transform(const Eigen::MatrixXd& train);
    bool fitted() const { return fitted_; }

private:
    bool fitted_ = false;
    Eigen::VectorXd min_, range_;  // range 0 for constant columns -> maps to 0
};

class Pca {
public:
    void fit(const Eigen::MatrixXd& train, int k);
    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd fit_transform(const Eigen::MatrixXd& train, int k);
    const Eigen::VectorXd& explained_variance() const { return variances_; }
    const Eigen::MatrixXd& components() const { return components_; }
    bool fitted() const { return fitted_; }

private:
    bool fitted_ = false;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd components_;  // d x k, columns = descending eigenvalue order
    Eigen::VectorXd variances_;
};

/// Seeded shuffle then contiguous slicing; fractions must be positive
/// and sum to 1, every split must receive at least one row.
std::vector<Dataset> split(const Dataset& data, const std::vector<double>& fractions,
                           std::uint64_t seed);

bool all_rows_distinct(const Eigen::MatrixXd& x);

/// Group id per row; equal rows share an id. Used as the X variable in
/// the joint MI formula when inputs are not all distinct.
std::vector<int> row_group_ids(const Eigen::MatrixXd& x);

/// Uniform double in [0, 1) and a standard normal from an explicit
/// Box-Muller transform over a seeded 64-bit PRNG; deterministic across
/// platforms (no implementation-defined distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double normal();   // N(0, 1)

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qip
