#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "qiplane/data.hpp"

using namespace qip;

namespace {

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& name, const std::string& content)
        : path(name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("prng is deterministic and well ranged") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    // A different seed diverges immediately.
    Rng a2(42);
    CHECK(a2.uniform() != c.uniform());
    // Box-Muller normals have plausible first two moments.
    Rng n(7);
    double sum = 0.0, sumsq = 0.0;
    const int count = 20000;
    for (int i = 0; i < count; ++i) {
        const double x = n.normal();
        sum += x;
        sumsq += x * x;
    }
    CHECK(std::abs(sum / count) < 0.03);
    CHECK(std::abs(sumsq / count - 1.0) < 0.05);
}

TEST_CASE("gaussian clouds dataset shape and statistics") {
    const Dataset d = gen_clouds(1234);
    REQUIRE(d.size() == 800);
    REQUIRE(d.features.cols() == 3);

    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d.labels(i) > 0) ++pos;
        else ++neg;
    }
    CHECK(pos == 400);
    CHECK(neg == 400);

    // Clouds are blocks of 200 rows with z centered on a in {0, 2, 4, 6}
    // and unit-ish spread inherited from x through the half-weight tilt.
    for (int cloud = 0; cloud < 4; ++cloud) {
        double zx = 0.0, zmean = 0.0;
        for (int i = 0; i < 200; ++i) {
            const Eigen::Index r = cloud * 200 + i;
            zmean += d.features(r, 2);
            zx += d.features(r, 2) - 0.5 * d.features(r, 0);
        }
        zmean /= 200.0;
        zx /= 200.0;
        const double a = 2.0 * cloud;
        CHECK(std::abs(zmean - a) < 0.2);
        CHECK(zx == doctest::Approx(a).epsilon(1e-9));  // z - x/2 is exactly a
        const double expected_label = (cloud % 2 == 0) ? -1.0 : 1.0;
        CHECK(d.labels(cloud * 200) == expected_label);
    }

    CHECK(all_rows_distinct(d.features));
    // Regeneration with the same seed is bit-identical.
    const Dataset d2 = gen_clouds(1234);
    CHECK((d.features - d2.features).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regression surface is deterministic and bounded features") {
    const Dataset d = gen_regression(9, 128, 4);
    REQUIRE(d.size() == 128);
    REQUIRE(d.features.cols() == 4);
    CHECK(d.features.minCoeff() >= -1.0);
    CHECK(d.features.maxCoeff() <= 1.0);
    const Dataset d2 = gen_regression(9, 128, 4);
    CHECK((d.labels - d2.labels).cwiseAbs().maxCoeff() == 0.0);
    // Targets are a deterministic function of the features.
    for (Eigen::Index i = 0; i < 5; ++i) {
        const double expect = std::sin(std::numbers::pi * d.features(i, 0)) +
                              0.5 * d.features(i, 1) * d.features(i, 1) +
                              0.3 * std::cos(2.0 * d.features(i, 2)) +
                              0.2 * d.features(i, 3);
        CHECK(d.labels(i) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("csv loader parses numeric columns and labels") {
    TempCsv f("data_test_basic.csv",
              "a,b,target\n"
              "1.5,2,0\n"
              "-0.5,4,1\n"
              "3,6,0\n");
    CsvSchema schema;
    schema.label_column = "target";
    const Dataset d = load_csv(f.path, schema);
    REQUIRE(d.size() == 3);
    REQUIRE(d.features.cols() == 2);
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(d.features(0, 0) == doctest::Approx(1.5));
    CHECK(d.features(1, 0) == doctest::Approx(-0.5));
    CHECK(d.labels(1) == doctest::Approx(1.0));
    CHECK(d.rows_dropped == 0);
}

TEST_CASE("csv loader drops rows with missing cells and counts them") {
    TempCsv f("data_test_missing.csv",
              "a,b,target\n"
              "1,2,0\n"
              ",2,1\n"
              "3,NA,0\n"
              "4,nan,1\n"
              "5,6,1\n");
    CsvSchema schema;
    schema.label_column = "target";
    const Dataset d = load_csv(f.path, schema);
    CHECK(d.size() == 2);
    CHECK(d.rows_dropped == 3);
    CHECK(d.features(0, 0) == doctest::Approx(1.0));
    CHECK(d.features(1, 0) == doctest::Approx(5.0));
}

TEST_CASE("csv loader one-hot encodes categorical columns") {
    TempCsv f("data_test_cat.csv",
              "age,city,target\n"
              "30,rome,1\n"
              "40,oslo,0\n"
              "50,rome,1\n"
              "60,lima,0\n");
    CsvSchema schema;
    schema.label_column = "target";
    schema.categorical_columns = {"city"};
    const Dataset d = load_csv(f.path, schema);
    REQUIRE(d.size() == 4);
    // One numeric column plus one indicator per sorted category value.
    REQUIRE(d.features.cols() == 4);
    REQUIRE(d.feature_names.size() == 4);
    CHECK(d.feature_names[0] == "age");
    CHECK(d.feature_names[1] == "city=lima");
    CHECK(d.feature_names[2] == "city=oslo");
    CHECK(d.feature_names[3] == "city=rome");
    CHECK(d.features(0, 3) == doctest::Approx(1.0));  // rome
    CHECK(d.features(0, 1) == doctest::Approx(0.0));
    CHECK(d.features(1, 2) == doctest::Approx(1.0));  // oslo
    CHECK(d.features(3, 1) == doctest::Approx(1.0));  // lima
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(d.features.row(i).segment(1, 3).sum() == doctest::Approx(1.0));
    }
}

TEST_CASE("csv loader reports structural errors") {
    CsvSchema schema;
    schema.label_column = "target";
    CHECK_THROWS(load_csv("no_such_file_anywhere.csv", schema));

    TempCsv bad_label("data_test_badlabel.csv", "a,b\n1,2\n");
    CHECK_THROWS(load_csv(bad_label.path, schema));

    TempCsv bad_cell("data_test_badcell.csv", "a,target\nnot_a_number,1\n");
    CHECK_THROWS(load_csv(bad_cell.path, schema));

    TempCsv ragged("data_test_ragged.csv", "a,b,target\n1,2,0\n1,2\n");
    CHECK_THROWS(load_csv(ragged.path, schema));
}

TEST_CASE("min-max scaling maps the training range onto [0,1]") {
    Eigen::MatrixXd x(3, 3);
    x << 0.0, 10.0, 5.0,
         5.0, 20.0, 5.0,
         10.0, 30.0, 5.0;
    MinMaxScaler scaler;
    const Eigen::MatrixXd t = scaler.fit_transform(x);
    CHECK(t(0, 0) == doctest::Approx(0.0));
    CHECK(t(1, 0) == doctest::Approx(0.5));
    CHECK(t(2, 0) == doctest::Approx(1.0));
    CHECK(t(0, 1) == doctest::Approx(0.0));
    CHECK(t(2, 1) == doctest::Approx(1.0));
    // Constant columns map to 0 rather than dividing by zero.
    CHECK(t.col(2).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    // Values outside the fitted range extrapolate without clamping, so
    // the transform stays affine and leak-free.
    Eigen::MatrixXd fresh(1, 3);
    fresh << 20.0, 0.0, 9.0;
    const Eigen::MatrixXd ft = scaler.transform(fresh);
    CHECK(ft(0, 0) == doctest::Approx(2.0));
    CHECK(ft(0, 1) == doctest::Approx(-0.5));

    MinMaxScaler unfitted;
    CHECK_THROWS(unfitted.transform(x));
}

TEST_CASE("pca recovers an embedded low-rank structure") {
    // Points on a plane in 5D: x = s*u + t*v + mean with fixed u, v.
    Rng rng(5);
    Eigen::VectorXd u(5), v(5), mean(5);
    u << 1, 0, 1, 0, 1;
    v << 0, 1, 0, -1, 0;
    mean << 3, -1, 2, 0, 1;
    u.normalize();
    v.normalize();
    Eigen::MatrixXd x(200, 5);
    for (int i = 0; i < 200; ++i) {
        x.row(i) = (mean + 3.0 * rng.normal() * u + 1.0 * rng.normal() * v).transpose();
    }
    Pca pca;
    const Eigen::MatrixXd t = pca.fit_transform(x, 3);
    REQUIRE(t.cols() == 3);

    // Components are orthonormal and variances are sorted descending.
    const Eigen::MatrixXd c = pca.components();
    CHECK((c.transpose() * c - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
    const Eigen::VectorXd var = pca.explained_variance();
    CHECK(var(0) >= var(1));
    CHECK(var(1) >= var(2));
    // Rank is 2, so the third direction carries (numerically) nothing.
    CHECK(var(2) < 1e-10);
    CHECK(var(0) == doctest::Approx(t.col(0).squaredNorm() / (t.rows() - 1)).epsilon(1e-9));

    // Projections are centered and reconstruction on the plane is exact.
    CHECK(std::abs(t.col(0).mean()) < 1e-10);
    const Eigen::MatrixXd recon = t * c.transpose();
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    CHECK((recon - centered).norm() < 1e-8);

    // The same fit applied twice gives identical output (deterministic
    // sign convention).
    Pca pca2;
    const Eigen::MatrixXd t2 = pca2.fit_transform(x, 3);
    CHECK((t - t2).cwiseAbs().maxCoeff() == 0.0);

    Pca unfitted;
    CHECK_THROWS(unfitted.transform(x));
    Pca bad;
    CHECK_THROWS(bad.fit(x, 9));  // more components than columns
}

TEST_CASE("split slices shuffled rows into the requested fractions") {
    Dataset d;
    d.features.resize(10, 2);
    d.labels.resize(10);
    for (int i = 0; i < 10; ++i) {
        d.features(i, 0) = i;
        d.features(i, 1) = -i;
        d.labels(i) = i;
    }
    const auto parts = split(d, {0.8, 0.2}, 99);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].size() == 8);
    CHECK(parts[1].size() == 2);

    // Every source row lands in exactly one split.
    std::set<double> seen;
    for (const auto& p : parts) {
        for (Eigen::Index i = 0; i < p.size(); ++i) seen.insert(p.labels(i));
    }
    CHECK(seen.size() == 10);

    // Features travel with their labels.
    for (const auto& p : parts) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            CHECK(p.features(i, 0) == doctest::Approx(p.labels(i)));
        }
    }

    // Deterministic given the seed, different for another seed.
    const auto parts_again = split(d, {0.8, 0.2}, 99);
    CHECK((parts[0].labels - parts_again[0].labels).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS(split(d, {0.5, 0.6}, 1));
    CHECK_THROWS(split(d, {}, 1));
    CHECK_THROWS(split(d, {1.0, 0.0}, 1));  // zero fraction
    const auto three = split(d, {0.6, 0.2, 0.2}, 4);
    CHECK(three.size() == 3);
    CHECK(three[0].size() + three[1].size() + three[2].size() == 10);
}

TEST_CASE("row grouping identifies duplicate inputs") {
    Eigen::MatrixXd x(5, 2);
    x << 1, 2,
         3, 4,
         1, 2,
         5, 6,
         3, 4;
    CHECK_FALSE(all_rows_distinct(x));
    const auto ids = row_group_ids(x);
    REQUIRE(ids.size() == 5);
    CHECK(ids[0] == ids[2]);
    CHECK(ids[1] == ids[4]);
    CHECK(ids[0] != ids[1]);
    CHECK(ids[3] != ids[0]);
    CHECK(ids[3] != ids[1]);

    Eigen::MatrixXd y(3, 1);
    y << 1, 2, 3;
    CHECK(all_rows_distinct(y));
}
