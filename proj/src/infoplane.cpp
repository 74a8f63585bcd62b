#include "qiplane/infoplane.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace qip {

const char* probe_name(ProbeKind kind) {
    switch (kind) {
        case ProbeKind::T_ALL: return "T_all";
        case ProbeKind::T_1: return "T_1";
        case ProbeKind::T_1_Z: return "T_1_Z";
    }
    return "?";
}

int bin_scalar(double t, int m, double lo, double hi) {
    if (!std::isfinite(t)) throw std::invalid_argument("bin_scalar: non-finite value");
    if (m < 2) throw std::invalid_argument("bin_scalar: m must be >= 2");
    if (!(lo < hi)) throw std::invalid_argument("bin_scalar: lo must be < hi");
    const int bin = 1 + int(std::floor(m * (t - lo) / (hi - lo)));
    return std::max(1, std::min(m, bin));
}

std::vector<int> bin_vector(std::span<const double> t, int b,
                            std::span<const std::pair<double, double>> ranges) {
    if (t.size() != ranges.size()) {
        throw std::invalid_argument("bin_vector: ranges length mismatch");
    }
    std::vector<int> out(t.size());
    for (size_t i = 0; i < t.size(); ++i) {
        out[i] = bin_scalar(t[i], b, ranges[i].first, ranges[i].second);
    }
    return out;
}

double entropy_bits(std::span<const std::int64_t> counts) {
    std::int64_t total = 0;
    for (auto c : counts) {
        if (c < 0) throw std::invalid_argument("entropy: negative count");
        total += c;
    }
    if (total == 0) throw std::invalid_argument("entropy: all-zero counts");
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = double(c) / double(total);
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

template <typename Key>
std::vector<std::int64_t> count_values(const std::vector<Key>& keys) {
    std::map<Key, std::int64_t> counts;
    for (const auto& k : keys) ++counts[k];
    std::vector<std::int64_t> out;
    out.reserve(counts.size());
    for (const auto& [k, c] : counts) out.push_back(c);
    return out;
}

}  // namespace

double mi_deterministic(const std::vector<std::vector<int>>& symbols) {
    if (symbols.empty()) throw std::invalid_argument("mi_deterministic: empty dataset");
    auto counts = count_values(symbols);
    return entropy_bits(counts);
}

double mi_joint(const std::vector<std::vector<int>>& z, const std::vector<int>& y) {
    if (z.size() != y.size()) throw std::invalid_argument("mi_joint: length mismatch");
    if (z.empty()) throw std::invalid_argument("mi_joint: empty dataset");
    const double hz = entropy_bits(count_values(z));
    const double hy = entropy_bits(count_values(y));
    std::vector<std::pair<std::vector<int>, int>> joint(z.size());
    for (size_t i = 0; i < z.size(); ++i) joint[i] = {z[i], y[i]};
    const double hzy = entropy_bits(count_values(joint));
    const double mi = hz + hy - hzy;
    return mi < 0.0 ? 0.0 : mi;
}

std::vector<std::vector<int>> probe_symbols(const std::vector<StateVector>& states,
                                            ProbeKind kind,
                                            const BinningConfig& cfg) {
    if (states.empty()) throw std::invalid_argument("probe: no states");
    const int n = states.front().n_qubits();

    auto tomo_ranges = [](Eigen::Index d) {
        // Diagonal slots live in [0,1]; Re/Im off-diagonal slots in [-1/2, 1/2].
        std::vector<std::pair<double, double>> ranges;
        for (Eigen::Index i = 0; i < d - 1; ++i) ranges.emplace_back(0.0, 1.0);
        for (Eigen::Index i = 0; i < d * (d - 1); ++i) ranges.emplace_back(-0.5, 0.5);
        return ranges;
    };

    std::vector<std::vector<int>> symbols;
    symbols.reserve(states.size());
    for (const auto& s : states) {
        switch (kind) {
            case ProbeKind::T_1_Z:
                symbols.push_back({bin_scalar(expect_z(s, 1), cfg.m_scalar, -1.0, 1.0)});
                break;
            case ProbeKind::T_1: {
                const auto rho1 = partial_trace(density(s), n, {1});
                const auto t = tomo_vec(rho1);
                const auto ranges = tomo_ranges(2);
                symbols.push_back(bin_vector(t, cfg.b_component, ranges));
                break;
            }
            case ProbeKind::T_ALL: {
                const auto t = tomo_vec(density(s));
                const auto ranges = tomo_ranges(Eigen::Index(1) << n);
                symbols.push_back(bin_vector(t, cfg.b_component, ranges));
                break;
            }
        }
    }
    return symbols;
}

std::pair<double, double> probe(const std::vector<StateVector>& states,
                                ProbeKind kind, const std::vector<int>& labels,
                                const BinningConfig& cfg,
                                const std::vector<int>* x_group_ids) {
    if (states.size() != labels.size()) {
        throw std::invalid_argument("probe: label count mismatch");
    }
    const auto symbols = probe_symbols(states, kind, cfg);
    double mi_data;
    if (x_group_ids != nullptr) {
        mi_data = mi_joint(symbols, *x_group_ids);
    } else {
        mi_data = mi_deterministic(symbols);
    }
    const double mi_label = mi_joint(symbols, labels);
    return {mi_data, mi_label};
}

void write_infoplane_csv(const std::string& path, const InfoPlaneTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "epoch,probe,mi_data_bits,mi_label_bits\n";
    out.precision(12);
    for (const auto& r : trace) {
        out << r.epoch << ',' << probe_name(r.probe) << ',' << r.mi_data << ','
            << r.mi_label << '\n';
    }
}

}  // namespace qip
