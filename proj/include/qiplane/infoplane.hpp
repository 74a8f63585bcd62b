#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qiplane/qsim.hpp"

namespace qip {

struct BinningConfig {
    int m_scalar = 6;     // bins for the scalar readout probe, range [-1, 1]
    int b_component = 6;  // bins per tomo-vector component
};

enum class ProbeKind { T_ALL, T_1, T_1_Z };

const char* probe_name(ProbeKind kind);

struct InfoPlaneRecord {
    int epoch;
    ProbeKind probe;
    double mi_data;   // bits
    double mi_label;  // bits
};

using InfoPlaneTrace = std::vector<InfoPlaneRecord>;

/// 1 + floor(m*(t-lo)/(hi-lo)), clamped to [1, m].
int bin_scalar(double t, int m, double lo, double hi);

std::vector<int> bin_vector(std::span<const double> t, int b,
                            std::span<const std::pair<double, double>> ranges);

/// Shannon entropy in bits of the empirical distribution given by counts.
double entropy_bits(std::span<const std::int64_t> counts);

/// H(Z) from one discrete symbol per data point; equals I(Z:X) when all
/// underlying inputs are distinct and the encoding is deterministic.
double mi_deterministic(const std::vector<std::vector<int>>& symbols);

/// Plug-in I(Z:Y) = H(Z) + H(Y) - H(Z,Y).
double mi_joint(const std::vector<std::vector<int>>& z,
                const std::vector<int>& y);

/// Discrete symbol per sample for the given probe.
std::vector<std::vector<int>> probe_symbols(const std::vector<StateVector>& states,
                                            ProbeKind kind,
                                            const BinningConfig& cfg);

/// (I(T:X), I(T:Y)) for one probe. When x_group_ids is non-null the
/// inputs are not all distinct and the full joint formula is used for
/// the data term instead of the H(Z) shortcut.
std::pair<double, double> probe(const std::vector<StateVector>& states,
                                ProbeKind kind, const std::vector<int>& labels,
                                const BinningConfig& cfg,
                                const std::vector<int>* x_group_ids = nullptr);

void write_infoplane_csv(const std::string& path, const InfoPlaneTrace& trace);

}  // namespace qip
