#include "qiplane/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qip {

namespace {

constexpr Complex kImag{0.0, 1.0};

void check_qubit(int qubit, int n_qubits) {
    if (qubit < 1 || qubit > n_qubits) {
        throw std::out_of_range("qubit index out of range: " +
                                std::to_string(qubit));
    }
}

// Bit position of a 1-based qubit index (qubit 1 = most significant).
inline int bit_of(int qubit, int n_qubits) { return n_qubits - qubit; }

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 24) {
        throw std::invalid_argument("n_qubits must be in [1, 24]");
    }
    amps_ = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_qubits);
    amps_(0) = 1.0;
}

StateVector::StateVector(int n_qubits, Eigen::VectorXcd amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (amps_.size() != (Eigen::Index(1) << n_qubits)) {
        throw std::invalid_argument("amplitude length must be 2^n_qubits");
    }
}

void CircuitSpec::validate() const {
    if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
    if (n_reupload_layers < 0 || n_variational_layers < 0) {
        throw std::invalid_argument("layer counts must be nonnegative");
    }
    std::vector<bool> used(size_t(n_qubits) + 1, false);
    for (int q : feature_assignment) {
        if (q < 1 || q > n_qubits) {
            throw std::invalid_argument("feature assigned to qubit out of range");
        }
        if (used[size_t(q)]) {
            throw std::invalid_argument("feature assignment qubits must be distinct");
        }
        used[size_t(q)] = true;
    }
}

void apply_rx(StateVector& state, int qubit, double theta) {
    check_qubit(qubit, state.n_qubits());
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
    const double c = std::cos(theta / 2.0);
    const Complex ms = -kImag * std::sin(theta / 2.0);
    auto& a = state.amplitudes();
    const Eigen::Index stride = Eigen::Index(1) << bit_of(qubit, state.n_qubits());
    for (Eigen::Index base = 0; base < a.size(); base += 2 * stride) {
        for (Eigen::Index k = base; k < base + stride; ++k) {
            const Complex a0 = a(k);
            const Complex a1 = a(k + stride);
            a(k) = c * a0 + ms * a1;
            a(k + stride) = ms * a0 + c * a1;
        }
    }
}

void apply_rz(StateVector& state, int qubit, double x) {
    check_qubit(qubit, state.n_qubits());
    if (!std::isfinite(x)) throw std::invalid_argument("angle must be finite");
    const Complex p0 = std::exp(-kImag * (x / 2.0));
    const Complex p1 = std::exp(kImag * (x / 2.0));
    auto& a = state.amplitudes();
    const Eigen::Index stride = Eigen::Index(1) << bit_of(qubit, state.n_qubits());
    for (Eigen::Index base = 0; base < a.size(); base += 2 * stride) {
        for (Eigen::Index k = base; k < base + stride; ++k) {
            a(k) *= p0;
            a(k + stride) *= p1;
        }
    }
}

void apply_cnot(StateVector& state, int control, int target) {
    check_qubit(control, state.n_qubits());
    check_qubit(target, state.n_qubits());
    if (control == target) throw std::invalid_argument("control equals target");
    auto& a = state.amplitudes();
    const Eigen::Index cmask = Eigen::Index(1) << bit_of(control, state.n_qubits());
    const Eigen::Index tmask = Eigen::Index(1) << bit_of(target, state.n_qubits());
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if ((k & cmask) && !(k & tmask)) {
            std::swap(a(k), a(k | tmask));
        }
    }
}

void apply_cnot_ring(StateVector& state) {
    const int n = state.n_qubits();
    if (n < 2) throw std::invalid_argument("CNOT ring needs at least 2 qubits");
    for (int q = 1; q < n; ++q) apply_cnot(state, q, q + 1);
    apply_cnot(state, n, 1);
}

StateVector run_circuit(const CircuitSpec& spec, const ParamVector& params,
                        std::span<const double> features) {
    spec.validate();
    if (int(params.size()) != spec.param_count()) {
        throw std::invalid_argument("parameter count mismatch: expected " +
                                    std::to_string(spec.param_count()) + ", got " +
                                    std::to_string(params.size()));
    }
    if (features.size() != spec.feature_assignment.size()) {
        throw std::invalid_argument("feature count mismatch");
    }
    StateVector state(spec.n_qubits);
    size_t k = 0;
    for (int layer = 0; layer < spec.n_reupload_layers; ++layer) {
        for (int q = 1; q <= spec.n_qubits; ++q) apply_rx(state, q, params[k++]);
        for (size_t f = 0; f < features.size(); ++f) {
            apply_rz(state, spec.feature_assignment[f], features[f]);
        }
        if (spec.n_qubits > 1) apply_cnot_ring(state);
    }
    for (int layer = 0; layer < spec.n_variational_layers; ++layer) {
        for (int q = 1; q <= spec.n_qubits; ++q) apply_rx(state, q, params[k++]);
        if (spec.n_qubits > 1) apply_cnot_ring(state);
    }
    return state;
}

Eigen::MatrixXcd density(const StateVector& state) {
    const auto& a = state.amplitudes();
    return a * a.adjoint();
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int n_qubits,
                               const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("keep set must be nonempty");
    if (rho.rows() != rho.cols() ||
        rho.rows() != (Eigen::Index(1) << n_qubits)) {
        throw std::invalid_argument("density matrix dimension mismatch");
    }
    std::vector<int> kept = keep;
    std::sort(kept.begin(), kept.end());
    if (std::unique(kept.begin(), kept.end()) != kept.end()) {
        throw std::invalid_argument("duplicate qubit in keep set");
    }
    for (int q : kept) check_qubit(q, n_qubits);

    std::vector<int> kept_bits;  // full-index bit positions, MSB-first
    for (int q : kept) kept_bits.push_back(bit_of(q, n_qubits));
    std::vector<int> junk_bits;
    for (int b = n_qubits - 1; b >= 0; --b) {
        if (std::find(kept_bits.begin(), kept_bits.end(), b) == kept_bits.end()) {
            junk_bits.push_back(b);
        }
    }

    const int nk = int(kept_bits.size());
    const int nj = int(junk_bits.size());
    const Eigen::Index dk = Eigen::Index(1) << nk;
    const Eigen::Index dj = Eigen::Index(1) << nj;

    auto scatter = [](Eigen::Index value, const std::vector<int>& bits) {
        Eigen::Index out = 0;
        for (size_t i = 0; i < bits.size(); ++i) {
            if (value & (Eigen::Index(1) << (bits.size() - 1 - i))) {
                out |= Eigen::Index(1) << bits[i];
            }
        }
        return out;
    };

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    for (Eigen::Index ri = 0; ri < dk; ++ri) {
        const Eigen::Index fi = scatter(ri, kept_bits);
        for (Eigen::Index rj = 0; rj < dk; ++rj) {
            const Eigen::Index fj = scatter(rj, kept_bits);
            Complex sum = 0.0;
            for (Eigen::Index e = 0; e < dj; ++e) {
                const Eigen::Index fe = scatter(e, junk_bits);
                sum += rho(fi | fe, fj | fe);
            }
            out(ri, rj) = sum;
        }
    }
    return out;
}

Eigen::MatrixXcd dephase_z(const Eigen::MatrixXcd& rho) {
    return rho.diagonal().asDiagonal();
}

std::vector<double> tomo_vec(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("density matrix must be square");
    }
    const Eigen::Index d = rho.rows();
    std::vector<double> out;
    out.reserve(size_t(d * d - 1));
    for (Eigen::Index i = 0; i < d - 1; ++i) out.push_back(rho(i, i).real());
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            out.push_back(rho(i, j).real());
            out.push_back(rho(i, j).imag());
        }
    }
    return out;
}

double expect_z(const StateVector& state, int qubit) {
    check_qubit(qubit, state.n_qubits());
    const auto& a = state.amplitudes();
    const Eigen::Index mask = Eigen::Index(1) << bit_of(qubit, state.n_qubits());
    double val = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double p = std::norm(a(k));
        val += (k & mask) ? -p : p;
    }
    return val;
}

double expect_y(const StateVector& state, int qubit) {
    check_qubit(qubit, state.n_qubits());
    // <Y> = -2 Im(rho_01) of the single-qubit marginal.
    const auto& a = state.amplitudes();
    const Eigen::Index mask = Eigen::Index(1) << bit_of(qubit, state.n_qubits());
    Complex rho01 = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if (!(k & mask)) rho01 += a(k) * std::conj(a(k | mask));
    }
    return -2.0 * rho01.imag();
}

}  // namespace qip
