#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qip {

using Complex = std::complex<double>;

/// Dense statevector over n qubits, computational-basis order with
/// qubit 1 as the most significant bit. Constructed in |0...0>.
class StateVector {
public:
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, Eigen::VectorXcd amplitudes);

    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return amps_.size(); }
    Eigen::VectorXcd& amplitudes() { return amps_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    double squared_norm() const { return amps_.squaredNorm(); }

private:
    int n_qubits_;
    Eigen::VectorXcd amps_;
};

/// Circuit family: data re-uploading layers followed by variational
/// layers, one X rotation per qubit per layer, CNOT ring entanglers.
struct CircuitSpec {
    int n_qubits = 0;
    int n_reupload_layers = 0;
    int n_variational_layers = 0;
    // feature index -> qubit index (1-based); features are encoded only
    // on assigned qubits.
    std::vector<int> feature_assignment;

    int param_count() const {
        return n_qubits * (n_reupload_layers + n_variational_layers);
    }
    void validate() const;
};

using ParamVector = std::vector<double>;

void apply_rx(StateVector& state, int qubit, double theta);
void apply_rz(StateVector& state, int qubit, double x);
void apply_cnot(StateVector& state, int control, int target);

// CNOT(i, i+1) for i = 1..N-1, then the wrap gate CNOT(N, 1).
void apply_cnot_ring(StateVector& state);

StateVector run_circuit(const CircuitSpec& spec, const ParamVector& params,
                        std::span<const double> features);

/// |psi><psi| of a pure state.
Eigen::MatrixXcd density(const StateVector& state);

/// Reduced density matrix on the kept qubits (1-based indices, any
/// order; result ordered by ascending qubit index).
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int n_qubits,
                               const std::vector<int>& keep);

/// Twirling channel in the sigma_Z eigenbasis: zero the off-diagonal
/// entries, keep the diagonal.
Eigen::MatrixXcd dephase_z(const Eigen::MatrixXcd& rho);

/// Real parameterization of a density matrix: diagonal entries except
/// the last (implied by the trace), then (Re, Im) of the strict upper
/// triangle in row-major order. Length d^2 - 1.
std::vector<double> tomo_vec(const Eigen::MatrixXcd& rho);

double expect_z(const StateVector& state, int qubit);
double expect_y(const StateVector& state, int qubit);

}  // namespace qip
