#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qiplane/data.hpp"
#include "qiplane/qsim.hpp"

namespace qip {

struct PqcModel {
    CircuitSpec spec;
    ParamVector params;
    int readout_qubit = 1;
};

/// Expected sigma_Z value on the readout qubit after running the circuit.
double pqc_forward(const PqcModel& model, std::span<const double> features);

/// sign of pqc_forward; sign(0) -> +1.
int pqc_predict(const PqcModel& model, std::span<const double> features);

struct DenseNet {
    std::vector<int> dims;  // input, hidden..., output widths
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    double dropout_rate = 0.0;  // hidden activations only, training mode only
    enum class Output { Sigmoid, Identity } output = Output::Sigmoid;

    static DenseNet make(const std::vector<int>& dims, Output output,
                         double dropout_rate, Rng& rng);
    int n_params() const;
};

struct DenseCache {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> pre_activations;
    std::vector<Eigen::VectorXd> activations;  // post activation + dropout
    std::vector<Eigen::VectorXd> dropout_masks;
    bool valid = false;
};

/// Forward pass; dropout uses inverted scaling (mask / (1 - rate)) so
/// inference needs no rescaling. `rng` is only consumed when training
/// with a nonzero dropout rate.
Eigen::VectorXd dense_forward(const DenseNet& net, const Eigen::VectorXd& input,
                              bool training, Rng& rng, DenseCache* cache = nullptr);

struct DenseGrads {
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_biases;
    Eigen::VectorXd d_input;
};

/// Backward pass under the dropout masks fixed in `cache`.
/// `output_gradient` is dL/d(post-activation output).
DenseGrads dense_backward(const DenseNet& net, const DenseCache& cache,
                          const Eigen::VectorXd& output_gradient);

/// Classical front-end -> 3-qubit VQC with Z rotations and CNOT ring
/// entanglers -> per-qubit sigma_Y readout -> linear head.
struct HybridModel {
    DenseNet front;  // input -> 42 -> 3, ReLU activations, no dropout
    int vqc_qubits = 3;
    int vqc_layers = 3;
    // Trainable RZ offset per (layer, qubit). The front-net outputs enter
    // as additive angles in the first layer only.
    Eigen::MatrixXd vqc_offsets;
    // Fixed RX(pi/2) on each qubit before the first layer; without it all
    // RZ gates act trivially on |0...0> and the readout is constant.
    bool basis_change = true;
    DenseNet head;  // 3 -> 1, identity output

    static HybridModel make(int input_dim, Rng& rng);
    int n_params() const;
    std::vector<double> get_params() const;
    void set_params(std::span<const double> flat);
};

/// Per-qubit sigma_Y expectations of the VQC block for given input angles.
Eigen::VectorXd hybrid_vqc_readout(const HybridModel& model,
                                   const Eigen::VectorXd& angles);

double hybrid_forward(const HybridModel& model, const Eigen::VectorXd& features);

struct HybridGrads {
    DenseGrads front;
    Eigen::MatrixXd d_vqc_offsets;
    DenseGrads head;
    std::vector<double> flat() const;
};

/// Chain rule across the classical/quantum boundary; every VQC angle
/// gradient comes from the parameter-shift rule (+-pi/2 shifts).
HybridGrads hybrid_backward(const HybridModel& model,
                            const Eigen::VectorXd& features,
                            double output_gradient);

}  // namespace qip
