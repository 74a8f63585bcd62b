#include "qiplane/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qip {

double pqc_forward(const PqcModel& model, std::span<const double> features) {
    if (model.readout_qubit < 1 || model.readout_qubit > model.spec.n_qubits) {
        throw std::out_of_range("readout qubit out of range");
    }
    const auto state = run_circuit(model.spec, model.params, features);
    return expect_z(state, model.readout_qubit);
}

int pqc_predict(const PqcModel& model, std::span<const double> features) {
    return pqc_forward(model, features) >= 0.0 ? 1 : -1;
}

DenseNet DenseNet::make(const std::vector<int>& dims, Output output,
                        double dropout_rate, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("dense net needs >= 2 dims");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw std::invalid_argument("dropout rate must be in [0, 1)");
    }
    DenseNet net;
    net.dims = dims;
    net.output = output;
    net.dropout_rate = dropout_rate;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        // Glorot-style uniform init.
        const double limit = std::sqrt(6.0 / double(dims[l] + dims[l + 1]));
        Eigen::MatrixXd w(dims[l + 1], dims[l]);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w.data()[i] = limit * (2.0 * rng.uniform() - 1.0);
        }
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    return net;
}

int DenseNet::n_params() const {
    int n = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
        n += int(weights[l].size() + biases[l].size());
    }
    return n;
}

Eigen::VectorXd dense_forward(const DenseNet& net, const Eigen::VectorXd& input,
                              bool training, Rng& rng, DenseCache* cache) {
    if (input.size() != net.dims.front()) {
        throw std::invalid_argument("dense_forward: input width mismatch");
    }
    if (cache) {
        *cache = DenseCache{};
        cache->input = input;
    }
    Eigen::VectorXd a = input;
    const size_t n_layers = net.weights.size();
    for (size_t l = 0; l < n_layers; ++l) {
        Eigen::VectorXd z = net.weights[l] * a + net.biases[l];
        if (cache) cache->pre_activations.push_back(z);
        const bool is_output = (l + 1 == n_layers);
        if (is_output) {
            switch (net.output) {
                case DenseNet::Output::Sigmoid:
                    a = (1.0 / (1.0 + (-z.array()).exp())).matrix();
                    break;
                case DenseNet::Output::Identity:
                    a = z;
                    break;
            }
            if (cache) cache->dropout_masks.emplace_back();  // none on output
        } else {
            a = z.cwiseMax(0.0);
            if (training && net.dropout_rate > 0.0) {
                const double keep = 1.0 - net.dropout_rate;
                Eigen::VectorXd mask(a.size());
                for (Eigen::Index i = 0; i < a.size(); ++i) {
                    mask(i) = (rng.uniform() < keep) ? 1.0 / keep : 0.0;
                }
                a = a.cwiseProduct(mask);
                if (cache) cache->dropout_masks.push_back(std::move(mask));
            } else if (cache) {
                cache->dropout_masks.emplace_back();
            }
        }
        if (cache) cache->activations.push_back(a);
    }
    if (cache) cache->valid = true;
    return a;
}

DenseGrads dense_backward(const DenseNet& net, const DenseCache& cache,
                          const Eigen::VectorXd& output_gradient) {
    if (!cache.valid || cache.activations.size() != net.weights.size()) {
        throw std::logic_error("dense_backward: stale or missing cache");
    }
    const size_t n_layers = net.weights.size();
    DenseGrads grads;
    grads.d_weights.resize(n_layers);
    grads.d_biases.resize(n_layers);

    // delta = dL/d(pre-activation of output layer)
    Eigen::VectorXd delta;
    switch (net.output) {
        case DenseNet::Output::Sigmoid: {
            const auto& y = cache.activations.back();
            delta = output_gradient.cwiseProduct(
                y.cwiseProduct(Eigen::VectorXd::Ones(y.size()) - y));
            break;
        }
        case DenseNet::Output::Identity:
            delta = output_gradient;
            break;
    }

    for (size_t li = n_layers; li-- > 0;) {
        const Eigen::VectorXd& below =
            (li == 0) ? cache.input : cache.activations[li - 1];
        grads.d_weights[li] = delta * below.transpose();
        grads.d_biases[li] = delta;
        Eigen::VectorXd d_below = net.weights[li].transpose() * delta;
        if (li > 0) {
            if (cache.dropout_masks[li - 1].size() > 0) {
                d_below = d_below.cwiseProduct(cache.dropout_masks[li - 1]);
            }
            const auto& z = cache.pre_activations[li - 1];
            delta = (z.array() > 0.0).select(d_below.array(), 0.0).matrix();
        } else {
            grads.d_input = d_below;
        }
    }
    return grads;
}

HybridModel HybridModel::make(int input_dim, Rng& rng) {
    HybridModel m;
    m.front = DenseNet::make({input_dim, 42, 3}, DenseNet::Output::Identity, 0.0, rng);
    m.head = DenseNet::make({3, 1}, DenseNet::Output::Identity, 0.0, rng);
    m.vqc_offsets.resize(m.vqc_layers, m.vqc_qubits);
    for (Eigen::Index i = 0; i < m.vqc_offsets.size(); ++i) {
        m.vqc_offsets.data()[i] = rng.uniform();
    }
    return m;
}

namespace {

// The front net uses ReLU on both layers; DenseNet applies the output
// activation to the last layer, so a ReLU is applied on top here.
Eigen::VectorXd front_angles(const HybridModel& model, const Eigen::VectorXd& x,
                             Rng& rng, DenseCache* cache = nullptr) {
    return dense_forward(model.front, x, false, rng, cache).cwiseMax(0.0);
}

}  // namespace

Eigen::VectorXd hybrid_vqc_readout(const HybridModel& model,
                                   const Eigen::VectorXd& angles) {
    if (angles.size() != model.vqc_qubits) {
        throw std::invalid_argument("vqc: angle count mismatch");
    }
    StateVector state(model.vqc_qubits);
    if (model.basis_change) {
        for (int q = 1; q <= model.vqc_qubits; ++q) {
            apply_rx(state, q, std::numbers::pi / 2.0);
        }
    }
    for (int layer = 0; layer < model.vqc_layers; ++layer) {
        for (int q = 1; q <= model.vqc_qubits; ++q) {
            double angle = model.vqc_offsets(layer, q - 1);
            if (layer == 0) angle += angles(q - 1);
            apply_rz(state, q, angle);
        }
        apply_cnot_ring(state);
    }
    Eigen::VectorXd out(model.vqc_qubits);
    for (int q = 1; q <= model.vqc_qubits; ++q) out(q - 1) = expect_y(state, q);
    return out;
}

double hybrid_forward(const HybridModel& model, const Eigen::VectorXd& features) {
    Rng rng(0);  // not consumed: no dropout in the hybrid nets
    const auto angles = front_angles(model, features, rng);
    const auto readout = hybrid_vqc_readout(model, angles);
    return dense_forward(model.head, readout, false, rng)(0);
}

HybridGrads hybrid_backward(const HybridModel& model,
                            const Eigen::VectorXd& features,
                            double output_gradient) {
    Rng rng(0);
    DenseCache front_cache;
    const auto angles = front_angles(model, features, rng, &front_cache);
    const auto readout = hybrid_vqc_readout(model, angles);

    DenseCache head_cache;
    dense_forward(model.head, readout, false, rng, &head_cache);
    Eigen::VectorXd dout(1);
    dout(0) = output_gradient;
    HybridGrads grads;
    grads.head = dense_backward(model.head, head_cache, dout);
    const Eigen::VectorXd d_readout = grads.head.d_input;

    // Parameter-shift gradients of the readout vector w.r.t. every angle.
    const double shift = std::numbers::pi / 2.0;
    grads.d_vqc_offsets.resize(model.vqc_layers, model.vqc_qubits);
    Eigen::VectorXd d_angles = Eigen::VectorXd::Zero(model.vqc_qubits);
    HybridModel shifted = model;
    for (int layer = 0; layer < model.vqc_layers; ++layer) {
        for (int q = 0; q < model.vqc_qubits; ++q) {
            shifted.vqc_offsets(layer, q) = model.vqc_offsets(layer, q) + shift;
            const auto plus = hybrid_vqc_readout(shifted, angles);
            shifted.vqc_offsets(layer, q) = model.vqc_offsets(layer, q) - shift;
            const auto minus = hybrid_vqc_readout(shifted, angles);
            shifted.vqc_offsets(layer, q) = model.vqc_offsets(layer, q);
            const Eigen::VectorXd d_readout_d_angle = (plus - minus) / 2.0;
            const double g = d_readout.dot(d_readout_d_angle);
            grads.d_vqc_offsets(layer, q) = g;
            // A first-layer offset and the corresponding input angle enter
            // the same RZ gate, so their gradients coincide.
            if (layer == 0) d_angles(q) = g;
        }
    }

    // The front output passes through a ReLU before entering as angles.
    Eigen::VectorXd d_front_out(model.vqc_qubits);
    const Eigen::VectorXd front_raw = front_cache.activations.back();
    for (int q = 0; q < model.vqc_qubits; ++q) {
        d_front_out(q) = front_raw(q) > 0.0 ? d_angles(q) : 0.0;
    }
    grads.front = dense_backward(model.front, front_cache, d_front_out);
    return grads;
}

int HybridModel::n_params() const {
    return front.n_params() + int(vqc_offsets.size()) + head.n_params();
}

namespace {

void append_net(std::vector<double>& out, const DenseNet& net) {
    for (size_t l = 0; l < net.weights.size(); ++l) {
        out.insert(out.end(), net.weights[l].data(),
                   net.weights[l].data() + net.weights[l].size());
        out.insert(out.end(), net.biases[l].data(),
                   net.biases[l].data() + net.biases[l].size());
    }
}

size_t read_net(DenseNet& net, std::span<const double> flat, size_t pos) {
    for (size_t l = 0; l < net.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) {
            net.weights[l].data()[i] = flat[pos++];
        }
        for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
            net.biases[l].data()[i] = flat[pos++];
        }
    }
    return pos;
}

}  // namespace

std::vector<double> HybridModel::get_params() const {
    std::vector<double> out;
    out.reserve(size_t(n_params()));
    append_net(out, front);
    out.insert(out.end(), vqc_offsets.data(), vqc_offsets.data() + vqc_offsets.size());
    append_net(out, head);
    return out;
}

void HybridModel::set_params(std::span<const double> flat) {
    if (int(flat.size()) != n_params()) {
        throw std::invalid_argument("hybrid: parameter count mismatch");
    }
    size_t pos = read_net(front, flat, 0);
    for (Eigen::Index i = 0; i < vqc_offsets.size(); ++i) {
        vqc_offsets.data()[i] = flat[pos++];
    }
    read_net(head, flat, pos);
}

std::vector<double> HybridGrads::flat() const {
    std::vector<double> out;
    for (size_t l = 0; l < front.d_weights.size(); ++l) {
        out.insert(out.end(), front.d_weights[l].data(),
                   front.d_weights[l].data() + front.d_weights[l].size());
        out.insert(out.end(), front.d_biases[l].data(),
                   front.d_biases[l].data() + front.d_biases[l].size());
    }
    out.insert(out.end(), d_vqc_offsets.data(),
               d_vqc_offsets.data() + d_vqc_offsets.size());
    for (size_t l = 0; l < head.d_weights.size(); ++l) {
        out.insert(out.end(), head.d_weights[l].data(),
                   head.d_weights[l].data() + head.d_weights[l].size());
        out.insert(out.end(), head.d_biases[l].data(),
                   head.d_biases[l].data() + head.d_biases[l].size());
    }
    return out;
}

}  // namespace qip
