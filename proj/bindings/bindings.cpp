#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qiplane/data.hpp"
#include "qiplane/harness.hpp"
#include "qiplane/infoplane.hpp"
#include "qiplane/models.hpp"
#include "qiplane/qsim.hpp"
#include "qiplane/train.hpp"

namespace py = pybind11;
using namespace qip;

PYBIND11_MODULE(_core, m) {
    m.doc() = "statevector simulation, information-plane probes and "
              "compression-gnostic training";

    // ---- qsim ----
    py::class_<StateVector>(m, "StateVector")
        .def(py::init<int>(), py::arg("n_qubits"))
        .def_property_readonly("n_qubits", &StateVector::n_qubits)
        .def_property_readonly("amplitudes",
                               [](const StateVector& s) { return s.amplitudes(); })
        .def("squared_norm", &StateVector::squared_norm);

    py::class_<CircuitSpec>(m, "CircuitSpec")
        .def(py::init<>())
        .def_readwrite("n_qubits", &CircuitSpec::n_qubits)
        .def_readwrite("n_reupload_layers", &CircuitSpec::n_reupload_layers)
        .def_readwrite("n_variational_layers", &CircuitSpec::n_variational_layers)
        .def_readwrite("feature_assignment", &CircuitSpec::feature_assignment)
        .def("param_count", &CircuitSpec::param_count);

    m.def("apply_rx", &apply_rx, py::arg("state"), py::arg("qubit"), py::arg("theta"));
    m.def("apply_rz", &apply_rz, py::arg("state"), py::arg("qubit"), py::arg("x"));
    m.def("apply_cnot_ring", &apply_cnot_ring, py::arg("state"));
    m.def("run_circuit",
          [](const CircuitSpec& spec, const ParamVector& params,
             const std::vector<double>& features) {
              return run_circuit(spec, params, features);
          });
    m.def("density", &density);
    m.def("partial_trace", &partial_trace, py::arg("rho"), py::arg("n_qubits"),
          py::arg("keep"));
    m.def("dephase_z", &dephase_z);
    m.def("tomo_vec", &tomo_vec);
    m.def("expect_z", &expect_z);
    m.def("expect_y", &expect_y);

    // ---- infoplane ----
    py::class_<BinningConfig>(m, "BinningConfig")
        .def(py::init<>())
        .def_readwrite("m_scalar", &BinningConfig::m_scalar)
        .def_readwrite("b_component", &BinningConfig::b_component);

    m.def("bin_scalar", &bin_scalar, py::arg("t"), py::arg("m"), py::arg("lo"),
          py::arg("hi"));
    m.def("entropy_bits", [](const std::vector<std::int64_t>& counts) {
        return entropy_bits(counts);
    });
    m.def("mi_deterministic", &mi_deterministic);
    m.def("mi_joint", &mi_joint);

    // ---- train ----
    py::enum_<AlphaMode>(m, "AlphaMode")
        .value("STATIC", AlphaMode::STATIC)
        .value("DYNAMIC", AlphaMode::DYNAMIC);
    py::class_<AlphaSchedule>(m, "AlphaSchedule")
        .def(py::init<>())
        .def_readwrite("mode", &AlphaSchedule::mode)
        .def_readwrite("alpha_max", &AlphaSchedule::alpha_max)
        .def_readwrite("s_max", &AlphaSchedule::s_max);
    m.def("alpha_value", &alpha_value);
    m.def("mse_loss", [](const std::vector<double>& y, const std::vector<double>& yhat) {
        return mse_loss(y, yhat);
    });
    m.def("comp_loss_classification", &comp_loss_classification);
    m.def("comp_loss_regression", &comp_loss_regression);
    m.def("combined_loss", &combined_loss);
    m.def("accuracy", [](const std::vector<double>& y, const std::vector<double>& s) {
        return accuracy(y, s);
    });
    m.def("roc_auc", [](const std::vector<double>& y, const std::vector<double>& s) {
        return roc_auc(y, s);
    });
    m.def("r2_score", [](const std::vector<double>& y, const std::vector<double>& s) {
        return r2_score(y, s);
    });

    // ---- models ----
    py::class_<PqcModel>(m, "PqcModel")
        .def(py::init<>())
        .def_readwrite("spec", &PqcModel::spec)
        .def_readwrite("params", &PqcModel::params)
        .def_readwrite("readout_qubit", &PqcModel::readout_qubit);
    m.def("pqc_forward", [](const PqcModel& model, const std::vector<double>& features) {
        return pqc_forward(model, features);
    });
    m.def("pqc_predict", [](const PqcModel& model, const std::vector<double>& features) {
        return pqc_predict(model, features);
    });

    // ---- data ----
    py::class_<Dataset>(m, "Dataset")
        .def_readwrite("features", &Dataset::features)
        .def_readwrite("labels", &Dataset::labels)
        .def_readwrite("feature_names", &Dataset::feature_names)
        .def_readwrite("rows_dropped", &Dataset::rows_dropped);
    m.def("gen_clouds", &gen_clouds, py::arg("seed"));
    m.def("gen_regression", &gen_regression, py::arg("seed"), py::arg("n_points") = 256,
          py::arg("n_features") = 4);

    // ---- harness ----
    m.def("run_sweep_config", [](const std::string& config_path,
                                 const std::string& out_dir) {
        ExperimentConfig config = load_experiment_config(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        const auto result = qip::run(config);
        emit(result, config.out_dir);
        return !result.any_failed();
    });
}
