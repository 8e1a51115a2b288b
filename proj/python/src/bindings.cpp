#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "uninet/dataset.hpp"
#include "uninet/errors.hpp"
#include "uninet/expr.hpp"
#include "uninet/extraction.hpp"
#include "uninet/fuzzy.hpp"
#include "uninet/model_io.hpp"
#include "uninet/network.hpp"
#include "uninet/training.hpp"

namespace py = pybind11;
using namespace uninet;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ContractError("expected a 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw ContractError("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

Array to_numpy(const Matrix& m) {
  Array a({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), a.mutable_data());
  return a;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["misclassification_rate"] = m.misclassification_rate;
  d["confusion"] = m.confusion;
  d["total"] = m.total;
  return d;
}

py::dict faithfulness_dict(const Faithfulness& f) {
  py::dict d;
  d["agreement"] = f.agreement;
  d["decisive_agreement"] = f.decisive_agreement;
  d["undecided"] = f.undecided;
  d["total"] = f.total;
  return d;
}

std::vector<std::string> names_or_empty(const std::optional<std::vector<std::string>>& n) {
  return n ? *n : std::vector<std::string>{};
}

}  // namespace

PYBIND11_MODULE(_uninet, m) {
  m.doc() = "Fuzzy logic networks with extractable expressions";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("cut", &cut, py::arg("x"));
  m.def(
      "squash",
      [](double x, double center, double ramp_width, double beta) {
        return squash(x, {center, ramp_width, beta});
      },
      py::arg("x"), py::arg("center") = 0.5, py::arg("ramp_width") = 1.0, py::arg("beta") = 80.0);
  m.def(
      "binary_op",
      [](double x, double y, double alpha, bool smooth, double beta) {
        return smooth ? binary_op_smooth(x, y, alpha, {0.5, 1.0, beta})
                      : binary_op_crisp(x, y, alpha);
      },
      py::arg("x"), py::arg("y"), py::arg("alpha"), py::arg("smooth") = false,
      py::arg("beta") = 80.0);
  m.def("negation", &negation, py::arg("x"));
  m.def("preference_op", &preference_op, py::arg("x"), py::arg("y"), py::arg("w"));
  m.def(
      "classify_alpha",
      [](double alpha, double tolerance) {
        return std::string(operator_name(classify_alpha(alpha, tolerance)));
      },
      py::arg("alpha"), py::arg("tolerance") = kDefaultAlphaTolerance);

  py::class_<LogicExpr>(m, "Expr")
      .def_static("input", &LogicExpr::input, py::arg("index"))
      .def_static("constant", &LogicExpr::constant, py::arg("value"))
      .def_static(
          "binary",
          [](double alpha, const LogicExpr& l, const LogicExpr& r) {
            return LogicExpr::binary(alpha, l, r);
          },
          py::arg("alpha"), py::arg("left"), py::arg("right"))
      .def_static("negate", &LogicExpr::negate, py::arg("child"))
      .def_static(
          "parse", [](const std::string& text) { return parse_expression(text); },
          py::arg("text"))
      .def("evaluate",
           [](const LogicExpr& e, const std::vector<double>& truth) { return e.evaluate(truth); },
           py::arg("truth"))
      .def(
          "render",
          [](const LogicExpr& e, std::optional<std::vector<std::string>> names) {
            return render(e, names_or_empty(names));
          },
          py::arg("leaf_names") = py::none())
      .def("same_shape", &same_shape, py::arg("other"))
      .def_property_readonly("leaf_count", &LogicExpr::leaf_count)
      .def_property_readonly("depth", &LogicExpr::binary_depth)
      .def("__str__", [](const LogicExpr& e) { return render(e); })
      .def("__repr__", [](const LogicExpr& e) { return "Expr(" + render(e) + ")"; })
      .def("__eq__", [](const LogicExpr& a, const LogicExpr& b) { return a == b; });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const Array& features, const std::vector<std::size_t>& labels,
                       std::optional<std::vector<std::string>> class_names) {
             Dataset d;
             d.features = to_matrix(features);
             if (labels.size() != d.features.rows()) {
               throw ContractError("one label per row required");
             }
             d.labels = labels;
             d.class_count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
             if (class_names) {
               if (class_names->size() < d.class_count) throw ContractError("too few class names");
               d.class_names = *class_names;
               d.class_count = class_names->size();
             } else {
               for (std::size_t c = 0; c < d.class_count; ++c) d.class_names.push_back(std::to_string(c));
             }
             for (std::size_t c = 0; c < d.features.cols(); ++c) {
               d.feature_names.push_back("x" + std::to_string(c));
             }
             return d;
           }),
           py::arg("features"), py::arg("labels"), py::arg("class_names") = py::none())
      .def_property_readonly("features", [](const Dataset& d) { return to_numpy(d.features); })
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("feature_names", &Dataset::feature_names)
      .def_readonly("class_names", &Dataset::class_names)
      .def_readonly("class_count", &Dataset::class_count)
      .def_readonly("warnings", &Dataset::warnings)
      .def("__len__", &Dataset::size);

  m.def(
      "load_csv",
      [](const std::filesystem::path& data, const std::filesystem::path& schema) {
        return load_csv(data, DatasetSchema::load(schema));
      },
      py::arg("data"), py::arg("schema"));
  m.def(
      "split",
      [](const Dataset& d, double test_fraction, std::uint64_t seed) {
        const auto s = split(d, test_fraction, seed, true);
        return py::make_tuple(s.train, s.test);
      },
      py::arg("data"), py::arg("test_fraction") = 0.3, py::arg("seed") = 0);
  m.def("generate_synthetic", &generate_synthetic, py::arg("expr"), py::arg("features"),
        py::arg("rows"), py::arg("noise") = 0.0, py::arg("seed") = 0);

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_readwrite("hidden_width", &NetworkConfig::hidden_width)
      .def_readwrite("logic_parts", &NetworkConfig::logic_parts)
      .def_readwrite("seed", &NetworkConfig::seed)
      .def_property(
          "beta", [](const NetworkConfig& c) { return c.squash.beta; },
          [](NetworkConfig& c, double b) { c.squash.beta = b; });

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("alpha_learning_rate", &TrainConfig::alpha_learning_rate)
      .def_readwrite("l1_regularization", &TrainConfig::l1_regularization)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("validation_fraction", &TrainConfig::validation_fraction);

  py::class_<ExtractionConfig>(m, "ExtractionConfig")
      .def(py::init<>())
      .def_readwrite("alpha_tolerance", &ExtractionConfig::alpha_tolerance)
      .def_readwrite("weight_keep_ratio", &ExtractionConfig::weight_keep_ratio)
      .def_readwrite("max_terms_per_node", &ExtractionConfig::max_terms_per_node)
      .def_readwrite("max_leaves", &ExtractionConfig::max_leaves)
      .def_readwrite("max_rendered_length", &ExtractionConfig::max_rendered_length);

  py::class_<LogicNetwork>(m, "Network")
      .def_property_readonly("feature_count", &LogicNetwork::feature_count)
      .def_property_readonly("class_count", &LogicNetwork::class_count)
      .def_property_readonly("output_width", &LogicNetwork::output_width)
      .def_property_readonly("logic_parts", &LogicNetwork::logic_parts)
      .def("alphas", [](const LogicNetwork& n, std::size_t p) { return n.part(p).alphas; },
           py::arg("part"))
      .def("selector", [](const LogicNetwork& n, std::size_t p) { return to_numpy(n.part(p).selector); },
           py::arg("part"))
      .def("outputs",
           [](const LogicNetwork& n, const Array& x) { return network_outputs(n, to_vector(x)); },
           py::arg("x"))
      .def("predict",
           [](const LogicNetwork& n, const Array& x) { return predict(n, to_vector(x)).label; },
           py::arg("x"))
      .def("save", [](const LogicNetwork& n, const std::filesystem::path& p) { save_network(n, p); },
           py::arg("path"))
      .def("to_json", [](const LogicNetwork& n) { return network_to_json(n).dump(); })
      .def("__eq__", [](const LogicNetwork& a, const LogicNetwork& b) { return a == b; });

  m.def("build_network", &build_network, py::arg("feature_count"), py::arg("class_count"),
        py::arg("config") = NetworkConfig{});
  m.def("load_network", &load_network, py::arg("path"));
  m.def("plant_network",
        [](const LogicExpr& tree, std::size_t features) { return plant_network(tree, features); },
        py::arg("tree"), py::arg("feature_count"));

  m.def(
      "train",
      [](const LogicNetwork& net, const Dataset& data, const TrainConfig& cfg) {
        auto r = [&] {
          py::gil_scoped_release release;
          return train(net, data, cfg);
        }();
        py::list log;
        for (const auto& e : r.log) {
          py::dict row;
          row["epoch"] = e.epoch;
          row["train_loss"] = e.train_loss;
          row["val_misclassification"] = e.val_misclassification;
          row["val_loss"] = e.val_loss;
          log.append(row);
        }
        py::dict out;
        out["model"] = std::move(r.model);
        out["log"] = log;
        out["best_epoch"] = r.best_epoch;
        out["best_val_misclassification"] = r.best_val_misclassification;
        return out;
      },
      py::arg("network"), py::arg("data"), py::arg("config") = TrainConfig{});
  m.def(
      "evaluate",
      [](const LogicNetwork& net, const Dataset& data) { return metrics_dict(evaluate(net, data)); },
      py::arg("network"), py::arg("data"));

  m.def(
      "extract",
      [](const LogicNetwork& net, const ExtractionConfig& cfg, std::size_t output_index) {
        const auto t = trace_expression(net, cfg, output_index);
        const auto omit = should_omit(t, cfg);
        py::dict out;
        out["expr"] = t.expr;
        out["omitted"] = omit.omit;
        out["reason"] = omit.reason;
        out["max_terms"] = t.max_terms;
        return out;
      },
      py::arg("network"), py::arg("config") = ExtractionConfig{}, py::arg("output_index") = 0);
  m.def(
      "faithfulness",
      [](const LogicNetwork& net, const LogicExpr& e, const Array& rows, std::size_t out) {
        return faithfulness_dict(faithfulness(net, e, to_matrix(rows), out));
      },
      py::arg("network"), py::arg("expr"), py::arg("rows"), py::arg("output_index") = 0);
  m.def("truth_table", [](std::size_t n) { return to_numpy(boolean_truth_table(n)); },
        py::arg("n"));
}
