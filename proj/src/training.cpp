#include "uninet/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "uninet/errors.hpp"
#include "uninet/random.hpp"

namespace uninet {

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(alpha_learning_rate > 0) || !std::isfinite(alpha_learning_rate)) {
    throw ConfigError("alpha_learning_rate must be positive");
  }
  if (!(l1_regularization >= 0) || !std::isfinite(l1_regularization)) {
    throw ConfigError("regularization must be non-negative");
  }
  if (!(validation_fraction > 0 && validation_fraction < 1)) {
    throw ConfigError("validation_fraction must lie in (0, 1)");
  }
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
}

nlohmann::json Metrics::to_json() const {
  return {{"misclassification_rate", misclassification_rate},
          {"total", total},
          {"confusion", confusion}};
}

Metrics metrics_from_predictions(std::span<const std::size_t> truth,
                                 std::span<const std::size_t> predicted,
                                 std::size_t class_count) {
  if (truth.size() != predicted.size()) {
    throw ContractError("prediction count differs from label count");
  }
  Metrics m;
  m.total = truth.size();
  m.confusion.assign(class_count, std::vector<std::size_t>(class_count, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m.confusion.at(truth[i]).at(predicted[i]);
    if (truth[i] == predicted[i]) ++correct;
  }
  m.misclassification_rate =
      m.total ? 1.0 - static_cast<double>(correct) / static_cast<double>(m.total) : 0.0;
  return m;
}

void write_training_log(std::span<const EpochLog> log, std::ostream& out) {
  const auto old = out.precision(10);
  out << "epoch,train_loss,val_misclassification\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << e.train_loss << ',' << e.val_misclassification << '\n';
  }
  out.precision(old);
}

ValidationSplit validation_split(const Dataset& train, const TrainConfig& cfg) {
  auto s = split(train, cfg.validation_fraction, cfg.seed, true);
  if (s.test.size() == 0 || s.train.size() == 0) return {train, train};
  return {std::move(s.train), std::move(s.test)};
}

namespace {

/// Squared error of one sample, writing d loss / d signed outputs.
double sample_loss(std::span<const double> z, std::size_t label,
                   std::span<double> dz) {
  const std::size_t c = z.size();
  double loss = 0;
  for (std::size_t i = 0; i < c; ++i) {
    const double target = c == 1 ? static_cast<double>(label) : (i == label ? 1.0 : 0.0);
    const double diff = (z[i] + 1.0) / 2.0 - target;
    loss += diff * diff;
    dz[i] = diff / static_cast<double>(c);
  }
  return loss / static_cast<double>(c);
}

double sign(double v) { return (v > 0) - (v < 0); }

struct LogicOps {
  using Model = LogicNetwork;
  using Grad = Gradients;

  static Grad make_grad(const Model& m) { return Gradients::zeros_like(m); }
  static void zero(Grad& g) { g.zero(); }
  static std::size_t features(const Model& m) { return m.feature_count(); }

  static double accumulate(const Model& m, std::span<const double> x,
                           std::size_t y, Grad& g, std::vector<double>& dz) {
    auto res = forward(m, x);
    dz.resize(res.cache.outputs.size());
    const double loss = sample_loss(res.cache.outputs, y, dz);
    backward_accumulate(m, res.cache, dz, g);
    return loss;
  }

  static std::vector<double> outputs(const Model& m, std::span<const double> x) {
    return network_outputs(m, x);
  }

  static void step(Model& m, const Grad& g, double scale, const TrainConfig& cfg) {
    for (std::size_t p = 0; p < m.logic_parts(); ++p) {
      auto& alphas = m.mutable_alphas(p);
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        alphas[i] -= cfg.alpha_learning_rate * scale * g.alphas[p][i];
      }
      auto& w = m.mutable_selector(p).data();
      const auto& gw = g.selectors[p].data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] -= cfg.learning_rate *
                (scale * gw[i] + cfg.l1_regularization * sign(w[i]));
      }
    }
    m.project_alphas();
  }
};

struct DenseGrad {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

struct DenseOps {
  using Model = DenseNetwork;
  using Grad = DenseGrad;

  static Grad make_grad(const Model& m) {
    Grad g;
    for (const auto& w : m.weights()) g.weights.emplace_back(w.rows(), w.cols());
    for (const auto& b : m.biases()) g.biases.emplace_back(b.size(), 0.0);
    return g;
  }
  static void zero(Grad& g) {
    for (auto& w : g.weights) w.fill(0.0);
    for (auto& b : g.biases) std::fill(b.begin(), b.end(), 0.0);
  }
  static std::size_t features(const Model& m) { return m.feature_count(); }

  static double accumulate(const Model& m, std::span<const double> x,
                           std::size_t y, Grad& g, std::vector<double>& dz) {
    const auto acts = m.activations(x);
    const auto& out = acts.back();
    dz.resize(out.size());
    const double loss = sample_loss(out, y, dz);
    std::vector<double> delta(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) delta[i] = dz[i] * (1.0 - out[i] * out[i]);
    for (std::size_t l = m.weights().size(); l-- > 0;) {
      const auto& in = acts[l];
      const auto& w = m.weights()[l];
      auto& gw = g.weights[l];
      for (std::size_t r = 0; r < w.rows(); ++r) {
        if (delta[r] == 0.0) continue;
        g.biases[l][r] += delta[r];
        auto row = gw.row(r);
        for (std::size_t c = 0; c < w.cols(); ++c) row[c] += delta[r] * in[c];
      }
      if (l == 0) break;
      std::vector<double> prev(w.cols(), 0.0);
      for (std::size_t r = 0; r < w.rows(); ++r) {
        if (delta[r] == 0.0) continue;
        const auto row = w.row(r);
        for (std::size_t c = 0; c < w.cols(); ++c) prev[c] += row[c] * delta[r];
      }
      for (std::size_t c = 0; c < prev.size(); ++c) prev[c] *= 1.0 - in[c] * in[c];
      delta = std::move(prev);
    }
    return loss;
  }

  static std::vector<double> outputs(const Model& m, std::span<const double> x) {
    return m.activations(x).back();
  }

  static void step(Model& m, const Grad& g, double scale, const TrainConfig& cfg) {
    for (std::size_t l = 0; l < m.weights().size(); ++l) {
      auto& w = m.weights()[l].data();
      const auto& gw = g.weights[l].data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] -= cfg.learning_rate *
                (scale * gw[i] + 2.0 * cfg.l1_regularization * w[i]);
      }
      auto& b = m.biases()[l];
      for (std::size_t i = 0; i < b.size(); ++i) {
        b[i] -= cfg.learning_rate * scale * g.biases[l][i];
      }
    }
  }
};

template <typename Ops>
std::pair<double, double> validation_score(const typename Ops::Model& m,
                                           const Dataset& val) {
  std::size_t wrong = 0;
  double loss = 0;
  std::vector<double> dz;
  for (std::size_t i = 0; i < val.size(); ++i) {
    const auto z = Ops::outputs(m, val.features.row(i));
    dz.resize(z.size());
    loss += sample_loss(z, val.labels[i], dz);
    if (max_classify(z).label != val.labels[i]) ++wrong;
  }
  const auto n = static_cast<double>(val.size());
  return {static_cast<double>(wrong) / n, loss / n};
}

template <typename Ops>
TrainResult<typename Ops::Model> run_sgd(typename Ops::Model model,
                                         const Dataset& train_split,
                                         const TrainConfig& cfg) {
  using Model = typename Ops::Model;
  cfg.validate();
  if (train_split.size() == 0) throw DataError("training split is empty");
  if (train_split.feature_count() != Ops::features(model)) {
    throw ContractError("dataset has " + std::to_string(train_split.feature_count()) +
                        " features, model expects " +
                        std::to_string(Ops::features(model)));
  }
  for (std::size_t r = 0; r < train_split.size(); ++r) {
    for (double v : train_split.features.row(r)) {
      if (!std::isfinite(v)) {
        throw NumericError("non-finite feature value in training row " + std::to_string(r),
                           0, 0);
      }
    }
  }
  model.set_bounds(NormalizationBounds::fit(train_split.features));
  const auto [fit, val] = validation_split(train_split, cfg);

  TrainResult<Model> result{model, {}, 0, 0};
  auto [best_mis, best_loss] = validation_score<Ops>(model, val);
  result.best_val_misclassification = best_mis;

  Rng rng(cfg.seed ^ 0x5bd1e9955bd1e995ULL);
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), 0);
  auto grad = Ops::make_grad(model);
  std::vector<double> dz;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0;
    std::size_t batch = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      Ops::zero(grad);
      double batch_loss = 0;
      for (std::size_t i = start; i < end; ++i) {
        batch_loss += Ops::accumulate(model, fit.features.row(order[i]),
                                      fit.labels[order[i]], grad, dz);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch),
                           epoch, batch);
      }
      total += batch_loss;
      Ops::step(model, grad, 1.0 / static_cast<double>(end - start), cfg);
    }
    const auto [mis, vloss] = validation_score<Ops>(model, val);
    result.log.push_back({epoch, total / static_cast<double>(order.size()), mis, vloss});
    if (mis < best_mis || (mis == best_mis && vloss < best_loss)) {
      best_mis = mis;
      best_loss = vloss;
      result.model = model;
      result.best_epoch = epoch;
      result.best_val_misclassification = mis;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace

TrainResult<LogicNetwork> train(LogicNetwork net, const Dataset& train_split,
                                const TrainConfig& cfg) {
  return run_sgd<LogicOps>(std::move(net), train_split, cfg);
}

Metrics evaluate(const LogicNetwork& net, const Dataset& data) {
  if (data.feature_count() != net.feature_count()) {
    throw ContractError("dataset width does not match the model");
  }
  std::vector<std::size_t> predicted(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    predicted[i] = predict(net, data.features.row(i)).label;
  }
  return metrics_from_predictions(data.labels, predicted, data.class_count);
}

DenseNetwork::DenseNetwork(std::vector<std::size_t> widths, std::uint64_t seed)
    : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ConfigError("dense network needs at least two widths");
  for (auto w : widths_) {
    if (w == 0) throw ConfigError("dense layer width must be positive");
  }
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const auto in = widths_[l];
    const auto out = widths_[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Matrix w(out, in);
    for (auto& v : w.data()) v = rng.uniform(-limit, limit);
    weights_.push_back(std::move(w));
    biases_.emplace_back(out, 0.0);
  }
  bounds_ = NormalizationBounds::unit(widths_.front());
}

std::vector<std::vector<double>> DenseNetwork::activations(
    std::span<const double> raw) const {
  if (raw.size() != feature_count()) {
    throw ContractError("feature vector has " + std::to_string(raw.size()) +
                        " entries, model expects " + std::to_string(feature_count()));
  }
  std::vector<std::vector<double>> acts;
  acts.push_back(normalize_forward(raw, bounds_));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const auto& w = weights_[l];
    const auto& in = acts.back();
    std::vector<double> out(w.rows());
    for (std::size_t r = 0; r < w.rows(); ++r) {
      const auto row = w.row(r);
      double s = biases_[l][r];
      for (std::size_t c = 0; c < w.cols(); ++c) s += row[c] * in[c];
      out[r] = std::tanh(s);
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

Decision DenseNetwork::predict(std::span<const double> raw) const {
  return max_classify(activations(raw).back());
}

std::vector<std::size_t> mirrored_widths(const LogicNetwork& net) {
  std::vector<std::size_t> widths{net.feature_count()};
  for (const auto& spec : net.layer_specs()) {
    if (spec.kind == LayerKind::AllPairings || spec.kind == LayerKind::FeatureSelector) {
      widths.push_back(spec.width_out);
    }
  }
  return widths;
}

TrainResult<DenseNetwork> train_baseline(DenseNetwork net, const Dataset& train_split,
                                         const TrainConfig& cfg) {
  return run_sgd<DenseOps>(std::move(net), train_split, cfg);
}

Metrics evaluate(const DenseNetwork& net, const Dataset& data) {
  if (data.feature_count() != net.feature_count()) {
    throw ContractError("dataset width does not match the model");
  }
  std::vector<std::size_t> predicted(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    predicted[i] = net.predict(data.features.row(i)).label;
  }
  return metrics_from_predictions(data.labels, predicted, data.class_count);
}

CrossValidation cross_validate(const Dataset& data, std::size_t folds,
                               const TrainConfig& cfg, const NetworkConfig& net_config) {
  const auto assignment = stratified_folds(data.labels, data.class_count, folds, cfg.seed);
  CrossValidation cv;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (assignment[i] == f ? test_rows : train_rows).push_back(i);
    }
    const auto train_data = data.subset(train_rows);
    const auto test_data = data.subset(test_rows);
    auto net = build_network(data.feature_count(), data.class_count, net_config);
    const auto trained = train(std::move(net), train_data, cfg);
    cv.fold_rates.push_back(evaluate(trained.model, test_data).misclassification_rate);
  }
  const auto n = static_cast<double>(folds);
  cv.mean = std::accumulate(cv.fold_rates.begin(), cv.fold_rates.end(), 0.0) / n;
  double ss = 0;
  for (double r : cv.fold_rates) ss += (r - cv.mean) * (r - cv.mean);
  cv.stddev = std::sqrt(ss / (n - 1.0));
  return cv;
}

}  // namespace uninet
