// Minibatch SGD for the logic network and the dense tanh baseline.
//
// Loss: mean squared error between scores (z + 1)/2 and 0/1 targets,
// averaged over the batch and the outputs. The logic network adds
// l1 * sum|W| over selector weights (alphas are not penalized), the
// baseline adds l2 * sum w^2 over its weight matrices.

#ifndef UNINET_TRAINING_HPP_
#define UNINET_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "uninet/dataset.hpp"
#include "uninet/matrix.hpp"
#include "uninet/network.hpp"

namespace uninet {

struct TrainConfig {
  double learning_rate = 0.01;  // selector / dense weights
  double alpha_learning_rate = 0.1;
  double l1_regularization = 1e-4;  // L2 coefficient for the baseline
  std::size_t max_epochs = 200;
  std::size_t patience = 20;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  double validation_fraction = 0.15;

  /// Throws ConfigError.
  void validate() const;
};

struct Metrics {
  double misclassification_rate = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::size_t total = 0;

  nlohmann::json to_json() const;
};

Metrics metrics_from_predictions(std::span<const std::size_t> truth,
                                 std::span<const std::size_t> predicted,
                                 std::size_t class_count);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double val_misclassification = 0;
  double val_loss = 0;
};

/// CSV with header epoch,train_loss,val_misclassification.
void write_training_log(std::span<const EpochLog> log, std::ostream& out);

/// Training rows and the validation rows carved out of a training split.
/// Both models draw it from the same seed, so paired comparisons see the
/// same data. With too few rows for a validation part, validation is the
/// training split itself.
struct ValidationSplit {
  Dataset fit;
  Dataset validation;
};

ValidationSplit validation_split(const Dataset& train, const TrainConfig& cfg);

template <typename Model>
struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;  // 0 = initial parameters
  double best_val_misclassification = 0;
};

/// Fits normalization bounds on the whole training split, then trains with
/// early stopping on validation misclassification (ties broken by
/// validation loss) and returns the best snapshot. Throws NumericError on a
/// non-finite batch loss.
TrainResult<LogicNetwork> train(LogicNetwork net, const Dataset& train_split,
                                const TrainConfig& cfg);

Metrics evaluate(const LogicNetwork& net, const Dataset& data);

/// Fully connected tanh network.
class DenseNetwork {
 public:
  /// widths = {inputs, hidden..., outputs}; Glorot-uniform weights, zero
  /// biases.
  DenseNetwork(std::vector<std::size_t> widths, std::uint64_t seed);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t feature_count() const { return widths_.front(); }
  std::size_t output_width() const { return widths_.back(); }

  const NormalizationBounds& bounds() const { return bounds_; }
  void set_bounds(NormalizationBounds b) { bounds_ = std::move(b); }

  std::vector<Matrix>& weights() { return weights_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  std::vector<std::vector<double>>& biases() { return biases_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }

  /// Per-layer activations; front() is the normalized input, back() the
  /// signed outputs.
  std::vector<std::vector<double>> activations(std::span<const double> raw) const;
  Decision predict(std::span<const double> raw) const;

 private:
  std::vector<std::size_t> widths_;
  std::vector<Matrix> weights_;
  std::vector<std::vector<double>> biases_;
  NormalizationBounds bounds_;
};

/// Layer widths mirroring the logic network: [n, P1, k, P2, out] for two
/// logic parts, one dense layer per parameterized layer.
std::vector<std::size_t> mirrored_widths(const LogicNetwork& net);

TrainResult<DenseNetwork> train_baseline(DenseNetwork net, const Dataset& train_split,
                                         const TrainConfig& cfg);

Metrics evaluate(const DenseNetwork& net, const Dataset& data);

struct CrossValidation {
  std::vector<double> fold_rates;
  double mean = 0;
  double stddev = 0;  // sample standard deviation
};

/// Stratified k-fold; each fold trains a fresh network built with
/// `net_config` on the remaining folds.
CrossValidation cross_validate(const Dataset& data, std::size_t folds,
                               const TrainConfig& cfg,
                               const NetworkConfig& net_config = {});

}  // namespace uninet

#endif  // UNINET_TRAINING_HPP_
