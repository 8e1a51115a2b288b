// The interpretable logic network.
//
// Layer stack for the default two logic parts:
//
//   Normalization -> [AllPairings -> FuzzyLogic -> FeatureSelector]
//                 -> TanhRemap
//                 -> [AllPairings -> FuzzyLogic -> FeatureSelector]
//                 -> MaxClassifier
//
// All inter-layer values are signed truth values in [-1, 1]. The FuzzyLogic
// layer maps each operand pair to [0, 1] with z = (z~ + 1)/2, applies
// S(x + y - alpha) and maps back with z~ = 2z - 1.

#ifndef UNINET_NETWORK_HPP_
#define UNINET_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uninet/fuzzy.hpp"
#include "uninet/matrix.hpp"

namespace uninet {

enum class LayerKind {
  Normalization,
  AllPairings,
  FuzzyLogic,
  FeatureSelector,
  TanhRemap,
  MaxClassifier,
};

std::string_view layer_kind_name(LayerKind kind);
LayerKind parse_layer_kind(std::string_view name);

struct LayerSpec {
  LayerKind kind;
  std::size_t width_in;
  std::size_t width_out;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// One output slot of an AllPairings layer.
struct Pairing {
  enum class Kind { Pair, WithTrue, WithFalse };

  Kind kind;
  std::size_t first;
  std::size_t second = 0;  // only meaningful for Pair

  static Pairing pair(std::size_t i, std::size_t j) { return {Kind::Pair, i, j}; }
  static Pairing with_true(std::size_t i) { return {Kind::WithTrue, i, 0}; }
  static Pairing with_false(std::size_t i) { return {Kind::WithFalse, i, 0}; }

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

/// n(n-1)/2 + 2n.
std::size_t pairing_count(std::size_t width);

/// All Pair(i, j), i < j, in lexicographic order, then WithTrue(0..n-1),
/// then WithFalse(0..n-1).
std::vector<Pairing> enumerate_pairings(std::size_t width);

/// Per-feature min/max fitted on training rows.
struct NormalizationBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static NormalizationBounds fit(const Matrix& rows);
  /// Maps [-1, 1] onto itself; used for data that is already scaled.
  static NormalizationBounds unit(std::size_t width);

  std::size_t size() const { return lower.size(); }

  friend bool operator==(const NormalizationBounds&,
                         const NormalizationBounds&) = default;
};

/// Affine map of (min, max) onto (-1, 1), clamped. A degenerate feature
/// (min == max) maps to 0.
std::vector<double> normalize_forward(std::span<const double> raw,
                                      const NormalizationBounds& bounds);

struct PairValues {
  double first;
  double second;
};

/// WithTrue(i) carries (x_i, +1), WithFalse(i) carries (x_i, -1).
std::vector<PairValues> all_pairings_forward(std::span<const double> x,
                                             std::span<const Pairing> table);

/// Signed output 2 S((u+1)/2 + (v+1)/2 - alpha) - 1 per pair.
std::vector<double> fuzzy_logic_forward(std::span<const PairValues> pairs,
                                        std::span<const double> alphas,
                                        const SquashParams& p);

/// clamp(W x, -1, 1), no bias.
std::vector<double> feature_selector_forward(std::span<const double> x,
                                             const Matrix& weights);

std::vector<double> tanh_remap_forward(std::span<const double> x);

struct Decision {
  std::size_t label = 0;
  /// Class scores in [0, 1]: one per class, or a single score for binary
  /// problems (probability-like value of class 1).
  std::vector<double> scores;
};

/// Binary (one output): score (z+1)/2, class 1 iff score >= 0.5.
/// Multi-class: argmax of the outputs, lowest index on ties.
Decision max_classify(std::span<const double> outputs);

struct NetworkConfig {
  std::size_t hidden_width = 8;
  std::size_t logic_parts = 2;
  SquashParams squash;
  /// Largest AllPairings width accepted by build_network.
  std::size_t max_pairings = 4096;
  std::uint64_t seed = 0;
};

/// AllPairings table, one alpha per slot, and the selector matrix
/// (width_out x slots) of one logic part.
struct LogicPart {
  std::vector<Pairing> pairings;
  std::vector<double> alphas;
  Matrix selector;

  friend bool operator==(const LogicPart&, const LogicPart&) = default;
};

struct ModelMetadata {
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

class LogicNetwork {
 public:
  /// Validates the whole layer chain; throws ConfigError on inconsistency.
  LogicNetwork(std::size_t feature_count, std::size_t class_count,
               SquashParams squash, NormalizationBounds bounds,
               std::vector<LogicPart> parts);

  std::size_t feature_count() const { return feature_count_; }
  std::size_t class_count() const { return class_count_; }
  /// class_count for multi-class problems, 1 for binary ones.
  std::size_t output_width() const { return output_width_; }
  std::size_t logic_parts() const { return parts_.size(); }
  const SquashParams& squash() const { return squash_; }

  const NormalizationBounds& bounds() const { return bounds_; }
  void set_bounds(NormalizationBounds bounds);

  const std::vector<LogicPart>& parts() const { return parts_; }
  const LogicPart& part(std::size_t i) const { return parts_.at(i); }

  /// Mutable parameter access; invalidates outstanding forward caches.
  std::vector<double>& mutable_alphas(std::size_t part);
  Matrix& mutable_selector(std::size_t part);

  /// Clamp every alpha into [0, 1].
  void project_alphas();

  std::vector<LayerSpec> layer_specs() const;

  /// Bumped by every mutation; forward caches remember it.
  std::uint64_t version() const { return version_; }

  ModelMetadata metadata;

  friend bool operator==(const LogicNetwork& a, const LogicNetwork& b) {
    return a.feature_count_ == b.feature_count_ &&
           a.class_count_ == b.class_count_ && a.squash_ == b.squash_ &&
           a.bounds_ == b.bounds_ && a.parts_ == b.parts_ &&
           a.metadata == b.metadata;
  }

 private:
  std::size_t feature_count_;
  std::size_t class_count_;
  std::size_t output_width_;
  SquashParams squash_;
  NormalizationBounds bounds_;
  std::vector<LogicPart> parts_;
  std::uint64_t version_ = 0;
};

/// Nine-layer network (for two logic parts) with alpha ~ U[0.25, 0.75] and
/// selector weights ~ U[-0.5, 0.5] / sqrt(width_in). Bounds start as the
/// identity on [-1, 1] until training fits them.
LogicNetwork build_network(std::size_t feature_count, std::size_t class_count,
                           const NetworkConfig& config = {});

/// Activations of one forward pass, kept for backpropagation.
struct ForwardCache {
  struct Part {
    std::vector<double> input;           // signed, width_in
    std::vector<PairValues> pairs;       // AllPairings output
    std::vector<double> gate_arguments;  // x + y - alpha in [0,1] space
    std::vector<double> fuzzy;           // FuzzyLogic output, signed
    std::vector<double> selector_raw;    // W x before clamping
    std::vector<double> output;          // clamped selector output
  };

  const LogicNetwork* owner = nullptr;
  std::uint64_t version = 0;
  std::vector<double> normalized;
  std::vector<Part> parts;
  std::vector<double> outputs;
};

struct ForwardResult {
  Decision decision;
  ForwardCache cache;
};

/// Throws ContractError when the feature vector has the wrong length.
ForwardResult forward(const LogicNetwork& net, std::span<const double> raw);

/// Signed network outputs without caching.
std::vector<double> network_outputs(const LogicNetwork& net,
                                    std::span<const double> raw);
Decision predict(const LogicNetwork& net, std::span<const double> raw);

/// Parameter gradients, shaped like the network parameters.
struct Gradients {
  std::vector<std::vector<double>> alphas;
  std::vector<Matrix> selectors;

  static Gradients zeros_like(const LogicNetwork& net);
  void zero();
};

/// Accumulates d loss / d parameters into `grads` given d loss / d outputs.
/// Throws ContractError when the cache does not belong to the current
/// parameters of `net`.
void backward_accumulate(const LogicNetwork& net, const ForwardCache& cache,
                         std::span<const double> output_grad,
                         Gradients& grads);

Gradients backward(const LogicNetwork& net, const ForwardCache& cache,
                   std::span<const double> output_grad);

}  // namespace uninet

#endif  // UNINET_NETWORK_HPP_
