// Reading logic expressions out of a trained network.
//
// Tracing starts at one row of the last FeatureSelector and walks back:
// a row keeps the slots with |w| >= weight_keep_ratio * max|w|, a negative
// kept weight becomes Not, several kept slots are folded left with uni, and
// every FuzzyLogic slot becomes a Binary node over its pairing operands.
// First-part operands are Input(raw feature index); WithTrue / WithFalse
// operands are the constants 1 / 0. tanh between the parts is not part of
// the readout.

#ifndef UNINET_EXTRACTION_HPP_
#define UNINET_EXTRACTION_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "uninet/dataset.hpp"
#include "uninet/expr.hpp"
#include "uninet/matrix.hpp"
#include "uninet/network.hpp"

namespace uninet {

struct ExtractionConfig {
  double alpha_tolerance = kDefaultAlphaTolerance;
  double weight_keep_ratio = 0.5;
  /// Rows whose largest |w| is below this are dead and read as constant 1.
  double min_abs_weight = 1e-3;
  std::size_t max_terms_per_node = 4;
  std::size_t max_leaves = 4;
  std::size_t max_rendered_length = 120;

  /// Throws ConfigError.
  void validate() const;
};

/// classify_alpha of every FuzzyLogic slot, per logic part.
std::vector<std::vector<OperatorKind>> snap_operators(const LogicNetwork& net,
                                                      const ExtractionConfig& cfg);

/// Copy of `net` with every named slot moved to its canonical alpha; Other
/// slots keep their value. Idempotent.
LogicNetwork snap_network(const LogicNetwork& net, const ExtractionConfig& cfg);

struct TracedExpression {
  LogicExpr expr = LogicExpr::constant(true);
  std::size_t output_index = 0;
  /// Largest number of slots kept by a single selector row.
  std::size_t max_terms = 0;
};

TracedExpression trace_expression(const LogicNetwork& net,
                                  const ExtractionConfig& cfg,
                                  std::size_t output_index = 0);

struct OmitDecision {
  bool omit = false;
  std::string reason;  // "constant", "too long", "too many leaves", "too many terms"
};

OmitDecision should_omit(const LogicExpr& expr, const ExtractionConfig& cfg,
                         std::size_t max_terms = 1);
OmitDecision should_omit(const TracedExpression& traced, const ExtractionConfig& cfg);

struct Faithfulness {
  double agreement = 0;
  /// Agreement over rows where the crisp value is not exactly 1/2.
  double decisive_agreement = 0;
  std::size_t undecided = 0;
  std::size_t total = 0;
};

/// Crisp expression value on (x~ + 1)/2 of the normalized features against
/// the network decision of `output_index` ((z + 1)/2 >= 0.5). With no
/// decisive rows, decisive_agreement is 1.
Faithfulness faithfulness(const LogicNetwork& net, const LogicExpr& expr,
                          const Matrix& raw_rows, std::size_t output_index = 0);
Faithfulness faithfulness(const LogicNetwork& net, const LogicExpr& expr,
                          const Dataset& data, std::size_t output_index = 0);

/// All 2^n rows of {-1, +1}^n, feature 0 as the least significant bit.
Matrix boolean_truth_table(std::size_t n);

struct DominantGate {
  std::size_t slot = 0;  // first-part pairing slot
  Pairing pairing = Pairing::pair(0, 1);
  double alpha = 0;
  OperatorKind kind = OperatorKind::Other;
};

/// First-part slot with the largest |W1| weight, each weight scaled by the
/// downstream |W2| mass of its hidden unit for the given output.
DominantGate dominant_gate(const LogicNetwork& net, const ExtractionConfig& cfg,
                           std::size_t output_index = 0);

/// Network with one-hot selectors realizing `tree`, which must be
///   depth 1: Binary(op, Input i, Input j) with i < j, or
///            Binary(op, Input i, constant), or
///   depth 2: Binary(op, A, B) or Binary(op, A, constant) with A, B of
///            depth 1,
/// and named operators only. Depth 1 gives one logic part, depth 2 two
/// parts with hidden width `hidden_width`. Bounds are the identity on
/// [-1, 1]. Throws ConfigError for other shapes, and when both depth-1
/// subtrees use the same pairing with different operators.
LogicNetwork plant_network(const LogicExpr& tree, std::size_t feature_count,
                           std::size_t hidden_width = 2,
                           const SquashParams& squash = {});

}  // namespace uninet

#endif  // UNINET_EXTRACTION_HPP_
