// Logic expressions read out of a trained network.
//
// Text grammar produced by render() and accepted by parse_expression():
//
//   expr    := operand | operand " " opname " " operand
//   operand := "(" index ")" | "(" expr ")" | "1" | "0" | "1-" operand
//   opname  := "or" | "and" | "uni" | "op[" fixed2 "]"
//
// so ((28) uni (34)) uni ((6) uni (34)) and 1-((1) uni (6)) round-trip.

#ifndef UNINET_EXPR_HPP_
#define UNINET_EXPR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "uninet/fuzzy.hpp"

namespace uninet {

class LogicExpr {
 public:
  enum class Kind { Input, True, False, Binary, Not };

  static LogicExpr input(std::size_t index);
  static LogicExpr constant(bool value);
  /// Operator kind is taken from classify_alpha(alpha, tolerance).
  static LogicExpr binary(double alpha, LogicExpr left, LogicExpr right,
                          double tolerance = kDefaultAlphaTolerance);
  static LogicExpr binary(OperatorKind kind, double alpha, LogicExpr left,
                          LogicExpr right);
  static LogicExpr negate(LogicExpr child);

  Kind kind() const { return kind_; }
  bool is_leaf() const { return children_.empty(); }
  std::size_t index() const { return index_; }
  OperatorKind op() const { return op_; }
  double alpha() const { return alpha_; }
  const LogicExpr& left() const { return children_.at(0); }
  const LogicExpr& right() const { return children_.at(1); }
  const LogicExpr& child() const { return children_.at(0); }

  std::size_t leaf_count() const;  // Input leaves only
  std::size_t binary_depth() const;
  std::size_t max_input_index() const;  // 0 when there are no inputs
  bool has_inputs() const;

  /// Crisp value on truth values in [0, 1]: Binary -> cut(l + r - alpha),
  /// Not -> 1 - x.
  double evaluate(std::span<const double> truth) const;

  friend bool operator==(const LogicExpr&, const LogicExpr&) = default;

 private:
  LogicExpr() = default;

  Kind kind_ = Kind::False;
  std::size_t index_ = 0;
  OperatorKind op_ = OperatorKind::Other;
  double alpha_ = 0;
  std::vector<LogicExpr> children_;
};

/// Equality up to rendering precision: same shape, leaves and operator
/// kinds; alphas compared only for Other nodes, at two decimals.
bool same_shape(const LogicExpr& a, const LogicExpr& b);

/// Renders with leaf indices, or with names when `leaf_names` is non-empty.
std::string render(const LogicExpr& e,
                   std::span<const std::string> leaf_names = {});

/// Inverse of index-mode render(). Throws DataError on malformed text.
LogicExpr parse_expression(std::string_view text,
                           double tolerance = kDefaultAlphaTolerance);

nlohmann::json expr_to_json(const LogicExpr& e);

}  // namespace uninet

#endif  // UNINET_EXPR_HPP_
