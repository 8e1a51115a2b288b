// Nilpotent fuzzy operator algebra: cutting and squashing functions, the
// weighted general operator and its two-input special case x (alpha) y.
//
// Truth values live in [0, 1]. The smooth operators use the squashing
// function as a differentiable stand-in for the cutting function, so every
// function the network differentiates has an analytic derivative here.

#ifndef UNINET_FUZZY_HPP_
#define UNINET_FUZZY_HPP_

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace uninet {

/// Parameters of the squashing function: ramp centre, ramp width and the
/// smoothness (steepness) factor.
struct SquashParams {
  double center = 0.5;
  double ramp_width = 1.0;
  double beta = 80.0;

  /// Throws DomainError unless all fields are finite, ramp_width > 0, beta > 0.
  void validate() const;

  friend bool operator==(const SquashParams&, const SquashParams&) = default;
};

/// Clamp to [0, 1]. Throws DomainError on NaN or infinity.
double cut(double x);

/// (1/(λβ)) ln[(1 + e^{β(x-(a-λ/2))}) / (1 + e^{β(x-(a+λ/2))})], evaluated
/// with stable softplus terms so that large β·x never overflows.
double squash(double x, const SquashParams& p = {});

/// dS/dx = (1/λ)[σ(β(x-(a-λ/2))) - σ(β(x-(a+λ/2)))].
double squash_grad(double x, const SquashParams& p = {});

/// Monotone increasing bijection f on [0, 1] with its inverse.
struct Generator {
  std::function<double(double)> forward;
  std::function<double(double)> inverse;

  static Generator identity();
};

/// Weights, neutral level and generator of the weighted general operator.
/// Weights only have to be nonzero: negation (w = -1) and the preference
/// operator need negative weights.
struct GeneralOpSpec {
  std::vector<double> weights;
  double neutral = 0.5;
  Generator generator = Generator::identity();

  void validate() const;
};

/// f⁻¹(cut(Σ wᵢ(f(xᵢ) - f(ν)) + f(ν))).
double general_op(std::span<const double> xs, const GeneralOpSpec& spec);

/// cut(x + y - alpha).
double binary_op_crisp(double x, double y, double alpha);

/// S(x + y - alpha).
double binary_op_smooth(double x, double y, double alpha,
                        const SquashParams& p = {});

struct BinaryOpGrads {
  double dx;
  double dy;
  double dalpha;
};

BinaryOpGrads binary_op_smooth_grads(double x, double y, double alpha,
                                     const SquashParams& p = {});

/// Strong negation 1 - x (the one-input general operator, w = -1, ν = 1/2).
double negation(double x);

/// Preference operator p_w(x, y) = cut(w(y - x) + 1/2) with identity generator.
double preference_op(double x, double y, double w);

enum class OperatorKind { Disjunction, Aggregative, Conjunction, Other };

inline constexpr double kDefaultAlphaTolerance = 0.15;

/// Snap a compensation level to the operator it approximates: 0 -> or,
/// 1/2 -> uni, 1 -> and. When bands overlap the nearest centre wins and an
/// exact midpoint goes to Aggregative.
OperatorKind classify_alpha(double alpha,
                            double tolerance = kDefaultAlphaTolerance);

/// Canonical alpha of a named kind (0, 0.5, 1). Other has none.
double canonical_alpha(OperatorKind kind);

/// "or", "uni", "and" or "op".
std::string_view operator_name(OperatorKind kind);

}  // namespace uninet

#endif  // UNINET_FUZZY_HPP_
