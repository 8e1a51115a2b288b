#include "uninet/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uninet/errors.hpp"

namespace uninet {
namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument is not finite");
  }
}

// ln(1 + e^t) without overflow.
double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double logistic(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void SquashParams::validate() const {
  if (!std::isfinite(center) || !std::isfinite(ramp_width) ||
      !std::isfinite(beta)) {
    throw DomainError("squash parameters must be finite");
  }
  if (ramp_width <= 0) throw DomainError("squash ramp width must be > 0");
  if (beta <= 0) throw DomainError("squash beta must be > 0");
}

double cut(double x) {
  require_finite(x, "cut");
  if (x < 0) return 0.0;
  if (x > 1) return 1.0;
  return x;
}

double squash(double x, const SquashParams& p) {
  require_finite(x, "squash");
  p.validate();
  // S(x) = 1 - S(2a - x); evaluating only the lower half keeps the result
  // monotone and inside [0, 1] after rounding.
  const bool reflect = x > p.center;
  const double y = reflect ? 2 * p.center - x : x;
  const double lower = p.beta * (y - (p.center - p.ramp_width / 2));
  const double upper = p.beta * (y - (p.center + p.ramp_width / 2));
  const double s =
      std::max(0.0, (softplus(lower) - softplus(upper)) / (p.ramp_width * p.beta));
  return reflect ? 1.0 - s : s;
}

double squash_grad(double x, const SquashParams& p) {
  require_finite(x, "squash_grad");
  p.validate();
  const double lower = p.beta * (x - (p.center - p.ramp_width / 2));
  const double upper = p.beta * (x - (p.center + p.ramp_width / 2));
  return (logistic(lower) - logistic(upper)) / p.ramp_width;
}

Generator Generator::identity() {
  return {[](double t) { return t; }, [](double t) { return t; }};
}

void GeneralOpSpec::validate() const {
  if (weights.empty()) throw ContractError("general_op: no weights");
  for (double w : weights) {
    if (!std::isfinite(w) || w == 0) {
      throw ContractError("general_op: weights must be finite and nonzero");
    }
  }
  if (!(neutral >= 0 && neutral <= 1)) {
    throw ContractError("general_op: neutral level must lie in [0,1]");
  }
  if (!generator.forward || !generator.inverse) {
    throw ContractError("general_op: generator pair is incomplete");
  }
}

double general_op(std::span<const double> xs, const GeneralOpSpec& spec) {
  spec.validate();
  if (xs.size() != spec.weights.size()) {
    throw ContractError("general_op: " + std::to_string(xs.size()) +
                        " inputs for " + std::to_string(spec.weights.size()) +
                        " weights");
  }
  const auto& f = spec.generator.forward;
  const double f_nu = f(spec.neutral);
  double sum = f_nu;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += spec.weights[i] * (f(xs[i]) - f_nu);
  }
  return spec.generator.inverse(cut(sum));
}

double binary_op_crisp(double x, double y, double alpha) {
  return cut(x + y - alpha);
}

double binary_op_smooth(double x, double y, double alpha,
                        const SquashParams& p) {
  return squash(x + y - alpha, p);
}

BinaryOpGrads binary_op_smooth_grads(double x, double y, double alpha,
                                     const SquashParams& p) {
  const double s = squash_grad(x + y - alpha, p);
  return {s, s, -s};
}

double negation(double x) {
  static const GeneralOpSpec kNegation{{-1.0}, 0.5, Generator::identity()};
  return general_op(std::span<const double>(&x, 1), kNegation);
}

double preference_op(double x, double y, double w) {
  require_finite(w, "preference_op");
  return cut(w * (y - x) + 0.5);
}

OperatorKind classify_alpha(double alpha, double tolerance) {
  if (!(tolerance >= 0)) throw DomainError("classify_alpha: tolerance < 0");
  const double d_or = std::abs(alpha - 0.0);
  const double d_uni = std::abs(alpha - 0.5);
  const double d_and = std::abs(alpha - 1.0);
  // Nearest centre first; a midpoint tie between 0.5 and an endpoint keeps
  // Aggregative.
  if (d_uni <= d_or && d_uni <= d_and) {
    return d_uni <= tolerance ? OperatorKind::Aggregative : OperatorKind::Other;
  }
  if (d_or < d_and) {
    return d_or <= tolerance ? OperatorKind::Disjunction : OperatorKind::Other;
  }
  return d_and <= tolerance ? OperatorKind::Conjunction : OperatorKind::Other;
}

double canonical_alpha(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Disjunction:
      return 0.0;
    case OperatorKind::Aggregative:
      return 0.5;
    case OperatorKind::Conjunction:
      return 1.0;
    case OperatorKind::Other:
      break;
  }
  throw ContractError("canonical_alpha: Other has no canonical value");
}

std::string_view operator_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Disjunction:
      return "or";
    case OperatorKind::Aggregative:
      return "uni";
    case OperatorKind::Conjunction:
      return "and";
    case OperatorKind::Other:
      return "op";
  }
  return "op";
}

}  // namespace uninet
