#include "uninet/extraction.hpp"

#include <algorithm>
#include <cmath>

#include "uninet/errors.hpp"

namespace uninet {

void ExtractionConfig::validate() const {
  if (!(alpha_tolerance >= 0)) throw ConfigError("alpha_tolerance must be >= 0");
  if (!(weight_keep_ratio > 0 && weight_keep_ratio <= 1)) {
    throw ConfigError("weight_keep_ratio must lie in (0, 1]");
  }
  if (!(min_abs_weight >= 0)) throw ConfigError("min_abs_weight must be >= 0");
}

std::vector<std::vector<OperatorKind>> snap_operators(const LogicNetwork& net,
                                                      const ExtractionConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<OperatorKind>> kinds;
  for (const auto& part : net.parts()) {
    auto& row = kinds.emplace_back();
    for (double a : part.alphas) row.push_back(classify_alpha(a, cfg.alpha_tolerance));
  }
  return kinds;
}

LogicNetwork snap_network(const LogicNetwork& net, const ExtractionConfig& cfg) {
  const auto kinds = snap_operators(net, cfg);
  LogicNetwork out = net;
  for (std::size_t p = 0; p < out.logic_parts(); ++p) {
    auto& alphas = out.mutable_alphas(p);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      if (kinds[p][i] != OperatorKind::Other) alphas[i] = canonical_alpha(kinds[p][i]);
    }
  }
  return out;
}

namespace {

class Tracer {
 public:
  Tracer(const LogicNetwork& net, const ExtractionConfig& cfg) : net_(net), cfg_(cfg) {}

  LogicExpr unit(std::size_t part, std::size_t row_index) {
    const auto row = net_.part(part).selector.row(row_index);
    double max_w = 0;
    for (double w : row) max_w = std::max(max_w, std::abs(w));
    if (max_w < cfg_.min_abs_weight || max_w == 0) return LogicExpr::constant(true);
    const double keep = cfg_.weight_keep_ratio * max_w;
    std::vector<LogicExpr> terms;
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (std::abs(row[s]) < keep) continue;
      LogicExpr term = slot(part, s);
      terms.push_back(row[s] < 0 ? LogicExpr::negate(std::move(term)) : std::move(term));
    }
    max_terms = std::max(max_terms, terms.size());
    LogicExpr acc = std::move(terms.front());
    for (std::size_t i = 1; i < terms.size(); ++i) {
      acc = LogicExpr::binary(OperatorKind::Aggregative, 0.5, std::move(acc),
                              std::move(terms[i]));
    }
    return acc;
  }

  std::size_t max_terms = 0;

 private:
  LogicExpr operand(std::size_t part, std::size_t index) {
    if (part == 0) return LogicExpr::input(index);
    return unit(part - 1, index);
  }

  LogicExpr slot(std::size_t part, std::size_t s) {
    const auto& p = net_.part(part);
    const Pairing& pr = p.pairings[s];
    LogicExpr left = operand(part, pr.first);
    LogicExpr right = pr.kind == Pairing::Kind::Pair
                          ? operand(part, pr.second)
                          : LogicExpr::constant(pr.kind == Pairing::Kind::WithTrue);
    return LogicExpr::binary(p.alphas[s], std::move(left), std::move(right),
                             cfg_.alpha_tolerance);
  }

  const LogicNetwork& net_;
  const ExtractionConfig& cfg_;
};

std::size_t find_slot(const std::vector<Pairing>& table, const Pairing& p) {
  const auto it = std::find(table.begin(), table.end(), p);
  if (it == table.end()) throw ConfigError("plant_network: pairing not in table");
  return static_cast<std::size_t>(it - table.begin());
}

bool is_const(const LogicExpr& e) {
  return e.kind() == LogicExpr::Kind::True || e.kind() == LogicExpr::Kind::False;
}

Pairing const_pairing(std::size_t first, const LogicExpr& c) {
  return c.kind() == LogicExpr::Kind::True ? Pairing::with_true(first)
                                           : Pairing::with_false(first);
}

void require_named_binary(const LogicExpr& e) {
  if (e.kind() != LogicExpr::Kind::Binary || e.op() == OperatorKind::Other) {
    throw ConfigError("plant_network: expected a named binary node");
  }
}

/// Slot realizing a depth-1 node over raw inputs.
Pairing leaf_pairing(const LogicExpr& e) {
  require_named_binary(e);
  if (e.left().kind() != LogicExpr::Kind::Input) {
    throw ConfigError("plant_network: left operand must be an input");
  }
  if (is_const(e.right())) return const_pairing(e.left().index(), e.right());
  if (e.right().kind() != LogicExpr::Kind::Input ||
      e.left().index() >= e.right().index()) {
    throw ConfigError("plant_network: operands must be inputs i < j");
  }
  return Pairing::pair(e.left().index(), e.right().index());
}

}  // namespace

TracedExpression trace_expression(const LogicNetwork& net, const ExtractionConfig& cfg,
                                  std::size_t output_index) {
  cfg.validate();
  if (output_index >= net.output_width()) {
    throw ContractError("output index " + std::to_string(output_index) +
                        " out of range");
  }
  Tracer tracer(net, cfg);
  TracedExpression t;
  t.expr = tracer.unit(net.logic_parts() - 1, output_index);
  t.output_index = output_index;
  t.max_terms = tracer.max_terms;
  return t;
}

OmitDecision should_omit(const LogicExpr& expr, const ExtractionConfig& cfg,
                         std::size_t max_terms) {
  if (!expr.has_inputs()) return {true, "constant"};
  if (render(expr).size() > cfg.max_rendered_length) return {true, "too long"};
  if (max_terms > cfg.max_terms_per_node) return {true, "too many terms"};
  if (expr.leaf_count() > cfg.max_leaves) return {true, "too many leaves"};
  return {false, {}};
}

OmitDecision should_omit(const TracedExpression& traced, const ExtractionConfig& cfg) {
  return should_omit(traced.expr, cfg, traced.max_terms);
}

Faithfulness faithfulness(const LogicNetwork& net, const LogicExpr& expr,
                          const Matrix& raw_rows, std::size_t output_index) {
  if (raw_rows.cols() != net.feature_count()) {
    throw ContractError("faithfulness: row width does not match the model");
  }
  Faithfulness f;
  f.total = raw_rows.rows();
  std::size_t agree = 0, decisive_agree = 0;
  std::vector<double> truth(net.feature_count());
  for (std::size_t r = 0; r < raw_rows.rows(); ++r) {
    const auto norm = normalize_forward(raw_rows.row(r), net.bounds());
    for (std::size_t i = 0; i < norm.size(); ++i) truth[i] = (norm[i] + 1.0) / 2.0;
    const double value = expr.evaluate(truth);
    const auto z = network_outputs(net, raw_rows.row(r));
    const bool net_says = (z.at(output_index) + 1.0) / 2.0 >= 0.5;
    const bool match = (value >= 0.5) == net_says;
    agree += match;
    if (value == 0.5) {
      ++f.undecided;
    } else {
      decisive_agree += match;
    }
  }
  const std::size_t decisive = f.total - f.undecided;
  f.agreement = f.total ? static_cast<double>(agree) / static_cast<double>(f.total) : 1.0;
  f.decisive_agreement =
      decisive ? static_cast<double>(decisive_agree) / static_cast<double>(decisive) : 1.0;
  return f;
}

Faithfulness faithfulness(const LogicNetwork& net, const LogicExpr& expr,
                          const Dataset& data, std::size_t output_index) {
  return faithfulness(net, expr, data.features, output_index);
}

Matrix boolean_truth_table(std::size_t n) {
  if (n >= 8 * sizeof(std::size_t) - 1) throw ConfigError("truth table too large");
  const std::size_t rows = std::size_t{1} << n;
  Matrix m(rows, n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < n; ++c) m(r, c) = (r >> c) & 1 ? 1.0 : -1.0;
  }
  return m;
}

DominantGate dominant_gate(const LogicNetwork& net, const ExtractionConfig& cfg,
                           std::size_t output_index) {
  const auto& first = net.part(0);
  std::vector<double> unit_weight;
  if (net.logic_parts() == 1) {
    unit_weight.assign(first.selector.rows(), 0.0);
    unit_weight.at(output_index) = 1.0;
  } else {
    // Downstream mass of each hidden unit, propagated back from the output.
    std::vector<double> mass(net.part(net.logic_parts() - 1).selector.rows(), 0.0);
    mass.at(output_index) = 1.0;
    for (std::size_t p = net.logic_parts() - 1; p >= 1; --p) {
      const auto& part = net.part(p);
      std::vector<double> below(net.part(p - 1).selector.rows(), 0.0);
      for (std::size_t r = 0; r < part.selector.rows(); ++r) {
        if (mass[r] == 0) continue;
        for (std::size_t s = 0; s < part.selector.cols(); ++s) {
          const double w = mass[r] * std::abs(part.selector(r, s));
          const Pairing& pr = part.pairings[s];
          below[pr.first] += w;
          if (pr.kind == Pairing::Kind::Pair) below[pr.second] += w;
        }
      }
      mass = std::move(below);
    }
    unit_weight = std::move(mass);
  }
  DominantGate g;
  double best = -1;
  for (std::size_t s = 0; s < first.selector.cols(); ++s) {
    double score = 0;
    for (std::size_t u = 0; u < first.selector.rows(); ++u) {
      score = std::max(score, unit_weight[u] * std::abs(first.selector(u, s)));
    }
    if (score > best) {
      best = score;
      g.slot = s;
    }
  }
  g.pairing = first.pairings[g.slot];
  g.alpha = first.alphas[g.slot];
  g.kind = classify_alpha(g.alpha, cfg.alpha_tolerance);
  return g;
}

LogicNetwork plant_network(const LogicExpr& tree, std::size_t feature_count,
                           std::size_t hidden_width, const SquashParams& squash) {
  require_named_binary(tree);
  const bool deep = tree.left().kind() == LogicExpr::Kind::Binary;
  auto make_part = [](std::size_t width, std::size_t rows) {
    LogicPart part;
    part.pairings = enumerate_pairings(width);
    part.alphas.assign(part.pairings.size(), 0.5);
    part.selector = Matrix(rows, part.pairings.size());
    return part;
  };
  auto set_slot = [](LogicPart& part, std::size_t row, const Pairing& p,
                     const LogicExpr& node) {
    const auto s = find_slot(part.pairings, p);
    for (std::size_t r = 0; r < part.selector.rows(); ++r) {
      if (part.selector(r, s) != 0 && part.alphas[s] != node.alpha()) {
        throw ConfigError("plant_network: one pairing cannot carry two operators");
      }
    }
    part.alphas[s] = node.alpha();
    part.selector(row, s) = 1.0;
  };
  std::vector<LogicPart> parts;
  if (!deep) {
    auto part = make_part(feature_count, 1);
    set_slot(part, 0, leaf_pairing(tree), tree);
    parts.push_back(std::move(part));
  } else {
    if (hidden_width < 2) throw ConfigError("plant_network: hidden width < 2");
    auto lower = make_part(feature_count, hidden_width);
    auto upper = make_part(hidden_width, 1);
    set_slot(lower, 0, leaf_pairing(tree.left()), tree.left());
    if (is_const(tree.right())) {
      set_slot(upper, 0, const_pairing(0, tree.right()), tree);
    } else {
      set_slot(lower, 1, leaf_pairing(tree.right()), tree.right());
      set_slot(upper, 0, Pairing::pair(0, 1), tree);
    }
    parts.push_back(std::move(lower));
    parts.push_back(std::move(upper));
  }
  return LogicNetwork(feature_count, 2, squash, NormalizationBounds::unit(feature_count),
                      std::move(parts));
}

}  // namespace uninet
