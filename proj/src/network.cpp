#include "uninet/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uninet/errors.hpp"
#include "uninet/random.hpp"

namespace uninet {
namespace {

double clamp_signed(double v) { return std::clamp(v, -1.0, 1.0); }

std::size_t part_width_out(std::size_t part, std::size_t parts,
                           std::size_t hidden, std::size_t out) {
  return part + 1 == parts ? out : hidden;
}

}  // namespace

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Normalization:
      return "Normalization";
    case LayerKind::AllPairings:
      return "AllPairings";
    case LayerKind::FuzzyLogic:
      return "FuzzyLogic";
    case LayerKind::FeatureSelector:
      return "FeatureSelector";
    case LayerKind::TanhRemap:
      return "TanhRemap";
    case LayerKind::MaxClassifier:
      return "MaxClassifier";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view name) {
  for (auto kind : {LayerKind::Normalization, LayerKind::AllPairings,
                    LayerKind::FuzzyLogic, LayerKind::FeatureSelector,
                    LayerKind::TanhRemap, LayerKind::MaxClassifier}) {
    if (layer_kind_name(kind) == name) return kind;
  }
  throw ConfigError("unknown layer kind '" + std::string(name) + "'");
}

std::size_t pairing_count(std::size_t width) {
  return width * (width - 1) / 2 + 2 * width;
}

std::vector<Pairing> enumerate_pairings(std::size_t width) {
  std::vector<Pairing> table;
  table.reserve(pairing_count(width));
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t j = i + 1; j < width; ++j) table.push_back(Pairing::pair(i, j));
  }
  for (std::size_t i = 0; i < width; ++i) table.push_back(Pairing::with_true(i));
  for (std::size_t i = 0; i < width; ++i) table.push_back(Pairing::with_false(i));
  return table;
}

NormalizationBounds NormalizationBounds::fit(const Matrix& rows) {
  if (rows.rows() == 0) throw DataError("cannot fit normalization on no rows");
  NormalizationBounds b;
  b.lower.assign(rows.row(0).begin(), rows.row(0).end());
  b.upper = b.lower;
  for (std::size_t r = 1; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      b.lower[c] = std::min(b.lower[c], rows(r, c));
      b.upper[c] = std::max(b.upper[c], rows(r, c));
    }
  }
  return b;
}

NormalizationBounds NormalizationBounds::unit(std::size_t width) {
  return {std::vector<double>(width, -1.0), std::vector<double>(width, 1.0)};
}

std::vector<double> normalize_forward(std::span<const double> raw,
                                      const NormalizationBounds& bounds) {
  if (raw.size() != bounds.size()) {
    throw ContractError("normalize: " + std::to_string(raw.size()) +
                        " features, bounds for " +
                        std::to_string(bounds.size()));
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double lo = bounds.lower[i];
    const double hi = bounds.upper[i];
    out[i] = hi > lo ? clamp_signed(2 * (raw[i] - lo) / (hi - lo) - 1) : 0.0;
  }
  return out;
}

std::vector<PairValues> all_pairings_forward(std::span<const double> x,
                                             std::span<const Pairing> table) {
  std::vector<PairValues> out;
  out.reserve(table.size());
  for (const Pairing& p : table) {
    switch (p.kind) {
      case Pairing::Kind::Pair:
        out.push_back({x[p.first], x[p.second]});
        break;
      case Pairing::Kind::WithTrue:
        out.push_back({x[p.first], 1.0});
        break;
      case Pairing::Kind::WithFalse:
        out.push_back({x[p.first], -1.0});
        break;
    }
  }
  return out;
}

std::vector<double> fuzzy_logic_forward(std::span<const PairValues> pairs,
                                        std::span<const double> alphas,
                                        const SquashParams& p) {
  if (pairs.size() != alphas.size()) {
    throw ContractError("fuzzy_logic_forward: one alpha per pairing required");
  }
  std::vector<double> out(pairs.size());
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const double x = (pairs[s].first + 1) / 2;
    const double y = (pairs[s].second + 1) / 2;
    out[s] = 2 * binary_op_smooth(x, y, alphas[s], p) - 1;
  }
  return out;
}

std::vector<double> feature_selector_forward(std::span<const double> x,
                                             const Matrix& weights) {
  if (x.size() != weights.cols()) {
    throw ContractError("feature_selector_forward: width mismatch");
  }
  std::vector<double> out(weights.rows());
  for (std::size_t r = 0; r < weights.rows(); ++r) {
    const auto row = weights.row(r);
    double acc = 0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
    out[r] = clamp_signed(acc);
  }
  return out;
}

std::vector<double> tanh_remap_forward(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [](double v) { return std::tanh(v); });
  return out;
}

Decision max_classify(std::span<const double> outputs) {
  if (outputs.empty()) throw ContractError("max_classify: no outputs");
  Decision d;
  d.scores.resize(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    d.scores[i] = (outputs[i] + 1) / 2;
  }
  if (outputs.size() == 1) {
    d.label = d.scores[0] >= 0.5 ? 1 : 0;
  } else {
    d.label = static_cast<std::size_t>(
        std::max_element(outputs.begin(), outputs.end()) - outputs.begin());
  }
  return d;
}

LogicNetwork::LogicNetwork(std::size_t feature_count, std::size_t class_count,
                           SquashParams squash, NormalizationBounds bounds,
                           std::vector<LogicPart> parts)
    : feature_count_(feature_count),
      class_count_(class_count),
      output_width_(class_count > 2 ? class_count : 1),
      squash_(squash),
      bounds_(std::move(bounds)),
      parts_(std::move(parts)) {
  if (feature_count_ < 2) throw ConfigError("network needs at least 2 features");
  if (class_count_ < 2) throw ConfigError("network needs at least 2 classes");
  if (parts_.empty()) throw ConfigError("network needs at least one logic part");
  try {
    squash_.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (bounds_.lower.size() != feature_count_ ||
      bounds_.upper.size() != feature_count_) {
    throw ConfigError("normalization bounds do not match feature count");
  }
  std::size_t width = feature_count_;
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    const LogicPart& part = parts_[p];
    const std::string where = "logic part " + std::to_string(p) + ": ";
    if (part.pairings != enumerate_pairings(width)) {
      throw ConfigError(where + "pairing table does not match input width " +
                        std::to_string(width));
    }
    if (part.alphas.size() != part.pairings.size()) {
      throw ConfigError(where + "one alpha per pairing required");
    }
    for (double a : part.alphas) {
      if (!(a >= 0 && a <= 1)) throw ConfigError(where + "alpha outside [0,1]");
    }
    if (part.selector.cols() != part.pairings.size()) {
      throw ConfigError(where + "selector width does not match pairings");
    }
    if (p + 1 == parts_.size() && part.selector.rows() != output_width_) {
      throw ConfigError(where + "final selector must have " +
                        std::to_string(output_width_) + " rows");
    }
    if (part.selector.rows() < 1 || (p + 1 < parts_.size() && part.selector.rows() < 2)) {
      throw ConfigError(where + "selector too narrow");
    }
    width = part.selector.rows();
  }
}

void LogicNetwork::set_bounds(NormalizationBounds bounds) {
  if (bounds.lower.size() != feature_count_ ||
      bounds.upper.size() != feature_count_) {
    throw ConfigError("normalization bounds do not match feature count");
  }
  bounds_ = std::move(bounds);
  ++version_;
}

std::vector<double>& LogicNetwork::mutable_alphas(std::size_t part) {
  ++version_;
  return parts_.at(part).alphas;
}

Matrix& LogicNetwork::mutable_selector(std::size_t part) {
  ++version_;
  return parts_.at(part).selector;
}

void LogicNetwork::project_alphas() {
  ++version_;
  for (auto& part : parts_) {
    for (double& a : part.alphas) a = std::clamp(a, 0.0, 1.0);
  }
}

std::vector<LayerSpec> LogicNetwork::layer_specs() const {
  std::vector<LayerSpec> specs;
  specs.push_back({LayerKind::Normalization, feature_count_, feature_count_});
  std::size_t width = feature_count_;
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    const std::size_t slots = parts_[p].pairings.size();
    const std::size_t out = parts_[p].selector.rows();
    specs.push_back({LayerKind::AllPairings, width, slots});
    specs.push_back({LayerKind::FuzzyLogic, slots, slots});
    specs.push_back({LayerKind::FeatureSelector, slots, out});
    if (p + 1 < parts_.size()) specs.push_back({LayerKind::TanhRemap, out, out});
    width = out;
  }
  specs.push_back({LayerKind::MaxClassifier, width, 1});
  return specs;
}

LogicNetwork build_network(std::size_t feature_count, std::size_t class_count,
                           const NetworkConfig& config) {
  if (feature_count < 2) {
    throw ConfigError("build_network: at least 2 features are needed to pair");
  }
  if (class_count < 2) throw ConfigError("build_network: at least 2 classes");
  if (config.logic_parts < 1) throw ConfigError("build_network: logic_parts < 1");
  if (config.logic_parts > 1 && config.hidden_width < 2) {
    throw ConfigError("build_network: hidden width must be at least 2");
  }
  const std::size_t out = class_count > 2 ? class_count : 1;
  Rng rng(config.seed);
  std::vector<LogicPart> parts;
  std::size_t width = feature_count;
  for (std::size_t p = 0; p < config.logic_parts; ++p) {
    const std::size_t slots = pairing_count(width);
    if (slots > config.max_pairings) {
      throw ConfigError("build_network: " + std::to_string(slots) +
                        " pairings exceed the cap of " +
                        std::to_string(config.max_pairings));
    }
    LogicPart part;
    part.pairings = enumerate_pairings(width);
    part.alphas.resize(slots);
    for (double& a : part.alphas) a = rng.uniform(0.25, 0.75);
    const std::size_t rows =
        part_width_out(p, config.logic_parts, config.hidden_width, out);
    part.selector = Matrix(rows, slots);
    const double scale = 1.0 / std::sqrt(static_cast<double>(slots));
    for (double& w : part.selector.data()) w = rng.uniform(-0.5, 0.5) * scale;
    parts.push_back(std::move(part));
    width = rows;
  }
  return LogicNetwork(feature_count, class_count, config.squash,
                      NormalizationBounds::unit(feature_count), std::move(parts));
}

namespace {

void run_parts(const LogicNetwork& net, std::vector<double> x,
               ForwardCache* cache, std::vector<double>& outputs) {
  const auto& sp = net.squash();
  for (std::size_t p = 0; p < net.logic_parts(); ++p) {
    const LogicPart& part = net.part(p);
    if (p > 0) x = tanh_remap_forward(x);
    auto pairs = all_pairings_forward(x, part.pairings);
    std::vector<double> fuzzy(pairs.size());
    std::vector<double> args(cache ? pairs.size() : 0);
    for (std::size_t s = 0; s < pairs.size(); ++s) {
      const double arg =
          (pairs[s].first + 1) / 2 + (pairs[s].second + 1) / 2 - part.alphas[s];
      fuzzy[s] = 2 * squash(arg, sp) - 1;
      if (cache) args[s] = arg;
    }
    std::vector<double> raw(part.selector.rows());
    for (std::size_t r = 0; r < raw.size(); ++r) {
      const auto row = part.selector.row(r);
      double acc = 0;
      for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * fuzzy[c];
      raw[r] = acc;
    }
    std::vector<double> out(raw.size());
    std::transform(raw.begin(), raw.end(), out.begin(), clamp_signed);
    if (cache) {
      cache->parts.push_back({std::move(x), std::move(pairs), std::move(args),
                              std::move(fuzzy), std::move(raw), out});
    }
    x = std::move(out);
  }
  outputs = std::move(x);
}

}  // namespace

ForwardResult forward(const LogicNetwork& net, std::span<const double> raw) {
  if (raw.size() != net.feature_count()) {
    throw ContractError("forward: expected " +
                        std::to_string(net.feature_count()) + " features, got " +
                        std::to_string(raw.size()));
  }
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.owner = &net;
  cache.version = net.version();
  cache.normalized = normalize_forward(raw, net.bounds());
  cache.parts.reserve(net.logic_parts());
  run_parts(net, cache.normalized, &cache, cache.outputs);
  result.decision = max_classify(cache.outputs);
  return result;
}

std::vector<double> network_outputs(const LogicNetwork& net,
                                    std::span<const double> raw) {
  if (raw.size() != net.feature_count()) {
    throw ContractError("forward: expected " +
                        std::to_string(net.feature_count()) + " features, got " +
                        std::to_string(raw.size()));
  }
  std::vector<double> outputs;
  run_parts(net, normalize_forward(raw, net.bounds()), nullptr, outputs);
  return outputs;
}

Decision predict(const LogicNetwork& net, std::span<const double> raw) {
  return max_classify(network_outputs(net, raw));
}

Gradients Gradients::zeros_like(const LogicNetwork& net) {
  Gradients g;
  for (const auto& part : net.parts()) {
    g.alphas.emplace_back(part.alphas.size(), 0.0);
    g.selectors.emplace_back(part.selector.rows(), part.selector.cols());
  }
  return g;
}

void Gradients::zero() {
  for (auto& a : alphas) std::fill(a.begin(), a.end(), 0.0);
  for (auto& m : selectors) m.fill(0.0);
}

void backward_accumulate(const LogicNetwork& net, const ForwardCache& cache,
                         std::span<const double> output_grad,
                         Gradients& grads) {
  if (cache.owner != &net || cache.version != net.version() ||
      cache.parts.size() != net.logic_parts()) {
    throw ContractError("backward: forward cache is stale");
  }
  if (output_grad.size() != net.output_width()) {
    throw ContractError("backward: output gradient has wrong width");
  }
  if (grads.alphas.size() != net.logic_parts()) {
    grads = Gradients::zeros_like(net);
  }
  const auto& sp = net.squash();
  std::vector<double> upstream(output_grad.begin(), output_grad.end());
  for (std::size_t p = net.logic_parts(); p-- > 0;) {
    const LogicPart& part = net.part(p);
    const ForwardCache::Part& pc = cache.parts[p];
    const Matrix& w = part.selector;
    Matrix& gw = grads.selectors[p];
    std::vector<double> g_fuzzy(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
      const double raw = pc.selector_raw[r];
      // The signed clamp passes gradient only strictly inside (-1, 1).
      const double g = (raw > -1 && raw < 1) ? upstream[r] : 0.0;
      if (g == 0) continue;
      const auto wrow = w.row(r);
      auto grow = gw.row(r);
      for (std::size_t c = 0; c < wrow.size(); ++c) {
        grow[c] += g * pc.fuzzy[c];
        g_fuzzy[c] += g * wrow[c];
      }
    }
    std::vector<double> g_input(pc.input.size(), 0.0);
    auto& ga = grads.alphas[p];
    for (std::size_t s = 0; s < part.pairings.size(); ++s) {
      if (g_fuzzy[s] == 0) continue;
      // fuzzy = 2 S(arg) - 1, arg = (u+1)/2 + (v+1)/2 - alpha.
      const double g_arg = g_fuzzy[s] * 2 * squash_grad(pc.gate_arguments[s], sp);
      ga[s] -= g_arg;
      const Pairing& pr = part.pairings[s];
      g_input[pr.first] += g_arg / 2;
      if (pr.kind == Pairing::Kind::Pair) g_input[pr.second] += g_arg / 2;
    }
    if (p == 0) break;
    // input of part p is tanh(output of part p-1).
    for (std::size_t i = 0; i < g_input.size(); ++i) {
      g_input[i] *= 1 - pc.input[i] * pc.input[i];
    }
    upstream = std::move(g_input);
  }
}

Gradients backward(const LogicNetwork& net, const ForwardCache& cache,
                   std::span<const double> output_grad) {
  Gradients grads = Gradients::zeros_like(net);
  backward_accumulate(net, cache, output_grad, grads);
  return grads;
}

}  // namespace uninet
