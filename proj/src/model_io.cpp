#include "uninet/model_io.hpp"

#include <fstream>

#include "uninet/errors.hpp"

namespace uninet {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "uninet.logic_network";
constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.data()}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != m.rows() * m.cols()) {
    throw ConfigError("model: matrix value count does not match its shape");
  }
  m.data() = std::move(values);
  return m;
}

}  // namespace

json pairing_to_json(const Pairing& p) {
  switch (p.kind) {
    case Pairing::Kind::Pair:
      return json::array({"P", p.first, p.second});
    case Pairing::Kind::WithTrue:
      return json::array({"T", p.first});
    case Pairing::Kind::WithFalse:
      return json::array({"F", p.first});
  }
  return {};
}

Pairing pairing_from_json(const json& j) {
  const auto tag = j.at(0).get<std::string>();
  const auto first = j.at(1).get<std::size_t>();
  if (tag == "P") return Pairing::pair(first, j.at(2).get<std::size_t>());
  if (tag == "T") return Pairing::with_true(first);
  if (tag == "F") return Pairing::with_false(first);
  throw ConfigError("model: unknown pairing tag '" + tag + "'");
}

json network_to_json(const LogicNetwork& net) {
  json layers = json::array();
  for (const auto& spec : net.layer_specs()) {
    layers.push_back({{"kind", layer_kind_name(spec.kind)},
                      {"width_in", spec.width_in},
                      {"width_out", spec.width_out}});
  }
  json parts = json::array();
  for (const auto& part : net.parts()) {
    json table = json::array();
    for (const auto& p : part.pairings) table.push_back(pairing_to_json(p));
    parts.push_back({{"pairings", std::move(table)},
                     {"alphas", part.alphas},
                     {"selector", matrix_to_json(part.selector)}});
  }
  const auto& sp = net.squash();
  return {
      {"format", kFormat},
      {"format_version", kFormatVersion},
      {"feature_count", net.feature_count()},
      {"class_count", net.class_count()},
      {"output_width", net.output_width()},
      {"logic_parts", net.logic_parts()},
      {"squash",
       {{"center", sp.center}, {"ramp_width", sp.ramp_width}, {"beta", sp.beta}}},
      {"normalization",
       {{"lower", net.bounds().lower}, {"upper", net.bounds().upper}}},
      {"layers", std::move(layers)},
      {"parts", std::move(parts)},
      {"feature_names", net.metadata.feature_names},
      {"class_names", net.metadata.class_names},
  };
}

LogicNetwork network_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw ConfigError("model: not a logic network document");
    }
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw ConfigError("model: unsupported format version");
    }
    const auto& sq = doc.at("squash");
    SquashParams sp{sq.at("center").get<double>(),
                    sq.at("ramp_width").get<double>(), sq.at("beta").get<double>()};
    NormalizationBounds bounds{
        doc.at("normalization").at("lower").get<std::vector<double>>(),
        doc.at("normalization").at("upper").get<std::vector<double>>()};
    std::vector<LogicPart> parts;
    for (const auto& pj : doc.at("parts")) {
      LogicPart part;
      for (const auto& t : pj.at("pairings")) {
        part.pairings.push_back(pairing_from_json(t));
      }
      part.alphas = pj.at("alphas").get<std::vector<double>>();
      part.selector = matrix_from_json(pj.at("selector"));
      parts.push_back(std::move(part));
    }
    LogicNetwork net(doc.at("feature_count").get<std::size_t>(),
                     doc.at("class_count").get<std::size_t>(), sp,
                     std::move(bounds), std::move(parts));
    if (doc.contains("layers")) {
      std::vector<LayerSpec> stored;
      for (const auto& lj : doc.at("layers")) {
        stored.push_back({parse_layer_kind(lj.at("kind").get<std::string>()),
                          lj.at("width_in").get<std::size_t>(),
                          lj.at("width_out").get<std::size_t>()});
      }
      if (stored != net.layer_specs()) {
        throw ConfigError("model: stored layer specs disagree with parameters");
      }
    }
    net.metadata.feature_names =
        doc.value("feature_names", std::vector<std::string>{});
    net.metadata.class_names = doc.value("class_names", std::vector<std::string>{});
    return net;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: malformed document: ") + e.what());
  }
}

void save_network(const LogicNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << network_to_json(net).dump(1) << '\n';
}

LogicNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("model file " + path.string() + " is not JSON: " + e.what());
  }
  return network_from_json(doc);
}

}  // namespace uninet
