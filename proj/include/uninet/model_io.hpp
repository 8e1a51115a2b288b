#ifndef UNINET_MODEL_IO_HPP_
#define UNINET_MODEL_IO_HPP_

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "uninet/network.hpp"

namespace uninet {

/// Single JSON document: layer specs, squash params, normalization bounds,
/// and per logic part the pairing table, alphas and selector matrix.
/// Doubles are written in shortest round-trip form, so save -> load
/// reproduces every score bit for bit.
nlohmann::json network_to_json(const LogicNetwork& net);
LogicNetwork network_from_json(const nlohmann::json& doc);

void save_network(const LogicNetwork& net, const std::filesystem::path& path);
LogicNetwork load_network(const std::filesystem::path& path);

nlohmann::json pairing_to_json(const Pairing& p);
Pairing pairing_from_json(const nlohmann::json& j);

}  // namespace uninet

#endif  // UNINET_MODEL_IO_HPP_
