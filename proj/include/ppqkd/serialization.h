#ifndef PPQKD_SERIALIZATION_H
#define PPQKD_SERIALIZATION_H

#include <string>

#include "json.hpp"
#include "ppqkd/network.h"

namespace ppqkd {

using json = nlohmann::ordered_json;

std::string bits_to_string(const BitString &bits);
/// Throws ConfigError(field) on characters other than '0' and '1'.
BitString bits_from_string(const std::string &text, const std::string &field);

std::string to_hex(std::span<const uint8_t> bytes);
std::vector<uint8_t> from_hex(const std::string &text);

json to_json(const RunConfig &config);
/// Missing keys keep their defaults. Throws ConfigError naming the field.
RunConfig run_config_from_json(const json &j);

json to_json(const NoiseModel &noise);
NoiseModel noise_from_json(const json &j, const std::string &field);

json to_json(const EveStrategy &eve);
EveStrategy eve_from_json(const json &j, const std::string &field);

json to_json(const EveObservation &obs);

/// Session transcript: per-qubit records, wire frames as hex, and every
/// derived string. Stable key order, so dumps are byte-comparable.
json transcript_to_json(const LinkOutcome &link);
json transcript_to_json(const StarSessionResult &session, const RunConfig &config);

}  // namespace ppqkd

#endif
