#pragma once

#include <string>

#include "json.hpp"

#include "aid/info_structure.hpp"
#include "aid/prior.hpp"

namespace aid {

// Priors on disk: {"n": 2, "values": [...], "pmf": [{"profile": [i, j], "p": m}, ...]}
// where profiles index into the value list. Loaded priors are validated.
nlohmann::json prior_to_json(const SymmetricPrior& prior);
SymmetricPrior prior_from_json(const nlohmann::json& j);
SymmetricPrior load_prior(const std::string& path);

// Structures on disk carry the prior, the per-bidder grids (bare numbers for
// tag-0 atoms, {"v": value, "tag": t} otherwise), the sparse joint as
// {"v": value-index profile, "s": atom-index profile, "p": mass}, the
// construction record, and the bid table when play is not truthful. Joint
// rows are rejected unless their value profile carries prior mass.
nlohmann::json structure_to_json(const InfoStructure& I);
InfoStructure structure_from_json(const nlohmann::json& j);
InfoStructure load_structure(const std::string& path);

// Parses a JSON file (IoError on missing or malformed input).
nlohmann::json load_json(const std::string& path);

// Writes with a trailing newline; "-" or empty means stdout.
void save_json(const nlohmann::json& j, const std::string& path);

}  // namespace aid
