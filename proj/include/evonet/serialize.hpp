#pragma once

#include <string>

#include "json.hpp"

#include "evonet/engine.hpp"
#include "evonet/genome.hpp"

namespace evonet {

using Json = nlohmann::json;

// Genome JSON schema: {"kind": "bitstring"|"matrix"|"genelist", ...} with
// per-kind fields; bit strings are '0'/'1' text, matrices row-major arrays.
Json genome_to_json(const Genome& genome);
Genome genome_from_json(const Json& j);

Json individual_to_json(const Individual& individual);
Individual individual_from_json(const Json& j);

Json report_to_json(const GenerationReport& report);
GenerationReport report_from_json(const Json& j);

Json registry_to_json(const InnovationRegistry& registry);
InnovationRegistry registry_from_json(const Json& j);

Json engine_state_to_json(const EngineState& state);
EngineState engine_state_from_json(const Json& j);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace evonet
