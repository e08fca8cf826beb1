// json_io.hpp — JSON schemas for every file format the CLI reads and writes.
// Output is canonical: keys sorted, doubles in shortest round-trip form, so
// identical inputs produce byte-identical files.

#pragma once

#include "pdolab/circuit.hpp"
#include "pdolab/classical.hpp"
#include "pdolab/marginal.hpp"
#include "pdolab/maxent.hpp"
#include "pdolab/pseudo_channel.hpp"

#include <json.hpp>

#include <string>

namespace pdolab {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);        // rows of [re, im] pairs
Matrix matrix_from_json(const Json& j);

Json pdo_to_json(const Pdo& p);
Pdo pdo_from_json(const Json& j);

Json quasi_to_json(const QuasiDistribution& q);
QuasiDistribution quasi_from_json(const Json& j);

Json circuit_to_json(const CircuitSpec& spec);
CircuitSpec circuit_from_json(const Json& j);

Json scenario_to_json(const MarginalScenario& s);
MarginalScenario scenario_from_json(const Json& j);

Json family_to_json(const SolutionFamily& f);

Json channel_to_json(const PseudoChannel& c);
PseudoChannel channel_from_json(const Json& j);

struct ChannelScenario {
  std::vector<ChannelPart> parts;
};
ChannelScenario channel_scenario_from_json(const Json& j);

struct ClassicalScenario {
  std::vector<std::string> vars;
  std::vector<int> shape;
  CompatibilityGraph graph;
  std::vector<QuasiDistribution> parts;
};
ClassicalScenario classical_scenario_from_json(const Json& j);

Json lindbladian_to_json(const Lindbladian& l);
Lindbladian lindbladian_from_json(const Json& j);

Json entropy_report_to_json(const EntropyReport& r);
Json validation_to_json(const PdoValidation& v);
Json maxent_result_to_json(const MaxEntResult& r);
Json expansion_to_json(const SeparableExpansion& se);
Json purification_to_json(const Purification& pur);

std::string canonical_dump(const Json& j);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

}  // namespace pdolab
