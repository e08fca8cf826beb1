#include "pdolab/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace pdolab {

namespace {

void require_version(const Json& j) {
  if (j.contains("version") && j.at("version").get<int>() != 1)
    throw std::invalid_argument("unsupported file version");
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  const std::size_t rows = j.size();
  if (rows == 0) throw std::invalid_argument("matrix: empty");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw std::invalid_argument("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = Cplx(j[r][c][0].get<double>(), j[r][c][1].get<double>());
  }
  return m;
}

Json pdo_to_json(const Pdo& p) {
  return Json{{"version", 1}, {"dims", p.dims}, {"labels", p.labels}, {"tensor", p.tensor}};
}

Pdo pdo_from_json(const Json& j) {
  require_version(j);
  Pdo p(j.at("dims").get<std::vector<int>>(),
        j.contains("labels") ? j.at("labels").get<std::vector<std::string>>()
                             : std::vector<std::string>{});
  auto tensor = j.at("tensor").get<std::vector<double>>();
  if (tensor.size() != p.tensor.size())
    throw std::invalid_argument("pdo: tensor length does not match dims");
  p.tensor = std::move(tensor);
  return p;
}

Json quasi_to_json(const QuasiDistribution& q) {
  return Json{{"shape", q.shape}, {"weights", q.weights}};
}

QuasiDistribution quasi_from_json(const Json& j) {
  return QuasiDistribution(j.at("shape").get<std::vector<int>>(),
                           j.at("weights").get<std::vector<double>>());
}

Json circuit_to_json(const CircuitSpec& spec) {
  Json intervals = Json::array();
  for (const auto& interval : spec.intervals) {
    Json kraus = Json::array();
    for (const auto& set : interval.kraus) {
      Json ops = Json::array();
      for (const auto& op : set.ops) ops.push_back(matrix_to_json(op));
      kraus.push_back(std::move(ops));
    }
    intervals.push_back(Json{{"partition", interval.partition}, {"kraus", std::move(kraus)}});
  }
  Json events = Json::array();
  for (const auto& e : spec.events) events.push_back(Json{{"wire", e.wire}, {"t", e.time}});
  return Json{{"version", 1},
              {"wires", spec.wires()},
              {"dims", spec.wire_dims},
              {"rho0", matrix_to_json(spec.rho0)},
              {"intervals", std::move(intervals)},
              {"events", std::move(events)}};
}

CircuitSpec circuit_from_json(const Json& j) {
  require_version(j);
  CircuitSpec spec;
  spec.wire_dims = j.at("dims").get<std::vector<int>>();
  if (j.contains("wires") && j.at("wires").get<int>() != spec.wires())
    throw std::invalid_argument("circuit: wire count disagrees with dims");
  spec.rho0 = matrix_from_json(j.at("rho0"));
  for (const auto& ij : j.at("intervals")) {
    IntervalChannel interval;
    interval.partition = ij.at("partition").get<std::vector<std::vector<int>>>();
    for (const auto& set : ij.at("kraus")) {
      KrausChannel ch;
      for (const auto& op : set) ch.ops.push_back(matrix_from_json(op));
      interval.kraus.push_back(std::move(ch));
    }
    spec.intervals.push_back(std::move(interval));
  }
  for (const auto& ej : j.at("events"))
    spec.events.push_back({ej.at("wire").get<int>(), ej.at("t").get<int>()});
  return spec;
}

Json scenario_to_json(const MarginalScenario& s) {
  Json parts = Json::array();
  for (const auto& part : s.parts())
    parts.push_back(Json{{"events", part.events}, {"pdo", pdo_to_json(part.pdo)}});
  return Json{{"version", 1}, {"events", s.global_events().labels}, {"parts", std::move(parts)}};
}

MarginalScenario scenario_from_json(const Json& j) {
  require_version(j);
  std::vector<ScenarioPart> parts;
  for (const auto& pj : j.at("parts")) {
    ScenarioPart part;
    part.pdo = pdo_from_json(pj.at("pdo"));
    if (pj.contains("events"))
      part.events = pj.at("events").get<std::vector<std::string>>();
    parts.push_back(std::move(part));
  }
  if (j.contains("events"))
    return MarginalScenario::create(std::move(parts), 1e-9,
                                    j.at("events").get<std::vector<std::string>>());
  return MarginalScenario::create(std::move(parts));
}

Json family_to_json(const SolutionFamily& f) {
  return Json{{"version", 1},
              {"events", f.events.labels},
              {"dims", f.events.dims},
              {"base_point", f.base_point},
              {"free_indices", f.free_indices}};
}

Json channel_to_json(const PseudoChannel& c) {
  Json kraus = Json::array();
  for (const auto& wk : c.kraus())
    kraus.push_back(Json{{"weight", wk.weight}, {"matrix", matrix_to_json(wk.op)}});
  return Json{{"version", 1},
              {"in_dims", c.in_dims()},
              {"out_dims", c.out_dims()},
              {"kraus", std::move(kraus)}};
}

PseudoChannel channel_from_json(const Json& j) {
  require_version(j);
  std::vector<WeightedKraus> kraus;
  for (const auto& kj : j.at("kraus"))
    kraus.push_back({kj.at("weight").get<double>(), matrix_from_json(kj.at("matrix"))});
  return PseudoChannel(j.at("in_dims").get<std::vector<int>>(),
                       j.at("out_dims").get<std::vector<int>>(), std::move(kraus), 1e-8);
}

ChannelScenario channel_scenario_from_json(const Json& j) {
  require_version(j);
  ChannelScenario s;
  for (const auto& pj : j.at("parts"))
    s.parts.push_back({pj.at("in_events").get<std::vector<std::string>>(),
                       pj.at("out_events").get<std::vector<std::string>>(),
                       channel_from_json(pj.at("channel"))});
  return s;
}

ClassicalScenario classical_scenario_from_json(const Json& j) {
  require_version(j);
  ClassicalScenario s;
  s.vars = j.at("vars").get<std::vector<std::string>>();
  s.shape = j.at("shape").get<std::vector<int>>();
  if (s.vars.size() != s.shape.size())
    throw std::invalid_argument("classical scenario: vars/shape mismatch");
  s.graph.n_vars = static_cast<int>(s.vars.size());
  for (const auto& pj : j.at("parts")) {
    std::vector<int> edge;
    for (const auto& name : pj.at("vars").get<std::vector<std::string>>()) {
      auto it = std::find(s.vars.begin(), s.vars.end(), name);
      if (it == s.vars.end())
        throw std::invalid_argument("classical scenario: unknown variable " + name);
      edge.push_back(static_cast<int>(it - s.vars.begin()));
    }
    s.graph.hyperedges.push_back(std::move(edge));
    s.parts.push_back(quasi_from_json(pj.at("dist")));
  }
  return s;
}

Json lindbladian_to_json(const Lindbladian& l) {
  Json jumps = Json::array();
  for (const auto& jump : l.jumps)
    jumps.push_back(Json{{"weight", jump.weight}, {"matrix", matrix_to_json(jump.op)}});
  return Json{{"version", 1},
              {"dims", l.dims},
              {"hamiltonian", matrix_to_json(l.hamiltonian)},
              {"jumps", std::move(jumps)}};
}

Lindbladian lindbladian_from_json(const Json& j) {
  require_version(j);
  Lindbladian l;
  l.dims = j.at("dims").get<std::vector<int>>();
  l.hamiltonian = matrix_from_json(j.at("hamiltonian"));
  if (j.contains("jumps"))
    for (const auto& jj : j.at("jumps"))
      l.jumps.push_back({jj.at("weight").get<double>(), matrix_from_json(jj.at("matrix"))});
  return l;
}

Json entropy_report_to_json(const EntropyReport& r) {
  Json renyi = Json::object();
  for (const auto& [alpha, value] : r.renyi) {
    // stable text key for the order
    Json key = alpha;
    renyi[key.dump()] = value;
  }
  std::vector<double> pv(r.p_vec.data(), r.p_vec.data() + r.p_vec.size());
  return Json{{"S", r.S},
              {"C", r.C},
              {"F", r.F},
              {"renyi", std::move(renyi)},
              {"p_vec", std::move(pv)},
              {"identity_residual", r.identity_residual}};
}

Json validation_to_json(const PdoValidation& v) {
  return Json{{"trace_dev", v.trace_dev},
              {"bound_excess", v.bound_excess},
              {"min_marginal_eigenvalue", v.min_marginal_eigenvalue},
              {"trace_ok", v.trace_ok},
              {"bound_ok", v.bound_ok},
              {"positivity_ok", v.positivity_ok},
              {"ok", v.ok()}};
}

Json maxent_result_to_json(const MaxEntResult& r) {
  return Json{{"entropy", r.entropy},
              {"max_residual", r.max_residual},
              {"best_restart", r.best_restart},
              {"hit_box", r.hit_box},
              {"iterations", r.trace.size()},
              {"pdo", pdo_to_json(r.pdo)}};
}

Json expansion_to_json(const SeparableExpansion& se) {
  Json states = Json::array();
  for (const auto& event_states : se.local_states) {
    Json per_event = Json::array();
    for (const auto& v : event_states) per_event.push_back(vector_to_json(v));
    states.push_back(std::move(per_event));
  }
  return Json{{"version", 1},
              {"weights", quasi_to_json(se.weights)},
              {"local_states", std::move(states)}};
}

Json purification_to_json(const Purification& pur) {
  return Json{{"version", 1},
              {"state_vector", vector_to_json(pur.state_vector)},
              {"sign_unitary", matrix_to_json(pur.sign_unitary)},
              {"norm_squared", pur.norm_squared()}};
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << canonical_dump(j);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return Json::parse(in);
}

}  // namespace pdolab
