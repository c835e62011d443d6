#include "quenchmit/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "quenchmit/io.hpp"

namespace quenchmit {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kCliffordTol = 1e-12;
}  // namespace

bool Gate::is_clifford() const {
  if (kind != GateKind::RZ) return true;
  const double quarter = angle / (kPi / 2.0);
  return std::abs(quarter - std::round(quarter)) * (kPi / 2.0) <= kCliffordTol;
}

void Circuit::validate() const {
  if (nQubits < 0) throw config_error("Circuit: negative qubit count");
  for (const Gate& g : ops) {
    if (g.q0 < 1 || g.q0 > nQubits)
      throw config_error("Circuit: gate site out of range");
    if (g.kind == GateKind::CNOT) {
      if (g.q1 < 1 || g.q1 > nQubits)
        throw config_error("Circuit: CNOT control out of range");
      if (g.q1 == g.q0) throw config_error("Circuit: CNOT needs distinct qubits");
    }
  }
}

Circuit trotter_step(const ModelParams& params, double dt) {
  params.validate();
  if (params.L < 2) throw config_error("trotter_step: unsupported for L < 2");
  const int L = params.L;
  const double J = params.J;

  Circuit c;
  c.nQubits = L;
  c.meta = {dt, 1, 1};
  c.ops.reserve(static_cast<std::size_t>(5 * L + 3 * (L - 1)));

  const double aZ = -2.0 * J * params.hZ * dt - kPi / 2.0;
  const double aX = -2.0 * J * params.hX * dt + kPi;
  for (int q = 1; q <= L; ++q) {
    c.ops.push_back(Gate::rz(aZ, q));
    c.ops.push_back(Gate::sx(q));
    c.ops.push_back(Gate::rz(aX, q));
    c.ops.push_back(Gate::sx(q));
    c.ops.push_back(Gate::rz(-kPi / 2.0, q));
  }

  const double aZZ = -2.0 * J * dt;
  auto zz_block = [&](int q) {
    c.ops.push_back(Gate::cnot(q + 1, q));
    c.ops.push_back(Gate::rz(aZZ, q));
    c.ops.push_back(Gate::cnot(q + 1, q));
  };
  for (int q = 1; q + 1 <= L; q += 2) zz_block(q);
  for (int q = 2; q + 1 <= L; q += 2) zz_block(q);
  return c;
}

Circuit trotter_circuit(const ModelParams& params, const TimeGrid& grid) {
  grid.validate();
  Circuit out;
  out.nQubits = params.L;
  out.meta = {grid.dt, grid.nSteps, 1};
  if (grid.nSteps == 0) return out;

  Circuit step = trotter_step(params, grid.dt);
  out.ops.reserve(step.ops.size() * static_cast<std::size_t>(grid.nSteps));
  for (int s = 0; s < grid.nSteps; ++s)
    out.ops.insert(out.ops.end(), step.ops.begin(), step.ops.end());
  return out;
}

Circuit fold_identity(const Circuit& circuit, int level) {
  if (level < 1 || level % 2 == 0)
    throw config_error("fold_identity: noise level must be an odd integer >= 1");
  Circuit out;
  out.nQubits = circuit.nQubits;
  out.meta = circuit.meta;
  out.meta.noiseLevel = level;
  out.ops.reserve(circuit.ops.size());
  for (const Gate& g : circuit.ops) {
    if (g.kind == GateKind::CNOT) {
      for (int k = 0; k < level; ++k) out.ops.push_back(g);
    } else {
      out.ops.push_back(g);
    }
  }
  return out;
}

CircuitStats circuit_stats(const Circuit& circuit) {
  circuit.validate();
  CircuitStats stats;
  std::vector<int> qubitDepth(static_cast<std::size_t>(circuit.nQubits) + 1, 0);
  for (const Gate& g : circuit.ops) {
    if (g.kind == GateKind::CNOT) {
      ++stats.cnotCount;
      const int d = std::max(qubitDepth[g.q0], qubitDepth[g.q1]) + 1;
      qubitDepth[g.q0] = d;
      qubitDepth[g.q1] = d;
    } else {
      ++qubitDepth[g.q0];
    }
    if (!g.is_clifford()) ++stats.nonCliffordCount;
  }
  for (int q = 1; q <= circuit.nQubits; ++q)
    stats.depth = std::max(stats.depth, qubitDepth[q]);
  return stats;
}

std::string circuit_to_text(const Circuit& circuit) {
  std::ostringstream out;
  out << "qubits " << circuit.nQubits << "\n";
  for (const Gate& g : circuit.ops) {
    switch (g.kind) {
      case GateKind::RZ:
        out << "rz " << format_double(g.angle) << " " << g.q0 << "\n";
        break;
      case GateKind::SX:
        out << "sx 0 " << g.q0 << "\n";
        break;
      case GateKind::X:
        out << "x 0 " << g.q0 << "\n";
        break;
      case GateKind::CNOT:
        out << "cnot 0 " << g.q1 << " " << g.q0 << "\n";
        break;
    }
  }
  return out.str();
}

Circuit circuit_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Circuit c;
  bool sawHeader = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    if (!sawHeader) {
      if (name != "qubits") throw config_error("circuit text: missing qubits header");
      if (!(ls >> c.nQubits)) throw config_error("circuit text: bad qubit count");
      sawHeader = true;
      continue;
    }
    double angle = 0.0;
    if (!(ls >> angle)) throw config_error("circuit text: missing angle column");
    if (name == "rz") {
      int q;
      if (!(ls >> q)) throw config_error("circuit text: rz needs a qubit");
      c.ops.push_back(Gate::rz(angle, q));
    } else if (name == "sx") {
      int q;
      if (!(ls >> q)) throw config_error("circuit text: sx needs a qubit");
      c.ops.push_back(Gate::sx(q));
    } else if (name == "x") {
      int q;
      if (!(ls >> q)) throw config_error("circuit text: x needs a qubit");
      c.ops.push_back(Gate::x(q));
    } else if (name == "cnot") {
      int control, target;
      if (!(ls >> control >> target)) throw config_error("circuit text: cnot needs two qubits");
      c.ops.push_back(Gate::cnot(control, target));
    } else {
      throw config_error("circuit text: unknown gate '" + name + "'");
    }
  }
  if (!sawHeader) throw config_error("circuit text: empty input");
  c.validate();
  return c;
}

}  // namespace quenchmit
