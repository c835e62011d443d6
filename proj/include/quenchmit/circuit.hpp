#ifndef QUENCHMIT_CIRCUIT_HPP
#define QUENCHMIT_CIRCUIT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "quenchmit/model.hpp"

namespace quenchmit {

enum class GateKind { RZ, SX, X, CNOT };

// One gate in the native set. Qubits are 1-based site indices.
struct Gate {
  GateKind kind = GateKind::RZ;
  double angle = 0.0;  // RZ only
  int q0 = 1;          // target for single-qubit gates and CNOT
  int q1 = 0;          // control, CNOT only

  static Gate rz(double theta, int q) { return {GateKind::RZ, theta, q, 0}; }
  static Gate sx(int q) { return {GateKind::SX, 0.0, q, 0}; }
  // RX90 is the same physical gate as SX.
  static Gate rx90(int q) { return sx(q); }
  static Gate x(int q) { return {GateKind::X, 0.0, q, 0}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, 0.0, target, control}; }

  // RZ(theta) is Clifford iff theta is a multiple of pi/2 (mod 2pi, 1e-12).
  bool is_clifford() const;
  bool is_single_qubit() const { return kind != GateKind::CNOT; }
};

struct CircuitMeta {
  double dt = 0.0;
  int nSteps = 0;
  int noiseLevel = 1;
};

// Ordered gate list; ops[0] is applied first.
struct Circuit {
  int nQubits = 0;
  std::vector<Gate> ops;
  CircuitMeta meta;

  void validate() const;
};

struct CircuitStats {
  int depth = 0;
  int cnotCount = 0;
  int nonCliffordCount = 0;
};

// One first-order Trotter step: per qubit RZ(-2 J hZ dt - pi/2), SX,
// RZ(-2 J hX dt + pi), SX, RZ(-pi/2); then CNOT.RZ(-2 J dt).CNOT blocks on
// odd pairs (1,2),(3,4),... and then on even pairs (2,3),(4,5),...
// The block's control is the higher-index qubit, the target the lower.
Circuit trotter_step(const ModelParams& params, double dt);

// nSteps concatenated identical step circuits; nSteps = 0 is empty.
Circuit trotter_circuit(const ModelParams& params, const TimeGrid& grid);

// Noise amplification by fixed identity insertion: every CNOT becomes
// `level` consecutive copies. level must be odd; the unitary is unchanged.
Circuit fold_identity(const Circuit& circuit, int level);

// Depth is the longest per-qubit dependency chain.
CircuitStats circuit_stats(const Circuit& circuit);

// Line-oriented text form, one gate per line: name, angle, qubits.
std::string circuit_to_text(const Circuit& circuit);
Circuit circuit_from_text(const std::string& text);

}  // namespace quenchmit

#endif
