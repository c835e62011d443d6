#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "quenchmit/circuit.hpp"

using namespace quenchmit;
using oracles::complexd;

namespace {

constexpr double kPi = std::numbers::pi;

// Product of the per-step term exponentials the circuit compiles to: the
// transverse-field rotation carries the opposite X sign of e^{+i J hX dt X},
// which is invisible in Z-basis data (the two circuits differ by a Z frame
// on every qubit).
oracles::MatrixXcd compiled_step(const ModelParams& p, double dt, int xSign) {
  const Eigen::Index dim = Eigen::Index{1} << p.L;
  const oracles::MatrixXcd xTerm =
      oracles::expm(complexd(0, xSign * p.J * p.hX * dt) * oracles::pauli('X'));
  const oracles::MatrixXcd zTerm =
      oracles::expm(complexd(0, p.J * p.hZ * dt) * oracles::pauli('Z'));
  oracles::MatrixXcd u = oracles::MatrixXcd::Identity(dim, dim);
  for (int q = 1; q <= p.L; ++q)
    u = oracles::site_op(xTerm * zTerm, q, p.L) * u;
  auto zz = [&](int q) {
    const oracles::MatrixXcd op = oracles::site_op(oracles::pauli('Z'), q, p.L) *
                                  oracles::site_op(oracles::pauli('Z'), q + 1, p.L);
    return oracles::expm(complexd(0, p.J * dt) * op);
  };
  for (int q = 1; q + 1 <= p.L; q += 2) u = zz(q) * u;
  for (int q = 2; q + 1 <= p.L; q += 2) u = zz(q) * u;
  return u;
}

oracles::MatrixXcd z_frame(int L) {
  const Eigen::Index dim = Eigen::Index{1} << L;
  oracles::MatrixXcd u = oracles::MatrixXcd::Identity(dim, dim);
  for (int q = 1; q <= L; ++q) u = oracles::site_op(oracles::pauli('Z'), q, L) * u;
  return u;
}

}  // namespace

TEST_CASE("rz cliffordness at multiples of pi/2") {
  CHECK(Gate::rz(0.0, 1).is_clifford());
  CHECK(Gate::rz(kPi / 2.0, 1).is_clifford());
  CHECK(Gate::rz(-3.0 * kPi, 1).is_clifford());
  CHECK(Gate::rz(kPi / 2.0 + 5e-13, 1).is_clifford());
  CHECK_FALSE(Gate::rz(kPi / 4.0, 1).is_clifford());
  CHECK_FALSE(Gate::rz(0.03, 1).is_clifford());
  CHECK(Gate::sx(1).is_clifford());
  CHECK(Gate::x(1).is_clifford());
  CHECK(Gate::cnot(2, 1).is_clifford());
}

TEST_CASE("step layout: field columns then odd and even bond blocks") {
  const Circuit c = trotter_step({1.0, 0.5, 0.9, 4}, 0.1);
  REQUIRE(c.ops.size() == 5 * 4 + 3 * 3);
  CHECK(c.ops[0].kind == GateKind::RZ);
  CHECK(c.ops[0].angle == doctest::Approx(-2.0 * 0.9 * 0.1 - kPi / 2.0));
  CHECK(c.ops[1].kind == GateKind::SX);
  CHECK(c.ops[2].angle == doctest::Approx(-2.0 * 0.5 * 0.1 + kPi));
  CHECK(c.ops[4].angle == doctest::Approx(-kPi / 2.0));
  // first bond block: control 2, target 1
  const Gate& cnot0 = c.ops[20];
  CHECK(cnot0.kind == GateKind::CNOT);
  CHECK(cnot0.q1 == 2);
  CHECK(cnot0.q0 == 1);
  CHECK(c.ops[21].kind == GateKind::RZ);
  CHECK(c.ops[21].angle == doctest::Approx(-2.0 * 0.1));
  // bonds (1,2),(3,4) then (2,3)
  CHECK(c.ops[23].q0 == 3);
  CHECK(c.ops[26].q0 == 2);
  CHECK_THROWS_AS(trotter_step({1.0, 0.5, 0.9, 1}, 0.1), config_error);
}

TEST_CASE("stats for a single step") {
  const CircuitStats s5 = circuit_stats(trotter_step({1.0, 0.5, 0.9, 5}, 0.1));
  CHECK(s5.depth == 11);
  CHECK(s5.cnotCount == 8);
  CHECK(s5.nonCliffordCount == 14);

  const CircuitStats s9 = circuit_stats(trotter_step({1.0, 0.5, 0.9, 9}, 0.1));
  CHECK(s9.depth == 11);
  CHECK(s9.cnotCount == 16);
  CHECK(s9.nonCliffordCount == 26);
}

TEST_CASE("stats scale linearly with step count") {
  const CircuitStats s = circuit_stats(trotter_circuit({1.0, 0.5, 0.9, 9}, {0.1, 16}));
  CHECK(s.depth == 176);
  CHECK(s.cnotCount == 256);
  CHECK(s.nonCliffordCount == 416);

  const CircuitStats s10 = circuit_stats(trotter_circuit({1.0, 0.5, 0.9, 9}, {0.5, 10}));
  CHECK(s10.depth == 110);
  CHECK(s10.cnotCount == 160);
}

TEST_CASE("zero longitudinal field turns one rotation per column clifford") {
  const CircuitStats s = circuit_stats(trotter_step({1.0, 0.5, 0.0, 9}, 0.1));
  CHECK(s.nonCliffordCount == 17);
}

TEST_CASE("empty grid gives an empty circuit") {
  const Circuit c = trotter_circuit({1.0, 0.5, 0.9, 5}, {0.1, 0});
  CHECK(c.ops.empty());
  CHECK(c.nQubits == 5);
  CHECK(c.meta.nSteps == 0);
}

TEST_CASE("circuit unitary equals the compiled term product") {
  for (int nSteps : {1, 3}) {
    const ModelParams p{1.0, 0.5, 0.9, 3};
    const double dt = 0.2;
    const Circuit c = trotter_circuit(p, {dt, nSteps});
    const oracles::MatrixXcd u = oracles::circuit_unitary(c);
    oracles::MatrixXcd ref = oracles::MatrixXcd::Identity(8, 8);
    const oracles::MatrixXcd step = compiled_step(p, dt, -1);
    for (int s = 0; s < nSteps; ++s) ref = step * ref;
    CHECK(oracles::phase_aligned_diff(u, ref) < 1e-10);
  }
}

TEST_CASE("circuit is the ideal step product in a Z frame") {
  const ModelParams p{1.0, 0.7, 0.4, 4};
  const double dt = 0.15;
  const Circuit c = trotter_circuit(p, {dt, 2});
  const oracles::MatrixXcd u = oracles::circuit_unitary(c);
  const oracles::MatrixXcd zs = z_frame(p.L);
  const oracles::MatrixXcd ideal = compiled_step(p, dt, +1);
  CHECK(oracles::phase_aligned_diff(zs * u * zs, ideal * ideal) < 1e-10);
}

TEST_CASE("z-basis distribution matches the ideal trotterization") {
  const ModelParams p{1.0, 0.5, 0.9, 5};
  const double dt = 0.25;
  const Circuit c = trotter_circuit(p, {dt, 2});
  const oracles::VectorXcd psi0 = oracles::state_vector(ProductState::meson(5, 2, 1));
  const oracles::VectorXcd psiCircuit = oracles::circuit_unitary(c) * psi0;
  const oracles::MatrixXcd step = compiled_step(p, dt, +1);
  const oracles::VectorXcd psiIdeal = step * step * psi0;
  for (Eigen::Index i = 0; i < psi0.size(); ++i)
    CHECK(std::norm(psiCircuit(i)) == doctest::Approx(std::norm(psiIdeal(i))).epsilon(1e-10));
}

TEST_CASE("fine steps converge to the continuous evolution") {
  const ModelParams p{1.0, 0.5, 0.9, 2};
  const Circuit c = trotter_circuit(p, {0.01, 100});
  const oracles::VectorXcd psi0 = oracles::state_vector(ProductState::all_up(2));
  const oracles::VectorXcd psi = oracles::circuit_unitary(c) * psi0;
  const auto exact = oracles::expm_probs(p, ProductState::all_up(2), 1.0);
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    CHECK(std::abs(std::norm(psi(i)) - exact[static_cast<std::size_t>(i)]) < 5e-3);
}

TEST_CASE("identity folding repeats entangling gates without changing the unitary") {
  const Circuit base = trotter_step({1.0, 0.5, 0.9, 3}, 0.2);
  const Circuit folded = fold_identity(base, 3);
  CHECK(circuit_stats(folded).cnotCount == 3 * circuit_stats(base).cnotCount);
  CHECK(folded.meta.noiseLevel == 3);
  CHECK(oracles::phase_aligned_diff(oracles::circuit_unitary(folded),
                                    oracles::circuit_unitary(base)) < 1e-12);

  const Circuit nine = trotter_step({1.0, 0.5, 0.9, 9}, 0.1);
  CHECK(circuit_stats(fold_identity(nine, 3)).cnotCount == 48);

  CHECK(circuit_to_text(fold_identity(base, 1)) == circuit_to_text(base));
  CHECK_THROWS_AS(fold_identity(base, 2), config_error);
  CHECK_THROWS_AS(fold_identity(base, 0), config_error);
  CHECK_THROWS_AS(fold_identity(base, -3), config_error);
}

TEST_CASE("text form round-trips") {
  const Circuit c = trotter_circuit({1.0, 0.5, 0.9, 4}, {0.1, 2});
  const std::string text = circuit_to_text(c);
  const Circuit back = circuit_from_text(text);
  CHECK(back.nQubits == c.nQubits);
  REQUIRE(back.ops.size() == c.ops.size());
  CHECK(circuit_to_text(back) == text);
  for (std::size_t i = 0; i < c.ops.size(); ++i) {
    CHECK(back.ops[i].kind == c.ops[i].kind);
    CHECK(back.ops[i].q0 == c.ops[i].q0);
    CHECK(back.ops[i].q1 == c.ops[i].q1);
    CHECK(back.ops[i].angle == doctest::Approx(c.ops[i].angle).epsilon(1e-15));
  }
}

TEST_CASE("text parser rejects malformed input") {
  CHECK_THROWS_AS(circuit_from_text(""), config_error);
  CHECK_THROWS_AS(circuit_from_text("rz 0.5 1\n"), config_error);
  CHECK_THROWS_AS(circuit_from_text("qubits 2\nfoo 0 1\n"), config_error);
  CHECK_THROWS_AS(circuit_from_text("qubits 2\nrz 0.5\n"), config_error);
  CHECK_THROWS_AS(circuit_from_text("qubits 2\ncnot 0 2 2\n"), config_error);
  CHECK_THROWS_AS(circuit_from_text("qubits 2\nrz 0.5 3\n"), config_error);
}
