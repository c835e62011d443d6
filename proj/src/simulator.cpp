#include "quenchmit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>

#include "quenchmit/seeds.hpp"

namespace quenchmit {

namespace {

using complexd = std::complex<double>;

std::size_t site_mask(int site, int L) { return std::size_t{1} << (L - site); }

Eigen::Matrix2cd gate_matrix(const Gate& g) {
  Eigen::Matrix2cd u;
  switch (g.kind) {
    case GateKind::RZ: {
      const complexd e0 = std::exp(complexd(0.0, -0.5 * g.angle));
      const complexd e1 = std::exp(complexd(0.0, +0.5 * g.angle));
      u << e0, 0.0, 0.0, e1;
      return u;
    }
    case GateKind::SX: {
      const complexd a(0.5, 0.5), b(0.5, -0.5);
      u << a, b, b, a;
      return u;
    }
    case GateKind::X:
      u << 0.0, 1.0, 1.0, 0.0;
      return u;
    case GateKind::CNOT:
      break;
  }
  throw config_error("gate_matrix: CNOT has no single-qubit matrix");
}

void check_state_matches(const Circuit& circuit, const ProductState& initial) {
  if (circuit.nQubits != initial.L())
    throw config_error("simulator: circuit qubit count does not match initial state length");
}

// ---- statevector path ----

void sv_apply(Eigen::VectorXcd& psi, const Gate& g, int L) {
  const std::size_t dim = static_cast<std::size_t>(psi.size());
  switch (g.kind) {
    case GateKind::RZ: {
      const std::size_t m = site_mask(g.q0, L);
      const complexd e0 = std::exp(complexd(0.0, -0.5 * g.angle));
      const complexd e1 = std::exp(complexd(0.0, +0.5 * g.angle));
      for (std::size_t i = 0; i < dim; ++i) psi(i) *= (i & m) ? e1 : e0;
      return;
    }
    case GateKind::SX: {
      const std::size_t m = site_mask(g.q0, L);
      const complexd a(0.5, 0.5), b(0.5, -0.5);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & m) continue;
        const complexd v0 = psi(i), v1 = psi(i | m);
        psi(i) = a * v0 + b * v1;
        psi(i | m) = b * v0 + a * v1;
      }
      return;
    }
    case GateKind::X: {
      const std::size_t m = site_mask(g.q0, L);
      for (std::size_t i = 0; i < dim; ++i)
        if (!(i & m)) std::swap(psi(i), psi(i | m));
      return;
    }
    case GateKind::CNOT: {
      const std::size_t mc = site_mask(g.q1, L);
      const std::size_t mt = site_mask(g.q0, L);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & mc) && !(i & mt)) std::swap(psi(i), psi(i | mt));
      return;
    }
  }
}

std::vector<double> sv_probs(const Eigen::VectorXcd& psi) {
  std::vector<double> probs(static_cast<std::size_t>(psi.size()));
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(psi(i));
  return probs;
}

// ---- density-matrix path ----
//
// The raw gate stream is compiled into fused passes before touching the
// density matrix:
//   Single     one 2x2 unitary per contiguous single-qubit gate column,
//              with the column's depolarizing factors composed into one
//   Diag       a diagonal phase vector; adjacent ZZ-block phases on
//              disjoint pairs of the same layer are merged into one pass
//   PairDepol  two-qubit depolarizing with the block's CNOT factors composed
//   PairPauli  the single-qubit depolarizing that acted between the CNOTs of
//              a ZZ block, conjugated through them: Paulis {X_t, Z_cY_t, Z_cZ_t}
//   CnotPerm   a bare CNOT left over when no ZZ block pattern matched
// Every fusion step is an exact channel identity, not an approximation.

struct SingleTerm {
  int q = 0;
  complexd u00, u01, u10, u11;
};

struct CompiledOp {
  enum class Type { Single, MultiSingle, Diag, PairDepol, PairPauli, CnotPerm };
  Type type = Type::Single;
  int qa = 0;  // target / first qubit
  int qb = 0;  // control / second qubit
  double p = 0.0;
  Eigen::Matrix2cd u;
  Eigen::VectorXcd phases;
  std::vector<SingleTerm> singles;  // MultiSingle: noiseless columns, disjoint qubits
};

bool pair_disjoint(const CompiledOp& op, int c, int t) {
  return op.qa != c && op.qa != t && op.qb != c && op.qb != t;
}

double composed_probability(double p, std::size_t repetitions) {
  return 1.0 - std::pow(1.0 - p, static_cast<double>(repetitions));
}

std::vector<CompiledOp> compile_segment(const std::vector<Gate>& ops, std::size_t begin,
                                        std::size_t end, int L, const NoiseModel& noise) {
  const std::size_t dim = std::size_t{1} << L;
  std::vector<CompiledOp> out;
  std::vector<Eigen::Matrix2cd> acc(static_cast<std::size_t>(L) + 1,
                                    Eigen::Matrix2cd::Identity());
  std::vector<double> survival(static_cast<std::size_t>(L) + 1, 1.0);
  std::vector<char> active(static_cast<std::size_t>(L) + 1, 0);

  auto flush = [&](int q) {
    if (!active[static_cast<std::size_t>(q)]) return;
    CompiledOp op;
    op.type = CompiledOp::Type::Single;
    op.qa = q;
    op.u = acc[static_cast<std::size_t>(q)];
    op.p = 1.0 - survival[static_cast<std::size_t>(q)];
    out.push_back(op);
    acc[static_cast<std::size_t>(q)] = Eigen::Matrix2cd::Identity();
    survival[static_cast<std::size_t>(q)] = 1.0;
    active[static_cast<std::size_t>(q)] = 0;
  };
  // Pending columns commute with everything emitted since they accumulated
  // (disjoint supports), so they may all be emitted at once. Noiseless columns
  // are grouped into one MultiSingle so the left transforms share a traversal.
  auto flush_all = [&]() {
    std::vector<SingleTerm> group;
    for (int q = 1; q <= L; ++q) {
      const auto qi = static_cast<std::size_t>(q);
      if (!active[qi] || survival[qi] != 1.0) {
        flush(q);
        continue;
      }
      const Eigen::Matrix2cd& u = acc[qi];
      group.push_back(SingleTerm{q, u(0, 0), u(0, 1), u(1, 0), u(1, 1)});
      acc[qi] = Eigen::Matrix2cd::Identity();
      active[qi] = 0;
    }
    if (group.size() == 1) {
      CompiledOp op;
      op.type = CompiledOp::Type::Single;
      op.qa = group[0].q;
      op.u << group[0].u00, group[0].u01, group[0].u10, group[0].u11;
      out.push_back(op);
    } else if (!group.empty()) {
      CompiledOp op;
      op.type = CompiledOp::Type::MultiSingle;
      op.singles = std::move(group);
      out.push_back(op);
    }
  };

  // exp(-i theta/2 Z_c Z_t) as a diagonal over the full register; merged into
  // an earlier Diag when only channel passes on disjoint pairs sit between.
  auto emit_zz_diag = [&](int c, int t, double theta) {
    const std::size_t mc = site_mask(c, L);
    const std::size_t mt = site_mask(t, L);
    const complexd eMinus = std::exp(complexd(0.0, -0.5 * theta));
    const complexd ePlus = std::exp(complexd(0.0, +0.5 * theta));
    std::size_t k = out.size();
    while (k > 0) {
      const CompiledOp& prev = out[k - 1];
      if ((prev.type == CompiledOp::Type::PairDepol ||
           prev.type == CompiledOp::Type::PairPauli) &&
          pair_disjoint(prev, c, t)) {
        --k;
        continue;
      }
      break;
    }
    Eigen::VectorXcd* phases = nullptr;
    if (k > 0 && out[k - 1].type == CompiledOp::Type::Diag) {
      phases = &out[k - 1].phases;
    } else {
      CompiledOp op;
      op.type = CompiledOp::Type::Diag;
      op.phases = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(dim));
      out.push_back(op);
      phases = &out.back().phases;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      const bool aligned = ((i & mc) != 0) == ((i & mt) != 0);
      (*phases)(static_cast<Eigen::Index>(i)) *= aligned ? eMinus : ePlus;
    }
  };

  auto same_cnot = [&](std::size_t j, int c, int t) {
    return j < end && ops[j].kind == GateKind::CNOT && ops[j].q1 == c && ops[j].q0 == t;
  };

  std::size_t i = begin;
  while (i < end) {
    const Gate& g = ops[i];
    if (g.is_single_qubit()) {
      const auto q = static_cast<std::size_t>(g.q0);
      acc[q] = gate_matrix(g) * acc[q];
      if (noise.p1 > 0.0) survival[q] *= 1.0 - noise.p1;
      active[q] = 1;
      ++i;
      continue;
    }

    const int c = g.q1;
    const int t = g.q0;
    std::size_t j = i;
    while (same_cnot(j, c, t)) ++j;
    const std::size_t run1 = j - i;
    const std::size_t afterRun1 = j;
    double thetaSum = 0.0;
    std::size_t nMid = 0;
    while (j < end && ops[j].kind == GateKind::RZ && ops[j].q0 == t) {
      thetaSum += ops[j].angle;
      ++nMid;
      ++j;
    }
    std::size_t run2 = 0;
    if (nMid > 0) {
      while (same_cnot(j, c, t)) {
        ++run2;
        ++j;
      }
    }

    if (nMid > 0 && run1 % 2 == 1 && run2 % 2 == 1) {
      flush_all();
      emit_zz_diag(c, t, thetaSum);
      if (noise.p1 > 0.0) {
        CompiledOp op;
        op.type = CompiledOp::Type::PairPauli;
        op.qa = t;
        op.qb = c;
        op.p = composed_probability(noise.p1, nMid);
        out.push_back(op);
      }
      if (noise.p2 > 0.0) {
        CompiledOp op;
        op.type = CompiledOp::Type::PairDepol;
        op.qa = t;
        op.qb = c;
        op.p = composed_probability(noise.p2, run1 + run2);
        out.push_back(op);
      }
      i = j;
      continue;
    }

    // Bare CNOT run; any trailing RZs are reprocessed as single-qubit gates.
    flush_all();
    if (run1 % 2 == 1) {
      CompiledOp op;
      op.type = CompiledOp::Type::CnotPerm;
      op.qa = t;
      op.qb = c;
      out.push_back(op);
    }
    if (noise.p2 > 0.0) {
      CompiledOp op;
      op.type = CompiledOp::Type::PairDepol;
      op.qa = t;
      op.qb = c;
      op.p = composed_probability(noise.p2, run1);
      out.push_back(op);
    }
    i = afterRun1;
  }
  flush_all();
  return out;
}

// Two-level transform of one stored column by U on the qubit with mask m.
template <typename Col>
void left_transform_column(Col&& col, std::size_t dim, std::size_t m, const SingleTerm& t,
                           Eigen::VectorXcd& tmp) {
  const auto im = static_cast<Eigen::Index>(m);
  if (m >= 4) {
    for (std::size_t base = 0; base < dim; base += 2 * m) {
      auto top = col.segment(static_cast<Eigen::Index>(base), im);
      auto bot = col.segment(static_cast<Eigen::Index>(base + m), im);
      tmp.head(im) = t.u00 * top + t.u01 * bot;
      bot = t.u10 * top + t.u11 * bot;
      top = tmp.head(im);
    }
  } else {
    for (std::size_t base = 0; base < dim; base += 2 * m) {
      for (std::size_t k = 0; k < m; ++k) {
        const auto it = static_cast<Eigen::Index>(base + k);
        const auto ib = static_cast<Eigen::Index>(base + m + k);
        const complexd top = col(it), bot = col(ib);
        col(it) = t.u00 * top + t.u01 * bot;
        col(ib) = t.u10 * top + t.u11 * bot;
      }
    }
  }
}

// rho <- rho U^dag on the qubit with mask m, as contiguous column-pair ops.
void right_transform(Eigen::MatrixXcd& rho, std::size_t m, const SingleTerm& t,
                     Eigen::VectorXcd& tmp) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  const complexd c00 = std::conj(t.u00), c01 = std::conj(t.u01);
  const complexd c10 = std::conj(t.u10), c11 = std::conj(t.u11);
  for (std::size_t j = 0; j < dim; ++j) {
    if (j & m) continue;
    auto a = rho.col(static_cast<Eigen::Index>(j));
    auto b = rho.col(static_cast<Eigen::Index>(j | m));
    tmp = a * c00 + b * c01;
    b = a * c10 + b * c11;
    a = tmp;
  }
}

void apply_single_depol(Eigen::MatrixXcd& rho, std::size_t m, double p) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  const double keep = 1.0 - p;
  const double half = 0.5 * p;
  for (std::size_t j = 0; j < dim; ++j) {
    if (j & m) continue;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & m) continue;
      const complexd a = rho(i, j), d = rho(i | m, j | m);
      const complexd fill = half * (a + d);
      rho(i, j) = keep * a + fill;
      rho(i | m, j | m) = keep * d + fill;
      rho(i, j | m) *= keep;
      rho(i | m, j) *= keep;
    }
  }
}

// U rho U^dag split into a row pass and a column pass so both run as
// contiguous vector ops; the depolarizing mix runs as its own block pass.
void dm_apply_single(Eigen::MatrixXcd& rho, int q, const Eigen::Matrix2cd& u, double p, int L) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  const std::size_t m = site_mask(q, L);
  const SingleTerm t{q, u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
  Eigen::VectorXcd tmp(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j)
    left_transform_column(rho.col(static_cast<Eigen::Index>(j)), dim, m, t, tmp);
  right_transform(rho, m, t, tmp);
  if (p > 0.0) apply_single_depol(rho, m, p);
}

// Disjoint noiseless columns: all left transforms share one traversal (the
// column stays cache-hot), then the column-pair passes run per qubit.
void dm_apply_multi_single(Eigen::MatrixXcd& rho, const std::vector<SingleTerm>& terms, int L) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  Eigen::VectorXcd tmp(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) {
    auto col = rho.col(static_cast<Eigen::Index>(j));
    for (const SingleTerm& t : terms) left_transform_column(col, dim, site_mask(t.q, L), t, tmp);
  }
  for (const SingleTerm& t : terms) right_transform(rho, site_mask(t.q, L), t, tmp);
}

void dm_apply_diag(Eigen::MatrixXcd& rho, const Eigen::VectorXcd& phases) {
  const Eigen::Index dim = rho.rows();
  for (Eigen::Index j = 0; j < dim; ++j)
    rho.col(j).array() *= phases.array() * std::conj(phases(j));
}

void dm_apply_pair_depol(Eigen::MatrixXcd& rho, int qa, int qb, double p, int L) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  const std::size_t ma = site_mask(qa, L);
  const std::size_t mb = site_mask(qb, L);
  const std::size_t both = ma | mb;
  const std::size_t offs[4] = {0, ma, mb, both};
  const double keep = 1.0 - p;
  const double fill = 0.25 * p;
  for (std::size_t j = 0; j < dim; ++j) {
    if (j & both) continue;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & both) continue;
      complexd tr = 0.0;
      for (int a = 0; a < 4; ++a) tr += rho(i | offs[a], j | offs[a]);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) rho(i | offs[a], j | offs[b]) *= keep;
      for (int a = 0; a < 4; ++a) rho(i | offs[a], j | offs[a]) += fill * tr;
    }
  }
}

// Pauli channel {X_t, Z_c Y_t, Z_c Z_t}, each with weight p/4; this is the
// target-qubit depolarizing of a ZZ block conjugated through its CNOTs, and
// the twirl's identity branch keeps the remaining p/4.
void dm_apply_pair_pauli(Eigen::MatrixXcd& rho, int t, int c, double p, int L) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  const std::size_t mc = site_mask(c, L);
  const std::size_t mt = site_mask(t, L);
  const std::size_t both = mc | mt;
  // pair index a = 2*bit_c + bit_t
  const std::size_t offs[4] = {0, mt, mc, mc | mt};
  static const int perm1[4] = {1, 0, 3, 2};  // X_t
  static const complexd s1[4] = {1.0, 1.0, 1.0, 1.0};
  static const int perm2[4] = {1, 0, 3, 2};  // Z_c Y_t
  static const complexd s2[4] = {complexd(0, 1), complexd(0, -1), complexd(0, -1),
                                 complexd(0, 1)};
  static const int perm3[4] = {0, 1, 2, 3};  // Z_c Z_t
  static const complexd s3[4] = {1.0, -1.0, -1.0, 1.0};
  const double keep = 1.0 - 0.75 * p;
  const double w = 0.25 * p;
  complexd block[4][4];
  complexd mixed[4][4];
  for (std::size_t j = 0; j < dim; ++j) {
    if (j & both) continue;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & both) continue;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) block[a][b] = rho(i | offs[a], j | offs[b]);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) mixed[a][b] = keep * block[a][b];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const complexd v = w * block[a][b];
          mixed[perm1[a]][perm1[b]] += s1[a] * std::conj(s1[b]) * v;
          mixed[perm2[a]][perm2[b]] += s2[a] * std::conj(s2[b]) * v;
          mixed[perm3[a]][perm3[b]] += s3[a] * std::conj(s3[b]) * v;
        }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) rho(i | offs[a], j | offs[b]) = mixed[a][b];
    }
  }
}

void dm_apply_cnot(Eigen::MatrixXcd& rho, int t, int c, int L) {
  const std::size_t dim = static_cast<std::size_t>(rho.rows());
  const std::size_t mc = site_mask(c, L);
  const std::size_t mt = site_mask(t, L);
  for (std::size_t i = 0; i < dim; ++i)
    if ((i & mc) && !(i & mt))
      rho.row(static_cast<Eigen::Index>(i)).swap(rho.row(static_cast<Eigen::Index>(i | mt)));
  for (std::size_t j = 0; j < dim; ++j)
    if ((j & mc) && !(j & mt))
      rho.col(static_cast<Eigen::Index>(j)).swap(rho.col(static_cast<Eigen::Index>(j | mt)));
}

void dm_apply(Eigen::MatrixXcd& rho, const CompiledOp& op, int L) {
  switch (op.type) {
    case CompiledOp::Type::Single:
      dm_apply_single(rho, op.qa, op.u, op.p, L);
      return;
    case CompiledOp::Type::MultiSingle:
      dm_apply_multi_single(rho, op.singles, L);
      return;
    case CompiledOp::Type::Diag:
      dm_apply_diag(rho, op.phases);
      return;
    case CompiledOp::Type::PairDepol:
      dm_apply_pair_depol(rho, op.qa, op.qb, op.p, L);
      return;
    case CompiledOp::Type::PairPauli:
      dm_apply_pair_pauli(rho, op.qa, op.qb, op.p, L);
      return;
    case CompiledOp::Type::CnotPerm:
      dm_apply_cnot(rho, op.qa, op.qb, L);
      return;
  }
}

std::vector<double> dm_probs(const Eigen::MatrixXcd& rho) {
  std::vector<double> probs(static_cast<std::size_t>(rho.rows()));
  for (std::size_t i = 0; i < probs.size(); ++i)
    probs[i] = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  return probs;
}

void check_boundaries(const Circuit& circuit, const std::vector<std::size_t>& boundaries) {
  std::size_t prev = 0;
  bool first = true;
  for (std::size_t b : boundaries) {
    if (!first && b <= prev)
      throw config_error("run_noisy_snapshots: boundaries must be strictly increasing");
    if (b > circuit.ops.size())
      throw config_error("run_noisy_snapshots: boundary past the end of the gate list");
    prev = b;
    first = false;
  }
}

std::vector<std::vector<double>> snapshots_impl(const Circuit& circuit,
                                                const ProductState& initial,
                                                const NoiseModel& noise,
                                                const std::vector<std::size_t>& boundaries) {
  const int L = circuit.nQubits;
  std::vector<std::vector<double>> result;
  result.reserve(boundaries.size());

  auto finalize = [&](std::vector<double> probs) {
    apply_global_eps(probs, noise.globalEps);
    apply_readout_flips(probs, noise.readoutFlip);
    result.push_back(std::move(probs));
  };

  if (!noise.has_gate_noise()) {
    if (L > kDenseMaxL)
      throw capacity_error("run_noisy: statevector path supports at most 14 qubits");
    const std::size_t dim = std::size_t{1} << L;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    psi(static_cast<Eigen::Index>(initial.basis_index())) = 1.0;
    std::size_t next = 0;
    for (std::size_t b : boundaries) {
      for (; next < b; ++next) sv_apply(psi, circuit.ops[next], L);
      finalize(sv_probs(psi));
    }
    return result;
  }

  if (L > kDensityMaxL)
    throw capacity_error("run_noisy: density-matrix path supports at most 10 qubits");
  const std::size_t dim = std::size_t{1} << L;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
  const auto idx = static_cast<Eigen::Index>(initial.basis_index());
  rho(idx, idx) = 1.0;
  std::size_t prev = 0;
  for (std::size_t b : boundaries) {
    for (const CompiledOp& op : compile_segment(circuit.ops, prev, b, L, noise))
      dm_apply(rho, op, L);
    prev = b;
    finalize(dm_probs(rho));
  }
  return result;
}

}  // namespace

double composed_global_eps(double eps, int exponent) {
  if (exponent < 0) throw config_error("composed_global_eps: exponent must be >= 0");
  if (eps < 0.0 || eps > 1.0)
    throw config_error("composed_global_eps: eps must lie in [0,1]");
  return 1.0 - std::pow(1.0 - eps, exponent);
}

std::string CountsTable::to_csv() const {
  std::ostringstream os;
  os << "bitstring,count\n";
  for (const auto& [bits, n] : counts) os << bits << ',' << n << '\n';
  return os.str();
}

std::vector<double> run_exact(const Circuit& circuit, const ProductState& initial) {
  circuit.validate();
  check_state_matches(circuit, initial);
  const int L = circuit.nQubits;
  if (L > kDenseMaxL)
    throw capacity_error("run_exact: statevector path supports at most 14 qubits");
  const std::size_t dim = std::size_t{1} << L;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  psi(static_cast<Eigen::Index>(initial.basis_index())) = 1.0;
  for (const Gate& g : circuit.ops) sv_apply(psi, g, L);
  return sv_probs(psi);
}

std::vector<double> run_noisy(const Circuit& circuit, const ProductState& initial,
                              const NoiseModel& noise) {
  noise.validate();
  circuit.validate();
  check_state_matches(circuit, initial);
  return snapshots_impl(circuit, initial, noise, {circuit.ops.size()}).front();
}

std::vector<std::vector<double>> run_noisy_snapshots(const Circuit& circuit,
                                                     const ProductState& initial,
                                                     const NoiseModel& noise,
                                                     const std::vector<std::size_t>& boundaries) {
  noise.validate();
  circuit.validate();
  check_state_matches(circuit, initial);
  check_boundaries(circuit, boundaries);
  return snapshots_impl(circuit, initial, noise, boundaries);
}

Eigen::MatrixXcd run_noisy_density(const Circuit& circuit, const ProductState& initial,
                                   const NoiseModel& noise) {
  noise.validate();
  circuit.validate();
  check_state_matches(circuit, initial);
  const int L = circuit.nQubits;
  if (L > kDensityMaxL)
    throw capacity_error("run_noisy_density: density-matrix path supports at most 10 qubits");
  const std::size_t dim = std::size_t{1} << L;
  Eigen::MatrixXcd rho;
  if (noise.has_gate_noise()) {
    rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                 static_cast<Eigen::Index>(dim));
    const auto idx = static_cast<Eigen::Index>(initial.basis_index());
    rho(idx, idx) = 1.0;
    for (const CompiledOp& op : compile_segment(circuit.ops, 0, circuit.ops.size(), L, noise))
      dm_apply(rho, op, L);
  } else {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    psi(static_cast<Eigen::Index>(initial.basis_index())) = 1.0;
    for (const Gate& g : circuit.ops) sv_apply(psi, g, L);
    rho = psi * psi.adjoint();
  }
  if (noise.globalEps > 0.0) {
    rho *= 1.0 - noise.globalEps;
    const double fill = noise.globalEps / static_cast<double>(dim);
    for (std::size_t i = 0; i < dim; ++i)
      rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += fill;
  }
  // readoutFlip is a classical measurement channel and is not part of the state.
  return rho;
}

void apply_global_eps(std::vector<double>& probs, double eps) {
  if (eps <= 0.0) return;
  if (eps > 1.0) throw config_error("apply_global_eps: eps must lie in [0,1]");
  const double fill = eps / static_cast<double>(probs.size());
  for (double& p : probs) p = (1.0 - eps) * p + fill;
}

void apply_readout_flips(std::vector<double>& probs, double flipProbability) {
  if (flipProbability <= 0.0) return;
  if (flipProbability > 1.0)
    throw config_error("apply_readout_flips: flip probability must lie in [0,1]");
  const std::size_t dim = probs.size();
  const double keep = 1.0 - flipProbability;
  for (std::size_t m = 1; m < dim; m <<= 1) {
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & m) continue;
      const double a = probs[i], b = probs[i | m];
      probs[i] = keep * a + flipProbability * b;
      probs[i | m] = flipProbability * a + keep * b;
    }
  }
}

CountsTable sample_counts(const std::vector<double>& distribution, std::int64_t shots,
                          std::uint64_t seed) {
  if (shots < 0) throw config_error("sample_counts: shots must be >= 0");
  const std::size_t dim = distribution.size();
  int L = 0;
  while ((std::size_t{1} << L) < dim) ++L;
  if (dim == 0 || (std::size_t{1} << L) != dim)
    throw config_error("sample_counts: distribution length must be a power of two");
  double total = 0.0;
  for (double p : distribution) {
    if (p < -1e-9) throw numeric_error("sample_counts: negative probability");
    total += std::max(p, 0.0);
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw numeric_error("sample_counts: distribution is not normalized");

  std::vector<double> cdf(dim);
  double run = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    run += std::max(distribution[i], 0.0);
    cdf[i] = run;
  }

  auto bitstring_of = [&](std::size_t idx) {
    std::string s(static_cast<std::size_t>(L), '0');
    for (int site = 1; site <= L; ++site)
      s[static_cast<std::size_t>(site - 1)] = static_cast<char>('0' + bit_at(idx, site, L));
    return s;
  };

  CountsTable table;
  table.shots = shots;
  table.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::int64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cdf.begin()), dim - 1);
    ++table.counts[bitstring_of(idx)];
  }
  return table;
}

namespace {

int counts_length(const CountsTable& counts) {
  if (counts.counts.empty()) throw numeric_error("estimator: empty counts table");
  return static_cast<int>(counts.counts.begin()->first.size());
}

int bit_of_string(const std::string& bits, int site) {
  return bits[static_cast<std::size_t>(site - 1)] == '1' ? 1 : 0;
}

}  // namespace

double estimate_magnetization(const CountsTable& counts, int site) {
  const int L = counts_length(counts);
  if (site < 1 || site > L) throw config_error("estimate_magnetization: site out of range");
  double acc = 0.0;
  std::int64_t n = 0;
  for (const auto& [bits, count] : counts.counts) {
    acc += static_cast<double>(count) * (1.0 - 2.0 * bit_of_string(bits, site));
    n += count;
  }
  if (n <= 0) throw numeric_error("estimate_magnetization: no shots");
  return acc / static_cast<double>(n);
}

double estimate_zz(const CountsTable& counts, int i, int j) {
  const int L = counts_length(counts);
  if (i < 1 || i > L || j < 1 || j > L) throw config_error("estimate_zz: site out of range");
  double acc = 0.0;
  std::int64_t n = 0;
  for (const auto& [bits, count] : counts.counts) {
    const int parity = bit_of_string(bits, i) ^ bit_of_string(bits, j);
    acc += static_cast<double>(count) * (parity ? -1.0 : 1.0);
    n += count;
  }
  if (n <= 0) throw numeric_error("estimate_zz: no shots");
  return acc / static_cast<double>(n);
}

double estimate_kink_density(const CountsTable& counts, int site, bool postselectTwoKink) {
  const int L = counts_length(counts);
  if (site < 1 || site >= L)
    throw config_error("estimate_kink_density: site must lie in 1..L-1");
  double acc = 0.0;
  std::int64_t n = 0;
  for (const auto& [bits, count] : counts.counts) {
    if (postselectTwoKink) {
      int walls = 0;
      for (int s = 1; s < L; ++s) walls += bit_of_string(bits, s) ^ bit_of_string(bits, s + 1);
      if (walls != 2) continue;
    }
    const int kink = bit_of_string(bits, site) ^ bit_of_string(bits, site + 1);
    acc += static_cast<double>(count) * kink;
    n += count;
  }
  if (n <= 0) throw numeric_error("two-kink post-selection removed every outcome");
  return acc / static_cast<double>(n);
}

double connected_correlation(double zz, double mi, double mj) { return zz - mi * mj; }

double estimate_observable(const Observable& obs, const CountsTable& counts) {
  switch (obs.kind) {
    case Observable::Kind::Magnetization:
      return estimate_magnetization(counts, obs.i);
    case Observable::Kind::ZZ:
      return estimate_zz(counts, obs.i, obs.j);
    case Observable::Kind::KinkDensity:
      return estimate_kink_density(counts, obs.i, false);
    case Observable::Kind::KinkDensityTwoKink:
      return estimate_kink_density(counts, obs.i, true);
  }
  throw config_error("estimate_observable: unknown observable kind");
}

}  // namespace quenchmit
