#include "quenchmit/model.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace quenchmit {

void ModelParams::validate() const {
  if (L < 1) throw config_error("ModelParams: L must be >= 1");
  if (J <= 0) throw config_error("ModelParams: J must be > 0");
  if (hX < 0 || hZ < 0) throw config_error("ModelParams: fields must be >= 0");
}

ProductState::ProductState(std::vector<int> s) : spins(std::move(s)) {
  for (int b : spins)
    if (b != 0 && b != 1) throw config_error("ProductState: spins must be 0 or 1");
}

ProductState ProductState::all_up(int L) {
  if (L < 1) throw config_error("ProductState: L must be >= 1");
  return ProductState(std::vector<int>(L, 0));
}

ProductState ProductState::kink(int L, int i) {
  if (L < 1 || i < 0 || i > L) throw config_error("ProductState: kink position out of range");
  std::vector<int> s(L, 0);
  for (int q = i + 1; q <= L; ++q) s[q - 1] = 1;
  return ProductState(std::move(s));
}

ProductState ProductState::meson(int L, int i, int n) {
  if (L < 1 || n < 0 || i < 0 || i + n > L)
    throw config_error("ProductState: meson domain out of range");
  std::vector<int> s(L, 0);
  for (int q = i + 1; q <= i + n; ++q) s[q - 1] = 1;
  return ProductState(std::move(s));
}

std::size_t ProductState::basis_index() const {
  std::size_t idx = 0;
  for (int b : spins) idx = (idx << 1) | static_cast<std::size_t>(b);
  return idx;
}

std::string ProductState::bitstring() const {
  std::string s;
  s.reserve(spins.size());
  for (int b : spins) s.push_back(b ? '1' : '0');
  return s;
}

void TimeGrid::validate() const {
  if (dt <= 0) throw config_error("TimeGrid: dt must be > 0");
  if (nSteps < 0) throw config_error("TimeGrid: nSteps must be >= 0");
}

std::vector<double> TimeGrid::times() const {
  validate();
  std::vector<double> out(nSteps);
  for (int k = 1; k <= nSteps; ++k) out[k - 1] = dt * k;
  return out;
}

Eigen::MatrixXd build_hamiltonian(const ModelParams& params) {
  params.validate();
  if (params.L > kDenseMaxL)
    throw capacity_error("build_hamiltonian: L > " + std::to_string(kDenseMaxL));
  const int L = params.L;
  const std::size_t dim = std::size_t{1} << L;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);

  // Diagonal part: ZZ couplings and longitudinal field.
  for (std::size_t b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (int s = 1; s < L; ++s) {
      const int zi = 1 - 2 * bit_at(b, s, L);
      const int zj = 1 - 2 * bit_at(b, s + 1, L);
      diag += zi * zj;
    }
    double zsum = 0.0;
    for (int s = 1; s <= L; ++s) zsum += 1 - 2 * bit_at(b, s, L);
    H(b, b) = -params.J * (diag + params.hZ * zsum);
  }

  // Off-diagonal part: transverse field flips one bit.
  for (std::size_t b = 0; b < dim; ++b) {
    for (int s = 1; s <= L; ++s) {
      const std::size_t flipped = b ^ (std::size_t{1} << (L - s));
      H(flipped, b) += -params.J * params.hX;
    }
  }
  return H;
}

namespace {

struct SpectralCache {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd energies;
};

SpectralCache diagonalize(const ModelParams& params) {
  Eigen::MatrixXd H = build_hamiltonian(params);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success)
    throw numeric_error("exact_evolve: eigensolver failed to converge");
  return {solver.eigenvectors(), solver.eigenvalues()};
}

std::vector<double> probabilities_at(const SpectralCache& cache, std::size_t initialIndex,
                                     double t) {
  using namespace std::complex_literals;
  const Eigen::Index dim = cache.energies.size();
  Eigen::VectorXcd phased(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    // c0_k = <E_k|initial> is a row of the real eigenvector matrix.
    const double c0 = cache.vectors(static_cast<Eigen::Index>(initialIndex), k);
    phased(k) = c0 * std::exp(-1i * cache.energies(k) * t);
  }
  Eigen::VectorXcd psi = cache.vectors * phased;
  std::vector<double> probs(dim);
  for (Eigen::Index b = 0; b < dim; ++b) probs[b] = std::norm(psi(b));
  return probs;
}

}  // namespace

std::vector<ObservableSeries> exact_evolve(const ModelParams& params,
                                           const ProductState& initial,
                                           const std::vector<double>& times,
                                           const std::vector<Observable>& observables) {
  params.validate();
  if (initial.L() != params.L)
    throw config_error("exact_evolve: initial state length mismatch");
  for (double t : times)
    if (t < 0) throw config_error("exact_evolve: times must be >= 0");

  SpectralCache cache = diagonalize(params);
  const std::size_t idx = initial.basis_index();

  std::vector<ObservableSeries> out;
  out.reserve(observables.size());
  for (const Observable& obs : observables)
    out.push_back({times, {}, obs.id(), "exact"});

  for (double t : times) {
    std::vector<double> probs = probabilities_at(cache, idx, t);
    for (std::size_t o = 0; o < observables.size(); ++o)
      out[o].values.push_back(expectation_from_probs(observables[o], probs, params.L));
  }
  return out;
}

std::vector<double> exact_probabilities(const ModelParams& params, const ProductState& initial,
                                        double t) {
  params.validate();
  if (initial.L() != params.L)
    throw config_error("exact_probabilities: initial state length mismatch");
  SpectralCache cache = diagonalize(params);
  return probabilities_at(cache, initial.basis_index(), t);
}

}  // namespace quenchmit
