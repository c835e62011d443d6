#ifndef QUENCHMIT_ANALYSIS_HPP
#define QUENCHMIT_ANALYSIS_HPP

#include <string>
#include <vector>

#include "quenchmit/model.hpp"
#include "quenchmit/observable.hpp"

namespace quenchmit {

// Spectrum of the two-kink sector at momentum k: the (L-1) x (L-1) symmetric
// tridiagonal operator with diagonal V(n) = 2 J hZ n and off-diagonal
// 2 J hX cos(k/2). Energies are sorted ascending.
struct TwoKinkSpectrum {
  double k = 0.0;
  std::vector<double> energies;
  ModelParams params;
};

// Parameters of a1 exp(-a2 t) cos(a3 t) + a4 t + a5 fitted on t <= tMax.
struct CosineFit {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;  // reported nonnegative
  double a4 = 0.0;
  double a5 = 0.0;
  double residual = 0.0;  // sum of squared residuals of the returned fit
  double tMax = 0.0;
  bool converged = true;  // false when the oscillation is unidentifiable
};

TwoKinkSpectrum two_kink_spectrum(const ModelParams& params, double k = 0.0);

// First differences of the sorted energies: element alpha = E[alpha+1] - E[alpha].
std::vector<double> meson_frequencies(const TwoKinkSpectrum& spectrum);

// Cumulative sums m_alpha = omega0 + sum_{beta=1..alpha} frequencies[beta].
// Element 0 of the input is not usable within the two-kink model, so the
// externally measured omega0 takes its place.
std::vector<double> meson_masses(const std::vector<double>& frequencies, double omega0);

// Single-frequency fit: detrended Hann-windowed DFT seeds a damped
// Gauss-Newton refinement, multi-start over the top spectral peaks and a
// coarse frequency grid; the best residual wins. Deterministic.
CosineFit fit_damped_cosine(const ObservableSeries& series, double tMax);

// Rows hZ, alpha, E, omega, m for one spectrum; omega and m are empty on the
// last row, which has no upward gap.
std::string spectrum_to_csv(const TwoKinkSpectrum& spectrum, double omega0);

}  // namespace quenchmit

#endif
