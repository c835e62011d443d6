#include "quenchmit/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "quenchmit/io.hpp"

namespace quenchmit {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FitData {
  std::vector<double> t;
  std::vector<double> y;
};

double model_value(const double a[5], double t) {
  const double damp = std::exp(std::min(50.0, -a[1] * t));
  return a[0] * damp * std::cos(a[2] * t) + a[3] * t + a[4];
}

double sse_of(const double a[5], const FitData& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    const double e = model_value(a, d.t[i]) - d.y[i];
    s += e * e;
  }
  return s;
}

// Levenberg-damped Gauss-Newton from the given start; returns true when the
// step sequence settled before the iteration cap.
bool refine(double a[5], const FitData& d, double omegaMax) {
  const std::size_t n = d.t.size();
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 5);
  Eigen::VectorXd res(static_cast<Eigen::Index>(n));
  double lambda = 1e-3;
  double sse = sse_of(a, d);
  const double omegaMin = 0.05;

  for (int iter = 0; iter < 200; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = d.t[i];
      const double damp = std::exp(std::min(50.0, -a[1] * t));
      const double c = std::cos(a[2] * t);
      const double s = std::sin(a[2] * t);
      res(static_cast<Eigen::Index>(i)) = a[0] * damp * c + a[3] * t + a[4] - d.y[i];
      jac(static_cast<Eigen::Index>(i), 0) = damp * c;
      jac(static_cast<Eigen::Index>(i), 1) = -a[0] * t * damp * c;
      jac(static_cast<Eigen::Index>(i), 2) = -a[0] * t * damp * s;
      jac(static_cast<Eigen::Index>(i), 3) = t;
      jac(static_cast<Eigen::Index>(i), 4) = 1.0;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * res;

    bool moved = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (int kk = 0; kk < 5; ++kk)
        damped(kk, kk) += lambda * std::max(jtj(kk, kk), 1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      double trial[5];
      for (int kk = 0; kk < 5; ++kk) trial[kk] = a[kk] + step(kk);
      trial[1] = std::min(50.0, std::max(-5.0, trial[1]));
      trial[2] = std::min(omegaMax, std::max(omegaMin, std::abs(trial[2])));
      const double trialSse = sse_of(trial, d);
      if (std::isfinite(trialSse) && trialSse <= sse) {
        const double gain = sse - trialSse;
        for (int kk = 0; kk < 5; ++kk) a[kk] = trial[kk];
        sse = trialSse;
        lambda = std::max(1e-12, lambda * 0.3);
        moved = true;
        if (gain <= 1e-14 * (1.0 + sse)) return true;
        break;
      }
      lambda *= 10.0;
    }
    if (!moved) return true;  // stuck in a basin minimum
  }
  return false;
}

}  // namespace

TwoKinkSpectrum two_kink_spectrum(const ModelParams& params, double k) {
  params.validate();
  if (params.L < 3) throw config_error("two_kink_spectrum: chain length must be >= 3");
  const int n = params.L - 1;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (int i = 0; i < n; ++i) diag(i) = 2.0 * params.J * params.hZ * (i + 1);
  const double hop = 2.0 * params.J * params.hX * std::cos(0.5 * k);
  for (int i = 0; i + 1 < n; ++i) sub(i) = hop;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw numeric_error("two_kink_spectrum: tridiagonal eigensolver failed");

  TwoKinkSpectrum spectrum;
  spectrum.k = k;
  spectrum.params = params;
  spectrum.energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(spectrum.energies.begin(), spectrum.energies.end());
  return spectrum;
}

std::vector<double> meson_frequencies(const TwoKinkSpectrum& spectrum) {
  if (spectrum.energies.size() < 2)
    throw config_error("meson_frequencies: need at least 2 energies");
  std::vector<double> freq(spectrum.energies.size() - 1);
  for (std::size_t i = 0; i + 1 < spectrum.energies.size(); ++i)
    freq[i] = spectrum.energies[i + 1] - spectrum.energies[i];
  return freq;
}

std::vector<double> meson_masses(const std::vector<double>& frequencies, double omega0) {
  if (frequencies.empty()) return {};
  std::vector<double> masses(frequencies.size());
  masses[0] = omega0;
  for (std::size_t i = 1; i < frequencies.size(); ++i)
    masses[i] = masses[i - 1] + frequencies[i];
  return masses;
}

CosineFit fit_damped_cosine(const ObservableSeries& series, double tMax) {
  if (series.times.size() != series.values.size())
    throw config_error("fit_damped_cosine: times and values differ in length");

  FitData d;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] <= tMax + 1e-12) {
      d.t.push_back(series.times[i]);
      d.y.push_back(series.values[i]);
    }
  }
  const std::size_t n = d.t.size();
  if (n < 6)
    throw numeric_error("fit_damped_cosine: need at least 6 samples inside the window");
  const double dt = d.t[1] - d.t[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(d.t[i] - d.t[i - 1] - dt) > 1e-9)
      throw config_error("fit_damped_cosine: time grid must be uniform");

  // Detrend with an ordinary least-squares line; the residual carries the
  // oscillation.
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += d.t[i];
    sy += d.y[i];
  }
  const double xbar = sx / static_cast<double>(n);
  const double ybar = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (d.t[i] - xbar) * (d.t[i] - xbar);
    sxy += (d.t[i] - xbar) * (d.y[i] - ybar);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = ybar - slope * xbar;
  std::vector<double> detrended(n);
  double amplitude = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    detrended[i] = d.y[i] - (intercept + slope * d.t[i]);
    amplitude = std::max(amplitude, std::abs(detrended[i]));
  }

  // Hann-windowed zero-padded DFT of the detrended window.
  std::size_t pad = 1;
  while (pad < 16 * n) pad <<= 1;
  std::vector<double> magnitude(pad / 2, 0.0);
  for (std::size_t bin = 1; bin < pad / 2; ++bin) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double w =
          n > 1 ? 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                        static_cast<double>(n - 1)))
                : 1.0;
      const double phase = -2.0 * kPi * static_cast<double>(bin) * static_cast<double>(i) /
                           static_cast<double>(pad);
      acc += detrended[i] * w * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    magnitude[bin] = std::abs(acc);
  }
  const double omegaMax = 0.999 * kPi / dt;

  std::vector<double> starts;
  std::vector<std::size_t> peakBins;
  for (std::size_t bin = 2; bin + 1 < magnitude.size(); ++bin)
    if (magnitude[bin] >= magnitude[bin - 1] && magnitude[bin] >= magnitude[bin + 1])
      peakBins.push_back(bin);
  std::stable_sort(peakBins.begin(), peakBins.end(), [&](std::size_t a, std::size_t b) {
    return magnitude[a] > magnitude[b];
  });
  for (std::size_t p = 0; p < std::min<std::size_t>(3, peakBins.size()); ++p) {
    const double omega = 2.0 * kPi * static_cast<double>(peakBins[p]) /
                         (static_cast<double>(pad) * dt);
    if (omega > 0.05 && omega < omegaMax) starts.push_back(omega);
  }
  for (int g = 1; g <= 8; ++g) {
    const double omega = omegaMax * static_cast<double>(g) / 9.0;
    if (omega > 0.05) starts.push_back(omega);
  }

  CosineFit best;
  best.tMax = d.t.back();
  best.residual = std::numeric_limits<double>::infinity();
  bool bestConverged = false;
  for (double omega : starts) {
    double a[5] = {amplitude > 0.0 ? amplitude : 1e-3, 0.1, omega, slope, intercept};
    const bool settled = refine(a, d, omegaMax);
    const double sse = sse_of(a, d);
    if (sse < best.residual) {
      best.a1 = a[0];
      best.a2 = a[1];
      best.a3 = std::abs(a[2]);
      best.a4 = a[3];
      best.a5 = a[4];
      best.residual = sse;
      bestConverged = settled;
    }
  }
  if (!std::isfinite(best.residual))
    throw numeric_error("fit_damped_cosine: every fit start diverged");

  // The oscillation is unidentifiable when dropping it entirely does as well.
  double line[5] = {0.0, 0.0, 0.0, slope, intercept};
  const double lineSse = sse_of(line, d);
  const double scale = std::max(amplitude, 1e-12);
  if (std::abs(best.a1) < 1e-8 * scale || lineSse <= best.residual * (1.0 + 1e-9))
    bestConverged = false;
  best.converged = bestConverged;
  return best;
}

std::string spectrum_to_csv(const TwoKinkSpectrum& spectrum, double omega0) {
  std::ostringstream os;
  os << "hZ,alpha,E,omega,m\n";
  const auto freq = spectrum.energies.size() >= 2 ? meson_frequencies(spectrum)
                                                  : std::vector<double>{};
  const auto masses = meson_masses(freq, omega0);
  for (std::size_t alpha = 0; alpha < spectrum.energies.size(); ++alpha) {
    os << format_double(spectrum.params.hZ) << ',' << alpha << ','
       << format_double(spectrum.energies[alpha]) << ',';
    if (alpha < freq.size()) os << format_double(freq[alpha]);
    os << ',';
    if (alpha < masses.size()) os << format_double(masses[alpha]);
    os << '\n';
  }
  return os.str();
}

}  // namespace quenchmit
