#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "quenchmit/analysis.hpp"

using namespace quenchmit;

namespace {

ObservableSeries synthetic_series(double a1, double a2, double a3, double a4, double a5,
                                  double dt, int nSamples) {
  ObservableSeries series;
  series.observableId = "mz_4";
  for (int i = 1; i <= nSamples; ++i) {
    const double t = dt * i;
    series.times.push_back(t);
    series.values.push_back(a1 * std::exp(-a2 * t) * std::cos(a3 * t) + a4 * t + a5);
  }
  return series;
}

}  // namespace

TEST_CASE("free-kink spectrum at zero longitudinal field") {
  const TwoKinkSpectrum s = two_kink_spectrum({1.0, 0.5, 0.0, 4});
  REQUIRE(s.energies.size() == 3);
  CHECK(s.energies[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.energies[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.energies[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("confining limit is the linear ladder") {
  const TwoKinkSpectrum s = two_kink_spectrum({1.0, 0.0, 0.7, 6});
  REQUIRE(s.energies.size() == 5);
  for (std::size_t n = 0; n < 5; ++n)
    CHECK(s.energies[n] == doctest::Approx(2.0 * 0.7 * (n + 1)).epsilon(1e-14));
  for (double f : meson_frequencies(s)) CHECK(f == doctest::Approx(2.0 * 0.7).epsilon(1e-12));
}

TEST_CASE("tridiagonal solver matches the dense oracle") {
  for (double k : {0.0, 1.2, 3.14159265358979323846}) {
    const ModelParams p{1.0, 0.5, 0.75, 9};
    const TwoKinkSpectrum s = two_kink_spectrum(p, k);
    double residual = 0.0;
    const auto dense = oracles::two_kink_dense(p, k, &residual);
    REQUIRE(s.energies.size() == dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i)
      CHECK(s.energies[i] == doctest::Approx(dense[i]).epsilon(1e-10));
    CHECK(residual < 1e-8);
    CHECK(s.k == k);
  }
}

TEST_CASE("energies grow with the longitudinal field") {
  double previous = -1e9;
  for (double hZ : {0.5, 0.65, 0.75, 0.9}) {
    const TwoKinkSpectrum s = two_kink_spectrum({1.0, 0.5, hZ, 9});
    CHECK(s.energies.front() > previous);
    previous = s.energies.front();
  }
  CHECK_THROWS_AS(two_kink_spectrum({1.0, 0.5, 0.9, 2}), config_error);
}

TEST_CASE("meson frequencies are the level spacings") {
  TwoKinkSpectrum s;
  s.energies = {0.0, 1.3};
  const auto freq = meson_frequencies(s);
  REQUIRE(freq.size() == 1);
  CHECK(freq[0] == doctest::Approx(1.3));

  s.energies = {0.5};
  CHECK_THROWS_AS(meson_frequencies(s), config_error);
}

TEST_CASE("meson masses anchor on the measured base frequency") {
  const auto masses = meson_masses({1.0, 1.0, 1.0}, 0.8);
  REQUIRE(masses.size() == 3);
  CHECK(masses[0] == doctest::Approx(0.8));
  CHECK(masses[1] == doctest::Approx(1.8));
  CHECK(masses[2] == doctest::Approx(2.8));
  CHECK(meson_masses({}, 0.8).empty());
}

TEST_CASE("damped cosine fit recovers generative parameters") {
  const ObservableSeries series = synthetic_series(1.2, 0.1, 2.0, 0.05, 0.3, 0.1, 60);
  const CosineFit fit = fit_damped_cosine(series, 6.0);
  CHECK(fit.converged);
  CHECK(fit.a1 == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(fit.a2 == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(fit.a3 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.a4 == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(fit.a5 == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(fit.residual < 1e-10);
  CHECK(fit.tMax == doctest::Approx(6.0));
}

TEST_CASE("pure undamped oscillation") {
  const ObservableSeries series = synthetic_series(1.0, 0.1, 2.0, 0.0, 0.0, 0.1, 60);
  const CosineFit fit = fit_damped_cosine(series, 6.0);
  CHECK(fit.converged);
  CHECK(fit.a3 == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("fit window honors tMax") {
  ObservableSeries series = synthetic_series(1.0, 0.1, 2.0, 0.0, 0.0, 0.25, 40);
  const CosineFit fit = fit_damped_cosine(series, 3.0);
  CHECK(fit.tMax == doctest::Approx(3.0));
  CHECK(fit.a3 == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("a constant series has no identifiable oscillation") {
  ObservableSeries series;
  for (int i = 1; i <= 30; ++i) {
    series.times.push_back(0.1 * i);
    series.values.push_back(0.42);
  }
  const CosineFit fit = fit_damped_cosine(series, 3.0);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("the frequency estimate ignores linear trends") {
  const ObservableSeries plain = synthetic_series(0.8, 0.15, 1.7, 0.0, 0.0, 0.1, 50);
  ObservableSeries trended = plain;
  for (std::size_t i = 0; i < trended.times.size(); ++i)
    trended.values[i] += 0.3 * trended.times[i] - 0.2;
  const CosineFit a = fit_damped_cosine(plain, 5.0);
  const CosineFit b = fit_damped_cosine(trended, 5.0);
  CHECK(a.a3 == doctest::Approx(b.a3).epsilon(1e-6));
  CHECK(b.a4 == doctest::Approx(a.a4 + 0.3).epsilon(1e-6));
}

TEST_CASE("fit input validation") {
  ObservableSeries bad;
  bad.times = {0.1, 0.2};
  bad.values = {1.0};
  CHECK_THROWS_AS(fit_damped_cosine(bad, 1.0), config_error);

  ObservableSeries few = synthetic_series(1.0, 0.1, 2.0, 0.0, 0.0, 0.1, 5);
  CHECK_THROWS_AS(fit_damped_cosine(few, 1.0), numeric_error);

  ObservableSeries uneven = synthetic_series(1.0, 0.1, 2.0, 0.0, 0.0, 0.1, 20);
  uneven.times[10] += 0.03;
  CHECK_THROWS_AS(fit_damped_cosine(uneven, 2.0), config_error);
}

TEST_CASE("spectrum csv layout") {
  const TwoKinkSpectrum s = two_kink_spectrum({1.0, 0.5, 0.9, 4});
  const std::string csv = spectrum_to_csv(s, 1.1);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hZ,alpha,E,omega,m");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 3);
  CHECK(last.substr(last.size() - 2) == ",,");  // no gap above the top level
  CHECK(csv.find("\n0.9,0,") != std::string::npos);
  CHECK(csv.find(",1.1\n") != std::string::npos);  // omega0 enters the mass column
}
