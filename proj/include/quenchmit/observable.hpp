#ifndef QUENCHMIT_OBSERVABLE_HPP
#define QUENCHMIT_OBSERVABLE_HPP

#include <string>
#include <vector>

#include "quenchmit/errors.hpp"

namespace quenchmit {

// Z-diagonal observables measured from Z-basis distributions or counts.
// Sites are 1-based; site 1 is the leftmost character of a bitstring and
// bit value 0 encodes spin-up (Z eigenvalue +1).
struct Observable {
  enum class Kind {
    Magnetization,    // <Z_i>
    ZZ,               // <Z_i Z_j>
    KinkDensity,      // (1 - <Z_i Z_{i+1}>)/2
    KinkDensityTwoKink  // same, post-selected on exactly two domain walls
  };
  Kind kind = Kind::Magnetization;
  int i = 1;
  int j = 1;  // second site, ZZ only

  static Observable magnetization(int site) { return {Kind::Magnetization, site, site}; }
  static Observable zz(int i, int j) { return {Kind::ZZ, i, j}; }
  static Observable kink_density(int site, bool postselectTwoKink = false) {
    return {postselectTwoKink ? Kind::KinkDensityTwoKink : Kind::KinkDensity, site, site};
  }

  // Stable identifier used in CSV columns and training-set records.
  std::string id() const;
  // tr(O)/d for the pmCDR constant term; 0 for Z strings, 1/2 for kink density.
  double trace_term() const;
};

// Inverse of Observable::id: mz_<i>, zz_<i>_<j>, kink_<i>, kink2_<i>.
Observable observable_from_id(const std::string& id);

inline int bit_at(std::size_t basisIndex, int site, int L) {
  return static_cast<int>((basisIndex >> (L - site)) & 1u);
}

inline int domain_wall_count(std::size_t basisIndex, int L) {
  int walls = 0;
  for (int s = 1; s < L; ++s)
    walls += bit_at(basisIndex, s, L) ^ bit_at(basisIndex, s + 1, L);
  return walls;
}

// Expectation of a diagonal observable over a Z-basis probability vector.
double expectation_from_probs(const Observable& obs, const std::vector<double>& probs, int L);

// One labeled time series of expectation values.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string observableId;
  std::string provenance;  // "exact", "trotterExact", "raw(c=1)", "mitigated(cdr)", ...
};

}  // namespace quenchmit

#endif
