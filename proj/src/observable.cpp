#include "quenchmit/observable.hpp"

#include <cmath>
#include <string>

namespace quenchmit {

std::string Observable::id() const {
  switch (kind) {
    case Kind::Magnetization:
      return "mz_" + std::to_string(i);
    case Kind::ZZ:
      return "zz_" + std::to_string(i) + "_" + std::to_string(j);
    case Kind::KinkDensity:
      return "kink_" + std::to_string(i);
    case Kind::KinkDensityTwoKink:
      return "kink2_" + std::to_string(i);
  }
  return "unknown";
}

double Observable::trace_term() const {
  switch (kind) {
    case Kind::Magnetization:
    case Kind::ZZ:
      return 0.0;  // traceless Pauli strings
    case Kind::KinkDensity:
    case Kind::KinkDensityTwoKink:
      return 0.5;  // tr((1 - ZZ)/2)/d
  }
  return 0.0;
}

Observable observable_from_id(const std::string& id) {
  const auto parse_int = [&](const std::string& text) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(text, &used);
    } catch (const std::exception&) {
      throw config_error("observable id '" + id + "': bad site index");
    }
    if (used != text.size() || value < 1)
      throw config_error("observable id '" + id + "': bad site index");
    return value;
  };

  const auto underscore = id.find('_');
  if (underscore == std::string::npos || underscore + 1 >= id.size())
    throw config_error("observable id '" + id + "': expected kind_site form");
  const std::string kind = id.substr(0, underscore);
  const std::string rest = id.substr(underscore + 1);

  if (kind == "mz") return Observable::magnetization(parse_int(rest));
  if (kind == "kink") return Observable::kink_density(parse_int(rest), false);
  if (kind == "kink2") return Observable::kink_density(parse_int(rest), true);
  if (kind == "zz") {
    const auto second = rest.find('_');
    if (second == std::string::npos || second + 1 >= rest.size())
      throw config_error("observable id '" + id + "': zz needs two sites");
    return Observable::zz(parse_int(rest.substr(0, second)),
                          parse_int(rest.substr(second + 1)));
  }
  throw config_error("observable id '" + id + "': unknown kind '" + kind + "'");
}

namespace {

void check_site(int site, int L, const char* what) {
  if (site < 1 || site > L)
    throw config_error(std::string(what) + ": site out of range");
}

}  // namespace

double expectation_from_probs(const Observable& obs, const std::vector<double>& probs, int L) {
  const std::size_t dim = std::size_t{1} << L;
  if (probs.size() != dim) throw config_error("expectation_from_probs: wrong vector length");

  switch (obs.kind) {
    case Observable::Kind::Magnetization: {
      check_site(obs.i, L, "magnetization");
      double acc = 0.0;
      for (std::size_t b = 0; b < dim; ++b)
        acc += probs[b] * (1 - 2 * bit_at(b, obs.i, L));
      return acc;
    }
    case Observable::Kind::ZZ: {
      check_site(obs.i, L, "zz");
      check_site(obs.j, L, "zz");
      double acc = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        const int zi = 1 - 2 * bit_at(b, obs.i, L);
        const int zj = 1 - 2 * bit_at(b, obs.j, L);
        acc += probs[b] * zi * zj;
      }
      return acc;
    }
    case Observable::Kind::KinkDensity: {
      if (obs.i < 1 || obs.i >= L) throw config_error("kink density: site must be in 1..L-1");
      double acc = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        const int zi = 1 - 2 * bit_at(b, obs.i, L);
        const int zj = 1 - 2 * bit_at(b, obs.i + 1, L);
        acc += probs[b] * zi * zj;
      }
      return 0.5 * (1.0 - acc);
    }
    case Observable::Kind::KinkDensityTwoKink: {
      if (obs.i < 1 || obs.i >= L) throw config_error("kink density: site must be in 1..L-1");
      double total = 0.0;
      double acc = 0.0;
      for (std::size_t b = 0; b < dim; ++b) {
        if (domain_wall_count(b, L) != 2) continue;
        total += probs[b];
        const int zi = 1 - 2 * bit_at(b, obs.i, L);
        const int zj = 1 - 2 * bit_at(b, obs.i + 1, L);
        acc += probs[b] * zi * zj;
      }
      if (total <= 0.0)
        throw numeric_error("kink density: two-kink post-selection removed every outcome");
      return 0.5 * (1.0 - acc / total);
    }
  }
  throw config_error("expectation_from_probs: unknown observable kind");
}

}  // namespace quenchmit
