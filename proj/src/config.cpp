#include "quenchmit/config.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "quenchmit/io.hpp"

namespace quenchmit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct IniData {
  // key "section.name" -> (value, line number)
  std::map<std::string, std::pair<std::string, int>> entries;
  std::vector<std::string> consumed;

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  std::string take(const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end())
      throw config_error("config: missing required key '" + key + "'");
    consumed.push_back(key);
    return it->second.first;
  }

  std::string take_or(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return take(key);
  }

  void check_all_consumed() const {
    for (const auto& [key, value] : entries) {
      if (std::find(consumed.begin(), consumed.end(), key) == consumed.end())
        throw config_error("config line " + std::to_string(value.second) +
                           ": unknown key '" + key + "'");
    }
  }
};

IniData parse_ini(const std::string& text) {
  IniData data;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config line " + std::to_string(lineNo) +
                           ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("config line " + std::to_string(lineNo) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineNo) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineNo) + ": empty key");
    if (section.empty())
      throw config_error("config line " + std::to_string(lineNo) +
                         ": key outside any [section]");
    const std::string full = section + "." + key;
    if (data.entries.count(full))
      throw config_error("config line " + std::to_string(lineNo) + ": duplicate key '" +
                         full + "'");
    data.entries[full] = {value, lineNo};
  }
  return data;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw config_error("config: key '" + key + "' needs a number, got '" + value + "'");
  }
  if (used != value.size())
    throw config_error("config: key '" + key + "' needs a number, got '" + value + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw config_error("config: key '" + key + "' needs an integer, got '" + value + "'");
  }
  if (used != value.size())
    throw config_error("config: key '" + key + "' needs an integer, got '" + value + "'");
  return v;
}

std::uint64_t to_uint64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw config_error("config: key '" + key + "' needs an unsigned integer, got '" + value +
                       "'");
  }
  if (used != value.size())
    throw config_error("config: key '" + key + "' needs an unsigned integer, got '" + value +
                       "'");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

ProductState parse_initial(IniData& ini, int L) {
  const std::string state = ini.take_or("initial.state", "all_up");
  if (state == "bits") {
    const std::string bits = ini.take("initial.bits");
    if (static_cast<int>(bits.size()) != L)
      throw config_error("config: initial.bits length does not match model.L");
    std::vector<int> spins(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1')
        throw config_error("config: initial.bits must contain only 0 and 1");
      spins[i] = bits[i] - '0';
    }
    return ProductState(std::move(spins));
  }
  if (state == "all_up") return ProductState::all_up(L);
  if (state == "kink") {
    const int site = static_cast<int>(to_int("initial.site", ini.take("initial.site")));
    return ProductState::kink(L, site);
  }
  if (state == "meson") {
    const int site = static_cast<int>(to_int("initial.site", ini.take("initial.site")));
    const int length = static_cast<int>(to_int("initial.length", ini.take("initial.length")));
    return ProductState::meson(L, site, length);
  }
  throw config_error("config: initial.state must be all_up, kink, meson, or bits");
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  grid.validate();
  noise.validate();
  policy.validate();
  if (initial.L() != model.L)
    throw config_error("ExperimentConfig: initial state length does not match model.L");
  if (levels.empty()) throw config_error("ExperimentConfig: no noise levels");
  if (levels.front() != 1)
    throw config_error("ExperimentConfig: noise levels must start at 1");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || levels[i] % 2 == 0)
      throw config_error("ExperimentConfig: noise levels must be odd and positive");
    if (i > 0 && levels[i] <= levels[i - 1])
      throw config_error("ExperimentConfig: noise levels must be strictly ascending");
  }
  if (shots < 0) throw config_error("ExperimentConfig: shots must be >= 0");
  if (repeats < 1) throw config_error("ExperimentConfig: repeats must be >= 1");
  if (trainingCount < 2)
    throw config_error("ExperimentConfig: trainingCount must be >= 2");
  if (observables.empty()) throw config_error("ExperimentConfig: no observables");
  if (methods.empty()) throw config_error("ExperimentConfig: no methods");
  for (const std::string& m : methods) {
    if (m != "raw" && m != "zne" && m != "cdr" && m != "vncdr" && m != "pmcdr")
      throw config_error("ExperimentConfig: unknown method '" + m + "'");
  }
  for (const Observable& obs : observables) {
    const int maxSite =
        (obs.kind == Observable::Kind::KinkDensity ||
         obs.kind == Observable::Kind::KinkDensityTwoKink)
            ? model.L - 1
            : model.L;
    if (obs.i < 1 || obs.i > maxSite || obs.j < 1 || obs.j > model.L)
      throw config_error("ExperimentConfig: observable " + obs.id() + " is out of range");
  }
}

ExperimentConfig parse_config(const std::string& iniText) {
  IniData ini = parse_ini(iniText);
  ExperimentConfig config;

  config.model.J = to_double("model.J", ini.take_or("model.J", "1"));
  config.model.hX = to_double("model.hX", ini.take_or("model.hX", "0"));
  config.model.hZ = to_double("model.hZ", ini.take_or("model.hZ", "0"));
  config.model.L = static_cast<int>(to_int("model.L", ini.take("model.L")));

  config.grid.dt = to_double("grid.dt", ini.take("grid.dt"));
  config.grid.nSteps = static_cast<int>(to_int("grid.nSteps", ini.take("grid.nSteps")));

  config.initial = parse_initial(ini, config.model.L);

  config.noise.p2 = to_double("noise.p2", ini.take_or("noise.p2", "0"));
  config.noise.p1 = to_double("noise.p1", ini.take_or("noise.p1", "0"));
  config.noise.readoutFlip =
      to_double("noise.readoutFlip", ini.take_or("noise.readoutFlip", "0"));
  config.noise.globalEps = to_double("noise.globalEps", ini.take_or("noise.globalEps", "0"));

  if (ini.has("experiment.levels")) {
    config.levels.clear();
    for (const std::string& item : split_list(ini.take("experiment.levels")))
      config.levels.push_back(static_cast<int>(to_int("experiment.levels", item)));
  }
  config.shots = to_int("experiment.shots", ini.take_or("experiment.shots", "8192"));
  config.repeats =
      static_cast<int>(to_int("experiment.repeats", ini.take_or("experiment.repeats", "6")));
  if (ini.has("experiment.methods"))
    config.methods = split_list(ini.take("experiment.methods"));
  config.masterSeed =
      to_uint64("experiment.masterSeed", ini.take_or("experiment.masterSeed", "0"));

  config.policy.sigma = to_double("policy.sigma", ini.take_or("policy.sigma", "0.5"));
  config.policy.fractionReplaced = to_double(
      "policy.fractionReplaced", ini.take_or("policy.fractionReplaced", "0.5"));
  config.policy.nonCliffordCap = static_cast<int>(
      to_int("policy.nonCliffordCap", ini.take_or("policy.nonCliffordCap", "50")));
  config.policy.method =
      static_cast<int>(to_int("policy.method", ini.take_or("policy.method", "1")));
  config.trainingCount = static_cast<int>(
      to_int("experiment.trainingCount", ini.take_or("experiment.trainingCount", "50")));

  for (const std::string& id : split_list(ini.take("observables.list")))
    config.observables.push_back(observable_from_id(id));

  ini.check_all_consumed();
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string config_canonical_text(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "model.J=" << format_double(config.model.J) << '\n'
     << "model.hX=" << format_double(config.model.hX) << '\n'
     << "model.hZ=" << format_double(config.model.hZ) << '\n'
     << "model.L=" << config.model.L << '\n'
     << "initial.bits=" << config.initial.bitstring() << '\n'
     << "grid.dt=" << format_double(config.grid.dt) << '\n'
     << "grid.nSteps=" << config.grid.nSteps << '\n'
     << "noise.p2=" << format_double(config.noise.p2) << '\n'
     << "noise.p1=" << format_double(config.noise.p1) << '\n'
     << "noise.readoutFlip=" << format_double(config.noise.readoutFlip) << '\n'
     << "noise.globalEps=" << format_double(config.noise.globalEps) << '\n';
  os << "experiment.levels=";
  for (std::size_t i = 0; i < config.levels.size(); ++i)
    os << (i ? "," : "") << config.levels[i];
  os << '\n';
  os << "experiment.shots=" << config.shots << '\n'
     << "experiment.repeats=" << config.repeats << '\n';
  os << "experiment.methods=";
  for (std::size_t i = 0; i < config.methods.size(); ++i)
    os << (i ? "," : "") << config.methods[i];
  os << '\n';
  os << "experiment.trainingCount=" << config.trainingCount << '\n'
     << "experiment.masterSeed=" << config.masterSeed << '\n'
     << "policy.sigma=" << format_double(config.policy.sigma) << '\n'
     << "policy.fractionReplaced=" << format_double(config.policy.fractionReplaced) << '\n'
     << "policy.nonCliffordCap=" << config.policy.nonCliffordCap << '\n'
     << "policy.method=" << config.policy.method << '\n';
  os << "observables.list=";
  for (std::size_t i = 0; i < config.observables.size(); ++i)
    os << (i ? "," : "") << config.observables[i].id();
  os << '\n';
  return os.str();
}

}  // namespace quenchmit
