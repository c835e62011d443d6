#ifndef QUENCHMIT_ERRORS_HPP
#define QUENCHMIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace quenchmit {

// Thrown when a request exceeds a hard size bound (dense backends cap L).
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for malformed configuration, arguments, or input files.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a numeric procedure cannot produce a meaningful result
// (singular fits, empty post-selection, amplification overflow).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for filesystem failures on emit/read paths.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace quenchmit

#endif
