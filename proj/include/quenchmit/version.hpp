#ifndef QUENCHMIT_VERSION_HPP
#define QUENCHMIT_VERSION_HPP

namespace quenchmit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quenchmit

#endif
