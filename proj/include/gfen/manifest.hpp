#pragma once

#include <cstdint>
#include <string>

#include "gfen/errors.hpp"

namespace gfen {

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::string file_content_hash(const std::string& path);

inline const char* kGfenVersion = "0.1.0";

}  // namespace gfen
