#include "gfen/manifest.hpp"

#include <cstdio>

#include "gfen/csv.hpp"

namespace gfen {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string file_content_hash(const std::string& path) {
    return fnv1a64_hex(read_text_file(path));
}

}  // namespace gfen
