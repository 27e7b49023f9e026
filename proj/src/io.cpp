#include "htqc/io.hpp"

#include <cstdio>
#include <fstream>

#include "htqc/errors.hpp"

namespace htqc {

std::string fingerprint(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << body;
    if (!out) throw IoError("write failed: " + path);
}

std::string stamp_csv(const std::string& body, const std::string& fp, std::uint64_t seed) {
    return "# fingerprint=" + fp + " seed=" + std::to_string(seed) + "\n" + body;
}

} // namespace htqc
