#include "hmlc/hash.hpp"

#include <fstream>
#include <sstream>

#include "hmlc/errors.hpp"

namespace hmlc {

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64(buf.str());
}

} // namespace hmlc
