#include "smm/io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "smm/error.hpp"

namespace smm {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractViolation("cannot open file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string hex16(std::uint64_t bits) {
    char buf[16];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, bits, 16);
    std::string out(16 - static_cast<std::size_t>(ptr - buf), '0');
    out.append(buf, ptr);
    return out;
}

}  // namespace

std::string double_to_hex(double v) { return "0x" + hex16(std::bit_cast<std::uint64_t>(v)); }

double hex_to_double(std::string_view s) {
    if (s.size() != 18 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
        throw ContractViolation("malformed hex double '" + std::string(s) + "'");
    std::uint64_t bits = 0;
    const auto [ptr, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), bits, 16);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ContractViolation("malformed hex double '" + std::string(s) + "'");
    return std::bit_cast<double>(bits);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::string_view bytes) { return hex16(fnv1a64(bytes)); }

}  // namespace smm
