#include "textio.hpp"

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace exotorq {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Err::Io, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(Err::Io, "cannot open " + tmp + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            fail(Err::Io, "short write to " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        fail(Err::Io, "rename " + tmp + " -> " + path + " failed: " + ec.message());
    }
}

unsigned long crc32_of(const void* data, std::size_t size) {
    return ::crc32(0UL, static_cast<const Bytef*>(data), static_cast<uInt>(size));
}

std::string crc32_hex(unsigned long crc) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08lx", crc & 0xffffffffUL);
    return std::string(buf);
}

} // namespace exotorq
