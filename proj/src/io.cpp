#include "bannerscope/io.hpp"

#include "bannerscope/error.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace bannerscope::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    auto tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "_" +
           std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp, ec);
            throw IoError("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot replace " + path.string());
    }
}

} // namespace bannerscope::io
