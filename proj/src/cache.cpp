#include "cmcycles/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmcycles/errors.hpp"

namespace cmc {

namespace fs = std::filesystem;

namespace {

// flock-based advisory lock held for the duration of one read or write.
class FileLock {
public:
    explicit FileLock(const std::string& path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0) ::flock(fd_, LOCK_EX);
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    int fd_ = -1;
};

std::string sanitize(const std::string& key) {
    std::string out;
    for (char c : key)
        out += (isalnum((unsigned char)c) || c == '-' || c == '_' || c == '.') ? c : '_';
    return out;
}

}  // namespace

Cache::Cache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) fail(errc::cache_error, "cannot create cache directory " + dir_);
    }
}

std::string Cache::path_for(const std::string& key) const {
    return dir_ + "/" + sanitize(key) + ".json";
}

std::optional<std::string> Cache::load(const std::string& key) const {
    if (!enabled()) return std::nullopt;
    FileLock lock(dir_ + "/.lock");
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void Cache::store(const std::string& key, const std::string& text) const {
    if (!enabled()) return;
    FileLock lock(dir_ + "/.lock");
    std::string tmp = path_for(key) + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::cache_error, "cannot write cache file " + tmp);
        out << text;
    }
    fs::rename(tmp, path_for(key));
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("CMCYCLES_CACHE_DIR")) return env;
    if (const char* home = std::getenv("HOME")) return std::string(home) + "/.cache/cmcycles";
    return ".cmcycles-cache";
}

}  // namespace cmc
