#include "subfrac/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subfrac {

namespace {

std::uint64_t fnv1a_bytes(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string cache_key(const std::string& op, const std::string& canonical_params,
                      const std::string& config_digest) {
    std::uint64_t h = 1469598103934665603ULL;
    h = fnv1a_bytes(h, op);
    h = fnv1a_bytes(h, "\x1f");
    h = fnv1a_bytes(h, canonical_params);
    h = fnv1a_bytes(h, "\x1f");
    h = fnv1a_bytes(h, config_digest);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ResultCache::ResultCache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResultCache::lookup(const std::string& key) const {
    if (dir_.empty()) return std::nullopt;
    std::filesystem::path p = std::filesystem::path(dir_) / (key + ".json");
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void ResultCache::store(const std::string& key, const std::string& payload) const {
    if (dir_.empty()) return;
    std::filesystem::path dir(dir_);
    std::filesystem::path tmp = dir / (key + ".tmp");
    std::filesystem::path dst = dir / (key + ".json");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
        out << payload;
        out.flush();
        if (!out) throw std::runtime_error("cache: short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, dst);
}

}  // namespace subfrac
