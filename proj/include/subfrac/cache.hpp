// Content-addressed result cache.
//
// A cache entry is keyed by the digest of (operation name, canonicalized
// parameters, configuration digest).  The stored payload is the verbatim
// report text, so a cache hit replays the earlier result bitwise.  Entry
// age lives only in file metadata (mtime), never in the payload.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace subfrac {

// 16-hex-digit key: FNV-1a over the three components with separators.
std::string cache_key(const std::string& op, const std::string& canonical_params,
                      const std::string& config_digest);

class ResultCache {
  public:
    // Empty dir disables the cache (lookup misses, store is a no-op).
    explicit ResultCache(std::string dir);

    bool enabled() const { return !dir_.empty(); }

    // Returns the stored payload verbatim, or nullopt on miss.
    std::optional<std::string> lookup(const std::string& key) const;

    // Atomic store: write to a temp file in the same directory, then rename.
    void store(const std::string& key, const std::string& payload) const;

  private:
    std::string dir_;
};

}  // namespace subfrac
