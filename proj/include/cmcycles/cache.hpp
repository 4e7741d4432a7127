#pragma once

#include <optional>
#include <string>

namespace cmc {

// On-disk JSON cache: one file per key, guarded by an advisory lock so
// concurrent CLI invocations cannot interleave writes.
class Cache {
public:
    explicit Cache(std::string dir);  // empty dir disables the cache
    bool enabled() const { return !dir_.empty(); }
    std::optional<std::string> load(const std::string& key) const;
    void store(const std::string& key, const std::string& text) const;
    std::string path_for(const std::string& key) const;

private:
    std::string dir_;
};

// Default cache directory: $CMCYCLES_CACHE_DIR, else ~/.cache/cmcycles.
std::string default_cache_dir();

}  // namespace cmc
