#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace ksns {

/// Flat `key = value` configuration with '#' comments; dotted keys act as
/// sections (grid.n, sim.dt, ...). Unknown keys are kept so configs round-trip
/// into manifests unchanged.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& dflt) const;
    double get(const std::string& key, double dflt) const;
    int get(const std::string& key, int dflt) const;
    bool get(const std::string& key, bool dflt) const;
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    const std::map<std::string, std::string>& entries() const { return kv_; }
    const std::string& raw() const { return raw_; }

    /// FNV-1a hash of the raw config bytes; deterministic for identical bytes.
    uint64_t content_hash() const;

private:
    std::map<std::string, std::string> kv_;
    std::string raw_;
};

} // namespace ksns
