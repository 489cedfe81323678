#include "ksns/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ksns {

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
} // namespace

Config Config::parse_string(const std::string& text) {
    Config c;
    c.raw_ = text;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: malformed line: " + line);
        c.kv_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

std::string Config::get(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double Config::get(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : std::stod(it->second);
}

int Config::get(const std::string& key, int dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : std::stoi(it->second);
}

bool Config::get(const std::string& key, bool dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    return it->second == "1" || it->second == "true" || it->second == "yes";
}

uint64_t Config::content_hash() const {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : raw_) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace ksns
