#include "goi/config.hpp"

#include <charconv>
#include <sstream>

namespace goi {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail(errc::config, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

} // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(errc::config, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) fail(errc::config, "line " + std::to_string(lineno) + ": empty key");
        if (cfg.kv_.count(key))
            fail(errc::config, "duplicate key '" + key + "'");
        cfg.kv_.emplace(std::move(key), std::move(val));
    }
    return cfg;
}

bool Config::has(const std::string& key) const {
    if (auto it = kv_.find(key); it != kv_.end()) {
        used_.insert(key);
        return true;
    }
    return false;
}

std::string Config::str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) fail(errc::config, "missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
}

double Config::num(const std::string& key) const { return parse_number(key, str(key)); }

double Config::num(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
}

int Config::integer(const std::string& key) const {
    double d = num(key);
    int i = (int)d;
    if ((double)i != d) fail(errc::config, "key '" + key + "': expected an integer");
    return i;
}

int Config::integer(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool Config::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(errc::config, "key '" + key + "': expected true/false");
}

std::vector<double> Config::numbers(const std::string& key) const {
    std::string v = str(key);
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        std::size_t comma = v.find(',', pos);
        std::string item = trim(v.substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (!item.empty()) out.push_back(parse_number(key, item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) fail(errc::config, "key '" + key + "': expected a number list");
    return out;
}

std::vector<double> Config::numbers(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
}

void Config::reject_unknown() const {
    std::string bad;
    for (const auto& [k, v] : kv_)
        if (!used_.count(k)) bad += (bad.empty() ? "" : ", ") + k;
    if (!bad.empty()) fail(errc::config, "unknown keys: " + bad);
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : kv_) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    return h;
}

std::string Config::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)hash());
    return buf;
}

} // namespace goi
