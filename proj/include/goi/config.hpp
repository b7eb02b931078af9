#ifndef GOI_CONFIG_HPP
#define GOI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "goi/errors.hpp"

namespace goi {

// Flat key = value text. Sections are spelled with dots in the key
// (quad.tail_tol = 1e-4); '#' starts a comment; blank lines are ignored.
// Every key a run does not consume is rejected before any computation.
class Config {
  public:
    static Config parse(const std::string& text);

    bool has(const std::string& key) const;
    std::string str(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    // comma-separated numbers
    std::vector<double> numbers(const std::string& key) const;
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

    // throws errc::config naming every key never read through the getters
    void reject_unknown() const;

    // FNV-1a over the sorted canonical "key=value" lines; stamped into every
    // artifact so outputs are traceable to their inputs
    std::uint64_t hash() const;
    std::string hash_hex() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> used_;
};

} // namespace goi

#endif
