#ifndef ROUGHPATH_CONFIG_HPP
#define ROUGHPATH_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace rp {

/// Flat "key = value" configuration. Blank lines and lines starting with '#' are ignored.
class Config {
public:
    Config() = default;

    static Config parse(std::istream& in);
    static Config load(const std::string& filename);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma separated numbers.
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

    /// Throws std::invalid_argument naming the first key outside the given prefixes.
    void require_known(const std::vector<std::string>& prefixes) const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace rp

#endif  // ROUGHPATH_CONFIG_HPP
