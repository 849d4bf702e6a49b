#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gkp {

// Flat "key = value" configuration text with '#' comments. Every read marks
// its key as consumed; finish() rejects unknown keys so typos fail loudly.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::filesystem::path& file);
    static KeyValueConfig parse_string(const std::string& text, const std::string& context = "<config>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback);
    int get_int(const std::string& key, int fallback);
    double get_double(const std::string& key, double fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback);
    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback);

    // Throws ConfigError naming every key that was never consumed.
    void finish() const;

    // Echo of the parsed keys in file order (for config.echo reports).
    std::string echo() const;

private:
    std::string context_;
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    mutable std::map<std::string, bool> consumed_;

    std::string raw(const std::string& key);
};

}  // namespace gkp
