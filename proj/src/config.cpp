#include "gkp/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "gkp/errors.hpp"

namespace gkp {
namespace {

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open config file " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), file.string());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& context) {
    KeyValueConfig cfg;
    cfg.context_ = context;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(context + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(context + ":" + std::to_string(line_no) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError(context + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
        cfg.order_.push_back(key);
    }
    return cfg;
}

std::string KeyValueConfig::raw(const std::string& key) {
    consumed_[key] = true;
    return values_.at(key);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return raw(key);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    try {
        return std::stoi(raw(key));
    } catch (const std::exception&) {
        throw ConfigError(context_ + ": key '" + key + "' is not an integer: " + values_.at(key));
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    try {
        return std::stod(raw(key));
    } catch (const std::exception&) {
        throw ConfigError(context_ + ": key '" + key + "' is not a number: " + values_.at(key));
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    std::string v = raw(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(context_ + ": key '" + key + "' is not a boolean: " + v);
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    std::vector<int> out;
    std::stringstream ss(raw(key));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ConfigError(context_ + ": key '" + key + "' has a non-integer entry: " + tok);
        }
    }
    return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    std::vector<double> fallback) {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError(context_ + ": key '" + key + "' has a non-numeric entry: " + tok);
        }
    }
    return out;
}

void KeyValueConfig::finish() const {
    std::string unknown;
    for (const std::string& key : order_) {
        auto it = consumed_.find(key);
        if (it == consumed_.end() || !it->second) {
            if (!unknown.empty()) unknown += ", ";
            unknown += key;
        }
    }
    if (!unknown.empty()) throw ConfigError(context_ + ": unknown keys: " + unknown);
}

std::string KeyValueConfig::echo() const {
    std::string out;
    for (const std::string& key : order_) out += key + " = " + values_.at(key) + "\n";
    return out;
}

}  // namespace gkp
