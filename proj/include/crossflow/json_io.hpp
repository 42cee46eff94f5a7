#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

namespace crossflow {

using json = nlohmann::json;

/// 1-based line number of a byte offset within `text`.
std::size_t line_of_byte(std::string_view text, std::size_t byte);

/// Reads and parses a whole-file JSON document. Throws IoError when the file
/// cannot be read and ConfigError with "<path>:<line>" context on syntax errors.
json parse_json_file(const std::filesystem::path& path);

/// Parses one line of a JSON-lines file; errors carry "<path>:<line>".
json parse_json_line(const std::string& line, const std::filesystem::path& path,
                     std::size_t lineno);

/// Read-only view over a JSON object that tracks which keys were consumed and
/// rejects unknown ones, so typos in config and fixture files fail closed.
class StrictObject {
public:
    StrictObject(const json& obj, std::string context);

    bool has(const std::string& key) const;

    /// Fetches a required key, throwing ConfigError when absent.
    const json& require(const std::string& key);

    /// Fetches an optional key; returns nullptr when absent.
    const json* get(const std::string& key);

    /// Throws ConfigError naming the first key that was never consumed.
    void reject_unknown_keys() const;

    const std::string& context() const { return context_; }

private:
    const json& obj_;
    std::string context_;
    std::set<std::string> consumed_;
};

/// Narrowing helpers with contextual error messages.
std::string as_string(const json& j, const std::string& context);
double as_number(const json& j, const std::string& context);
long as_integer(const json& j, const std::string& context);
bool as_boolean(const json& j, const std::string& context);

}  // namespace crossflow
