#include "crossflow/json_io.hpp"

#include <fstream>
#include <sstream>

#include "crossflow/errors.hpp"

namespace crossflow {

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    const std::size_t limit = std::min(byte, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = std::move(buf).str();
    try {
        return json::parse(content);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ":" + std::to_string(line_of_byte(content, e.byte)) +
                          ": " + e.what());
    }
}

json parse_json_line(const std::string& line, const std::filesystem::path& path,
                     std::size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ":" + std::to_string(lineno) +
                      ": invalid record: " + e.what());
    }
}

StrictObject::StrictObject(const json& obj, std::string context)
    : obj_(obj), context_(std::move(context)) {
    if (!obj_.is_object()) {
        throw ConfigError(context_ + ": expected a JSON object");
    }
}

bool StrictObject::has(const std::string& key) const { return obj_.contains(key); }

const json& StrictObject::require(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) {
        throw ConfigError(context_ + ": missing required key '" + key + "'");
    }
    consumed_.insert(key);
    return *it;
}

const json* StrictObject::get(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    consumed_.insert(key);
    return &*it;
}

void StrictObject::reject_unknown_keys() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
        if (!consumed_.contains(it.key())) {
            throw ConfigError(context_ + ": unknown key '" + it.key() + "'");
        }
    }
}

std::string as_string(const json& j, const std::string& context) {
    if (!j.is_string()) throw ConfigError(context + ": expected a string");
    return j.get<std::string>();
}

double as_number(const json& j, const std::string& context) {
    if (!j.is_number()) throw ConfigError(context + ": expected a number");
    return j.get<double>();
}

long as_integer(const json& j, const std::string& context) {
    if (!j.is_number_integer()) throw ConfigError(context + ": expected an integer");
    return j.get<long>();
}

bool as_boolean(const json& j, const std::string& context) {
    if (!j.is_boolean()) throw ConfigError(context + ": expected a boolean");
    return j.get<bool>();
}

}  // namespace crossflow
