#include "crossflow/questions.hpp"

#include <fstream>
#include <set>

#include "crossflow/errors.hpp"
#include "crossflow/json_io.hpp"

namespace crossflow {

std::vector<QuestionItem> load_questions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open question set: " + path.string());
    }

    std::vector<QuestionItem> items;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json record = parse_json_line(line, path, lineno);
        const std::string where = path.string() + ":" + std::to_string(lineno);

        StrictObject obj(record, where);
        QuestionItem item;
        item.question_id = as_string(obj.require("question_id"), where + ".question_id");
        item.domain = as_string(obj.require("domain"), where + ".domain");
        item.question = as_string(obj.require("question"), where + ".question");
        item.expected_answer = as_string(obj.require("expected_answer"), where + ".expected_answer");
        obj.reject_unknown_keys();

        if (item.question_id.empty()) {
            throw ConfigError(where + ": question_id must be non-empty");
        }
        if (item.expected_answer.empty()) {
            throw ConfigError(where + ": expected_answer must be non-empty");
        }
        if (!seen.insert(item.question_id).second) {
            throw ConfigError(where + ": duplicate question_id '" + item.question_id + "'");
        }
        items.push_back(std::move(item));
    }
    return items;
}

}  // namespace crossflow
