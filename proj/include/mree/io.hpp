#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mree/config.hpp"
#include "mree/economy.hpp"
#include "mree/maximin.hpp"

namespace mree {

using Json = nlohmann::ordered_json;

// Malformed input. Syntax errors carry a 1-based line and column; structural
// errors carry the JSON path of the offending field.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &what, std::string path, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(what), path_(std::move(path)), line_(line), column_(column) {}
    const std::string &path() const { return path_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::string path_;
    std::size_t line_, column_;
};

std::string read_file(const std::string &path);
Json parse_json_text(const std::string &text);

// Builds the Economy with every shared utility expanded per state. With
// `validate` set, a failing validation throws EconomyError.
Economy economy_from_json(const Json &doc, bool validate = true);
Economy parse_economy_text(const std::string &text, bool validate = true);
Economy parse_economy(const std::string &path, bool validate = true);

Json economy_to_json(const Economy &e);
std::string serialize_economy(const Economy &e);

// {"schema_version": 1, "allocation": {agent: {state: [...]}}, "prices": {state: [...]}}
inline constexpr int solution_schema_version = 1;
struct Solution {
    Allocation allocation;
    PriceSystem prices;
};
Json solution_to_json(const Economy &e, const Allocation &f, const PriceSystem &pi);
Solution solution_from_json(const Economy &e, const Json &doc);
Solution parse_solution(const Economy &e, const std::string &path);

// Non-finite values become the strings "inf", "-inf" and "nan".
Json number(double v);
Json vector_json(std::span<const double> v);
Json config_json(const Config &cfg);

} // namespace mree
