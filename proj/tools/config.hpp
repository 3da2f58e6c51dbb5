#pragma once

#include "sublin/grid.hpp"
#include "sublin/solve.hpp"
#include "sublin/weights.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sublin::cli {

/// Malformed configuration. The message starts with `<source>:<line>:`.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed configuration text that can point back at source lines.
class Config {
public:
    /// Throws ConfigError on JSON syntax errors or a non-object root.
    Config(std::string text, std::string source);

    const nlohmann::json& root() const { return root_; }
    const std::string& source() const { return source_; }

    /// Line of the first occurrence of "key" in the text, 1 when absent.
    int line_of(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

    std::string command() const;
    std::uint64_t seed() const;
    std::string output() const;  // empty when the key is absent

    const nlohmann::json& section(const char* key) const;  // empty object when absent
    double number(const nlohmann::json& obj, const char* key, double fallback) const;
    double required_number(const nlohmann::json& obj, const char* key) const;
    std::string string(const nlohmann::json& obj, const char* key, const std::string& fallback) const;
    std::vector<double> numbers(const nlohmann::json& obj, const char* key, std::vector<double> fallback) const;

    /// `grid`: interval (x0, x1) or ball (radius, dimension), nodes. The
    /// nodes override replaces the configured count when nonzero.
    GridSpec grid(std::size_t nodesOverride) const;
    /// `weight`: {"case": name, params...} or {"samples": path}.
    Weight weight(const GridPtr& grid) const;
    SolveParams solver() const;

private:
    double as_number(const nlohmann::json& v, const std::string& key) const;

    std::string text_;
    std::string source_;
    nlohmann::json root_;
};

Config load_config(const std::string& path);

/// Parses a number or a symbolic multiple of π: "pi", "-pi", "2pi",
/// "2*pi", "pi/6", "3*pi/4". Returns false when the text is neither.
bool parse_symbolic(const std::string& text, double& value);

}  // namespace sublin::cli
