#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sublin::cli {

using nlohmann::json;

namespace {

bool parse_plain(std::string_view s, double& v)
{
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    return ec == std::errc() && p == end;
}

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

bool parse_symbolic(const std::string& raw, double& value)
{
    std::string s = trim(raw);
    if (parse_plain(s, value)) return true;
    const auto at = s.find("pi");
    if (at == std::string::npos) return false;

    std::string head = s.substr(0, at);
    std::string tail = s.substr(at + 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    double factor = 1.0;
    if (head == "-")
        factor = -1.0;
    else if (!head.empty() && head != "+" && !parse_plain(head, factor))
        return false;
    double divisor = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/' || !parse_plain(std::string_view(tail).substr(1), divisor) || divisor == 0.0)
            return false;
    }
    value = factor * std::numbers::pi / divisor;
    return true;
}

Config::Config(std::string text, std::string source) : text_(std::move(text)), source_(std::move(source))
{
    try {
        root_ = json::parse(text_);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text_.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i < upto; ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        const auto colon = what.find("syntax error");
        throw ConfigError(source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                          (colon == std::string::npos ? what : what.substr(colon)));
    }
    if (!root_.is_object()) throw ConfigError(source_ + ":1: configuration must be a JSON object");
}

int Config::line_of(const std::string& key) const
{
    const auto at = text_.find("\"" + key + "\"");
    if (at == std::string::npos) return 1;
    int line = 1;
    for (std::size_t i = 0; i < at; ++i)
        if (text_[i] == '\n') ++line;
    return line;
}

void Config::fail(const std::string& key, const std::string& message) const
{
    throw ConfigError(source_ + ":" + std::to_string(line_of(key)) + ": " + message);
}

std::string Config::command() const
{
    if (!root_.contains("command")) fail("command", "missing required key \"command\"");
    const auto& c = root_["command"];
    if (!c.is_string()) fail("command", "\"command\" must be a string");
    static const char* known[] = {"eig", "solve", "branch", "radial-check", "deadcore", "nearzero", "validate"};
    const std::string s = c.get<std::string>();
    for (const char* k : known)
        if (s == k) return s;
    fail("command", "unknown command \"" + s + "\"");
}

std::uint64_t Config::seed() const
{
    if (!root_.contains("seed")) return 1;
    const auto& s = root_["seed"];
    if (!s.is_number_integer() || s.get<long long>() < 0) fail("seed", "\"seed\" must be a nonnegative integer");
    return s.get<std::uint64_t>();
}

std::string Config::output() const { return string(root_, "output", ""); }

const json& Config::section(const char* key) const
{
    static const json empty = json::object();
    if (!root_.contains(key)) return empty;
    const auto& s = root_[key];
    if (!s.is_object()) fail(key, std::string("\"") + key + "\" must be an object");
    return s;
}

double Config::as_number(const json& v, const std::string& key) const
{
    if (v.is_number()) return v.get<double>();
    double x = 0.0;
    if (v.is_string() && parse_symbolic(v.get<std::string>(), x)) return x;
    fail(key, "\"" + key + "\" must be a number or a multiple of \"pi\"");
}

double Config::number(const json& obj, const char* key, double fallback) const
{
    return obj.contains(key) ? as_number(obj[key], key) : fallback;
}

double Config::required_number(const json& obj, const char* key) const
{
    if (!obj.contains(key)) fail(key, std::string("missing required key \"") + key + "\"");
    return as_number(obj[key], key);
}

std::string Config::string(const json& obj, const char* key, const std::string& fallback) const
{
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(key, std::string("\"") + key + "\" must be a string");
    return obj[key].get<std::string>();
}

std::vector<double> Config::numbers(const json& obj, const char* key, std::vector<double> fallback) const
{
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array()) fail(key, std::string("\"") + key + "\" must be an array");
    std::vector<double> out;
    for (const auto& v : obj[key]) out.push_back(as_number(v, key));
    return out;
}

GridSpec Config::grid(std::size_t nodesOverride) const
{
    if (!root_.contains("grid")) fail("grid", "missing required key \"grid\"");
    const json& g = section("grid");
    const std::string kind = string(g, "kind", "interval");
    std::size_t nodes = nodesOverride;
    if (nodes == 0) {
        const double n = required_number(g, "nodes");
        if (!(n >= 16.0) || n != std::floor(n)) fail("nodes", "\"nodes\" must be an integer of at least 16");
        nodes = static_cast<std::size_t>(n);
    }
    GridSpec spec;
    if (kind == "interval")
        spec = GridSpec::interval(required_number(g, "x0"), required_number(g, "x1"), nodes);
    else if (kind == "ball") {
        const double N = number(g, "dimension", 1.0);
        if (N != std::floor(N)) fail("dimension", "\"dimension\" must be an integer");
        spec = GridSpec::ball(required_number(g, "radius"), static_cast<int>(N), nodes);
    } else
        fail("kind", "grid \"kind\" must be \"interval\" or \"ball\"");
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        fail("grid", std::string("invalid grid: ") + e.what());
    }
    return spec;
}

Weight Config::weight(const GridPtr& grid) const
{
    if (!root_.contains("weight")) fail("weight", "missing required key \"weight\"");
    const json& w = section("weight");
    if (w.contains("samples")) {
        const std::string path = string(w, "samples", "");
        std::ifstream in(path);
        if (!in) fail("samples", "cannot open weight samples \"" + path + "\"");
        try {
            return make_weight(grid, WeightDefinition{Sampled{read_field_csv(in, grid)}});
        } catch (const std::exception& e) {
            fail("samples", path + ": " + e.what());
        }
    }
    CorpusCase c;
    c.name = string(w, "case", "");
    if (c.name.empty()) fail("weight", "weight needs \"case\" or \"samples\"");
    for (const auto& [k, v] : w.items())
        if (k != "case") c.parameters[k] = as_number(v, k);
    try {
        return make_weight(grid, c);
    } catch (const std::invalid_argument& e) {
        fail("case", std::string("invalid weight: ") + e.what());
    }
}

SolveParams Config::solver() const
{
    const json& s = section("solver");
    SolveParams p;
    const double it = number(s, "maxIterations", p.maxIterations);
    if (!(it >= 1.0) || it != std::floor(it)) fail("maxIterations", "\"maxIterations\" must be a positive integer");
    p.maxIterations = static_cast<int>(it);
    p.tolerance = number(s, "tolerance", p.tolerance);
    if (!(p.tolerance > 0.0)) fail("tolerance", "\"tolerance\" must be positive");
    p.positivityFloor = number(s, "positivityFloor", p.positivityFloor);
    return p;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ":0: cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return Config(ss.str(), path);
}

}  // namespace sublin::cli
