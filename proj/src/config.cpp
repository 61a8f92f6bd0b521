#include "presslab/config.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <sstream>

#include "presslab/pressure.hpp"
#include "presslab/util.hpp"

namespace presslab {

ConfigError::ConfigError(int line, int column, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

std::vector<std::string> split_kind_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto tok : split(s, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        const bool number = std::isdigit(static_cast<unsigned char>(tok[0]));
        if (number && !out.empty() && out.back().rfind("trajectory:", 0) == 0)
            out.back() += "," + tok;
        else
            out.push_back(tok);
    }
    return out;
}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

template <class T, class F>
std::vector<T> parse_list(const std::string& v, F conv) {
    std::vector<T> out;
    for (const auto& t : split(v, ',')) {
        auto s = trim(t);
        if (!s.empty()) out.push_back(conv(s));
    }
    if (out.empty()) throw std::invalid_argument("list must not be empty");
    return out;
}

std::vector<int> int_list(const std::string& v) {
    return parse_list<int>(v, [](const std::string& s) { return static_cast<int>(parse_long(s)); });
}
std::vector<double> double_list(const std::vector<std::string>::value_type& v) {
    return parse_list<double>(v, [](const std::string& s) { return parse_double(s); });
}
std::vector<std::string> word_list(const std::string& v) {
    return parse_list<std::string>(v, [](const std::string& s) { return s; });
}

std::string nonempty(const std::string& v) {
    if (v.empty()) throw std::invalid_argument("value must not be empty");
    return v;
}

const std::map<std::string, std::map<std::string, Setter>>& table() {
    static const std::map<std::string, std::map<std::string, Setter>> t{
        {"run",
         {{"system", [](RunConfig& c, const std::string& v) { c.system = nonempty(v); }},
          {"potential", [](RunConfig& c, const std::string& v) { c.potential = nonempty(v); }},
          {"kinds",
           [](RunConfig& c, const std::string& v) {
               auto k = split_kind_list(v);
               if (k.empty()) throw std::invalid_argument("kind list must not be empty");
               if (k.size() == 1 && k[0] == "all") k.clear();
               for (const auto& s : k) PressureKind::parse(s);
               c.kinds = k.empty() ? std::vector<std::string>{} : k;
           }},
          {"n", [](RunConfig& c, const std::string& v) { c.ns = int_list(v); }},
          {"eps", [](RunConfig& c, const std::string& v) { c.eps = double_list(v); }},
          {"pool_random", [](RunConfig& c, const std::string& v) { c.pool_random = static_cast<int>(parse_long(v)); }},
          {"seed", [](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(parse_long(v)); }},
          {"method",
           [](RunConfig& c, const std::string& v) {
               if (v != "auto" && v != "analytic" && v != "generic")
                   throw std::invalid_argument("method must be auto, analytic or generic");
               c.method = v;
           }},
          {"output", [](RunConfig& c, const std::string& v) { c.output = v; }},
          {"format",
           [](RunConfig& c, const std::string& v) {
               if (v != "csv" && v != "json") throw std::invalid_argument("format must be csv or json");
               c.format = v;
           }},
          {"tolerance", [](RunConfig& c, const std::string& v) { c.tolerance = parse_double(v); }},
          {"threads", [](RunConfig& c, const std::string& v) { c.threads = static_cast<int>(parse_long(v)); }}}},
        {"verify",
         {{"checks", [](RunConfig& c, const std::string& v) { c.checks = word_list(v); }},
          {"shift_word", [](RunConfig& c, const std::string& v) { c.shift_word = nonempty(v); }},
          {"lipschitz_pairs",
           [](RunConfig& c, const std::string& v) { c.lipschitz_pairs = static_cast<int>(parse_long(v)); }},
          {"lipschitz_amplitude", [](RunConfig& c, const std::string& v) { c.lipschitz_amplitude = parse_double(v); }},
          {"lipschitz_n", [](RunConfig& c, const std::string& v) { c.lipschitz_n = static_cast<int>(parse_long(v)); }},
          {"lipschitz_eps", [](RunConfig& c, const std::string& v) { c.lipschitz_eps = parse_double(v); }},
          {"compare_systems",
           [](RunConfig& c, const std::string& v) {
               c.compare_systems.clear();
               for (const auto& s : split(v, ';'))
                   if (!trim(s).empty()) c.compare_systems.push_back(trim(s));
               if (c.compare_systems.empty()) throw std::invalid_argument("list must not be empty");
           }},
          {"separation_gap", [](RunConfig& c, const std::string& v) { c.separation_gap = parse_double(v); }}}},
        {"dimension",
         {{"bracket",
           [](RunConfig& c, const std::string& v) {
               auto b = double_list(v);
               if (b.size() != 2 || !(b[0] < b[1])) throw std::invalid_argument("bracket is lo,hi with lo < hi");
               c.bracket_lo = b[0];
               c.bracket_hi = b[1];
           }},
          {"n", [](RunConfig& c, const std::string& v) { c.dimension_n = static_cast<int>(parse_long(v)); }},
          {"eps", [](RunConfig& c, const std::string& v) { c.dimension_eps = parse_double(v); }}}},
        {"localent",
         {{"measure", [](RunConfig& c, const std::string& v) { c.measure = nonempty(v); }},
          {"cells", [](RunConfig& c, const std::string& v) { c.cells = parse_long(v); }},
          {"points", [](RunConfig& c, const std::string& v) { c.points = static_cast<int>(parse_long(v)); }},
          {"n", [](RunConfig& c, const std::string& v) { c.local_ns = int_list(v); }},
          {"eps", [](RunConfig& c, const std::string& v) { c.local_eps = parse_double(v); }},
          {"tolerance", [](RunConfig& c, const std::string& v) { c.marginal_tolerance = parse_double(v); }}}},
        {"sweep",
         {{"n", [](RunConfig& c, const std::string& v) { c.ns = int_list(v); }},
          {"eps", [](RunConfig& c, const std::string& v) { c.eps = double_list(v); }}}}};
    return t;
}

int first_non_space(const std::string& s) {
    std::size_t i = s.find_first_not_of(" \t");
    return i == std::string::npos ? 1 : static_cast<int>(i) + 1;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw;
    std::string section = "run";
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        if (trim(line).empty()) continue;
        const int col = first_non_space(raw);
        std::string t = trim(line);
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(lineno, col, "unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!table().count(section)) throw ConfigError(lineno, col + 1, "unknown section '" + section + "'");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, col, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        const auto& keys = table().at(section);
        auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(lineno, col, "unknown key '" + key + "' in [" + section + "]");
        const int vcol = static_cast<int>(line.find_first_not_of(" \t", eq + 1) == std::string::npos
                                              ? eq + 2
                                              : line.find_first_not_of(" \t", eq + 1) + 1);
        try {
            it->second(c, value);
        } catch (const std::exception& e) {
            throw ConfigError(lineno, vcol, key + ": " + e.what());
        }
    }
    return c;
}

}  // namespace presslab
