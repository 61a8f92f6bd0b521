#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace presslab {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line, int column, const std::string& msg);
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

// Flat key = value text. Keys before any [section] belong to [run].
struct RunConfig {
    // [run]
    std::string system = "diag:2,3|3,2";
    std::string potential = "zero";
    std::vector<std::string> kinds;  // empty means the six set kinds
    std::vector<int> ns{4, 8, 12};
    std::vector<double> eps{0.25};
    int pool_random = 32;
    std::uint64_t seed = 1;
    std::string method = "auto";  // auto | analytic | generic
    std::string output;
    std::string format = "csv";
    double tolerance = 1e-9;
    int threads = 0;

    // [verify]
    std::vector<std::string> checks{"chain", "shift", "lipschitz", "lift"};
    std::string shift_word = "periodic:1,2";
    int lipschitz_pairs = 20;
    double lipschitz_amplitude = 0.1;
    int lipschitz_n = 2;
    double lipschitz_eps = 0.25;
    std::vector<std::string> compare_systems;
    double separation_gap = 0.15;

    // [dimension]
    double bracket_lo = 0.0;
    double bracket_hi = 1.0;
    int dimension_n = 6;
    double dimension_eps = 0.125;

    // [localent]
    std::string measure = "lebesgue";
    long cells = 0;  // 0: 2^16 on the circle or interval, 2^14 on the 2-torus
    int points = 50;
    std::vector<int> local_ns{4, 6, 8, 10};
    double local_eps = 0.25;
    double marginal_tolerance = 0.15;
};

RunConfig parse_config(const std::string& text);

// Kind lists may contain trajectory kinds whose words use commas: "amalgamated, trajectory:periodic:1,2".
std::vector<std::string> split_kind_list(const std::string& s);

}  // namespace presslab
