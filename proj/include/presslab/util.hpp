#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace presslab {

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);
long parse_long(const std::string& s);
double parse_double(const std::string& s);

// log(sum exp(v)); -inf for an empty input.
double log_sum_exp(const std::vector<double>& v);
// log(exp(a) + exp(b))
double log_add(double a, double b);
double log_binomial(int n, int k);

// Honours PRESSLAB_THREADS when n <= 0; no-op without OpenMP.
void set_thread_count(int n);
int thread_count();

// Deterministic 64-bit mixing used to derive per-purpose seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// Shortest round-trip text for a double, stable across runs.
std::string format_double(double v);

}  // namespace presslab
