#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "presslab/core.hpp"

namespace presslab {

struct ToralGenerator {
    Mat2 matrix;
    std::pair<std::complex<double>, std::complex<double>> eigenvalues;
    bool is_diagonal = false;

    static ToralGenerator from(const Mat2& m);
};

Point toral_apply(const Mat2& g, const Point& p);
// Roots of the characteristic polynomial ordered by modulus.
std::pair<std::complex<double>, std::complex<double>> toral_eigen(const Mat2& g);

struct BallBox {
    double hx = 0.0;
    double hy = 0.0;
};

enum class BoxKind { Trajectory, Condensed, ExhaustiveInner, ExhaustiveOuter };

// Exact box geometry for systems whose generators are all diagonal.
// `word` is used by Trajectory only, `n` by the other kinds.
BallBox analytic_ball_box(const System& sys, BoxKind kind, const Word& word, int n, double eps);

struct ClosedForm {
    double h_plus = 0.0;
    double h_amalgamated = 0.0;
    double h_condensed = 0.0;
};
ClosedForm closed_form_entropies(long alpha, long beta, long gamma, long delta);

enum class BerendConclusion { OnlyTorusInvariant, Inconclusive };

struct BerendVerdict {
    bool commutative = false;
    bool all_eigen_moduli_gt1 = false;
    bool has_irreducible_generator_with_distinct_moduli = false;
    bool exhaustive_lt_every_single_entropy = false;
    BerendConclusion conclusion = BerendConclusion::Inconclusive;
};

bool char_poly_irreducible(const Mat2& g);
BerendVerdict berend_check(const std::vector<Mat2>& gens, double h_plus_estimate,
                           const std::vector<double>& single_entropies);

// Topological entropy of one toral endomorphism: sum of log|lambda| over |lambda| > 1.
double toral_entropy(const Mat2& g, int dim = 2);

// Each generator is given by its branch slopes, left to right.
System expanding_interval_system(const std::vector<std::vector<double>>& slopes);

// "toral:...", "diag:a,b|c,d", "circle:k1|k2", "cantor:s1,s2|...".
System parse_system(const std::string& spec);

// Smooth random multi-potential: a constant plus two Fourier modes per component, sup-norm <= 2 * amplitude.
MultiPotential random_potential(int m, int dim, std::uint64_t seed, double amplitude);

// "zero", "coordinate" (phi_j(p) = p.x), "constants:c1,...,cm", "random:seed,amplitude".
MultiPotential parse_potential(const std::string& spec, const System& sys);

struct ZooEntry {
    std::string name;
    System system;
};
std::vector<ZooEntry> system_zoo();

}  // namespace presslab
