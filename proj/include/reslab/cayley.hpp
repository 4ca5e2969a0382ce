#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace reslab {

/// Cayley graph of Z/N_1 x ... x Z/N_m for a symmetric generating multiset.
/// Every s in S contributes one edge x -> x + s, so the graph is |S|-regular.
class CayleyGraph {
public:
    /// Throws ValidationError when S is not symmetric, contains 0 (unless
    /// allow_loops), or does not generate the group.
    CayleyGraph(std::vector<int> moduli, std::vector<std::vector<int>> generators, bool allow_loops = false);

    /// Z/N with S = {+1, -1}.
    static CayleyGraph cycle(int N);

    const std::vector<int>& moduli() const { return moduli_; }
    const std::vector<std::vector<int>>& generators() const { return gens_; }
    int degree() const { return static_cast<int>(gens_.size()); }
    std::int64_t order() const { return order_; }

    /// Mixed-radix index of v (first coordinate fastest).
    std::int64_t index(const std::vector<int>& v) const;
    std::vector<int> element(std::int64_t i) const;
    std::int64_t neighbor(std::int64_t i, int generator) const;

private:
    std::vector<int> moduli_;
    std::vector<std::vector<int>> gens_;
    std::int64_t order_ = 1;
};

/// lambda_alpha = (1/k) sum_s (1 - cos(2 pi <alpha, s/N>)) over all
/// characters, sorted ascending. Order capped at 1e6.
std::vector<double> laplacian_eigenvalues(const CayleyGraph& g);
/// Smallest nonzero eigenvalue: the second entry of the sorted spectrum.
double spectral_gap(const CayleyGraph& g);

/// I - A/k as a dense matrix, for cross-checks on small graphs.
Eigen::MatrixXd dense_laplacian(const CayleyGraph& g);

struct CheegerResult {
    double h = 0.0;
    bool exact = true;            ///< exhaustive over all subsets
    std::uint64_t best_set = 0;   ///< bitmask of a minimizer (exhaustive mode)
    std::int64_t subsets = 0;     ///< subsets examined
};

/// |boundary A| counts edges leaving A with multiplicity.
std::int64_t boundary_size(const CayleyGraph& g, const std::vector<std::int64_t>& A);

/// Exhaustive for order <= exhaustive_cap (at most 30). Larger graphs get an
/// upper bound from word-metric balls and seeded random subsets, with
/// exact = false.
CheegerResult cheeger_constant(const CayleyGraph& g, int exhaustive_cap = 24, std::uint64_t seed = 1,
                               int samples = 4096);

struct SandwichReport {
    double lambda1 = 0.0;
    double h = 0.0;
    bool h_exact = true;
    double lower = 0.0;        ///< k lambda1 / 2
    double upper = 0.0;        ///< k sqrt(lambda1 (1 - lambda1)), lambda1 clamped to [0, 1]
    bool upper_checked = false;  ///< false when lambda1 >= 1: the printed bound degenerates
    bool lower_ok = false;
    bool upper_ok = false;     ///< true when unchecked
    double upper_alt = 0.0;    ///< k sqrt(lambda1 (2 - lambda1)), reported only
    double lower_slack = 0.0;  ///< h - lower
    double upper_slack = 0.0;  ///< upper - h

    bool ok() const { return lower_ok && upper_ok; }
};

SandwichReport sandwich_check(const CayleyGraph& g, int exhaustive_cap = 24);

struct GapDecayRow {
    int N = 0;
    double lambda1 = 0.0;
    double scaled = 0.0;      ///< lambda1 N^2
    double h = 0.0;           ///< exact or upper bound
    bool h_exact = false;
};

struct GapDecayTable {
    std::vector<GapDecayRow> rows;
    double limit = 0.0;       ///< lambda1 N^2 at the largest N
    double relative_spread = 0.0;  ///< (max - min) / max of lambda1 N^2
    double fitted_power = 0.0;     ///< slope of log lambda1 against log N
};

/// One growing modulus N (first coordinate) with the other moduli fixed;
/// generators are homology vectors of the group's letters, reduced mod the
/// moduli. h is exhaustive for N * (other moduli) <= 24, else a bound.
GapDecayTable gap_decay_experiment(const std::vector<int>& Ns, const std::vector<int>& other_moduli,
                                   const std::vector<std::vector<int>>& generators);

}  // namespace reslab
