#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "reslab/schottky.hpp"

namespace reslab {

/// Element of SL2(F_p); entries kept in [0, p).
struct FpMatrix {
    std::int64_t a = 1, b = 0, c = 0, d = 1;
    std::int64_t p = 5;

    static FpMatrix identity(std::int64_t p) { return {1, 0, 0, 1, p}; }
    FpMatrix operator*(const FpMatrix& o) const;
    FpMatrix inverse() const;
    FpMatrix pow(std::int64_t k) const;
    std::int64_t trace() const { return (a + d) % p; }
    std::int64_t det() const;
    bool operator==(const FpMatrix& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d && p == o.p;
    }
    /// Dense index in [0, p^4), used for visited sets.
    std::int64_t code() const { return ((a * p + b) * p + c) * p + d; }
};

std::int64_t mod_p(std::int64_t x, std::int64_t p);
bool is_prime(std::int64_t n);
/// Legendre symbol via Euler's criterion: 0, 1 or -1.
int legendre(std::int64_t x, std::int64_t p);

/// Throws ValidationError unless p is an odd prime > 3 or det != 1 mod p.
FpMatrix reduce_mod_p(const IntMatrix& g, std::int64_t p);
/// Reduction of the class representative; needs integer generators.
FpMatrix reduce_mod_p(const SchottkyGroup& group, const GeodesicClass& c, std::int64_t p);

enum class ClassKind { SplitTorus, NonsplitTorus, Central, Unipotent };

/// Complete conjugacy invariant in SL2(F_p). For semisimple elements the
/// trace decides. Central elements carry their sign; unipotent-type ones
/// carry the sign and the square class (0 square, 1 non-square) of the
/// off-diagonal entry in the normal form +-[[1, x], [0, 1]].
struct ConjClassLabel {
    ClassKind kind = ClassKind::Central;
    std::int64_t trace = 2;
    int sign = 1;
    int residue = 0;

    auto operator<=>(const ConjClassLabel&) const = default;
    std::string to_string() const;
};

ConjClassLabel classify(const FpMatrix& g);

std::int64_t class_size(const ConjClassLabel& label, std::int64_t p);
std::int64_t centralizer_size(const ConjClassLabel& label, std::int64_t p);

/// All p(p^2-1) elements, ordered by code().
std::vector<FpMatrix> sl2_elements(std::int64_t p);
/// Conjugacy classes by orbit enumeration; each class is a sorted list of
/// element codes, classes ordered by smallest code.
std::vector<std::vector<std::int64_t>> brute_force_classes(std::int64_t p);
/// Exhaustive conjugator search; only sensible for small p.
bool conjugate_brute_force(const FpMatrix& g, const FpMatrix& h);

struct ClassStat {
    ConjClassLabel label;
    std::int64_t size = 0;
    std::int64_t centralizer = 0;
};

struct ClassStatistics {
    std::int64_t p = 0;
    std::int64_t group_order = 0;
    std::vector<ClassStat> classes;  ///< sorted by label
    bool verified = false;           ///< brute force ran and agreed
    std::int64_t mismatches = 0;     ///< elements whose label disagrees with their orbit
};

/// Formula table; cross-checked by orbit enumeration when p <= brute_force_cap.
ClassStatistics class_statistics(std::int64_t p, std::int64_t brute_force_cap = 31);

/// Number of elements reached by BFS from the generator images mod p.
std::int64_t generated_subgroup_order(const SchottkyGroup& group, std::int64_t p);

// ---------------------------------------------------------------------------
// Trace multiplicities

/// A conjugacy class C^k of the integer group: primitive class plus power.
struct ClassPower {
    std::size_t primitive = 0;  ///< index into the geodesic table
    int k = 1;
    double length = 0.0;        ///< k l(C)
    std::int64_t trace = 0;     ///< exact integer trace of C^k
};

/// Every C^k with k l(C) <= T, ordered by (length, primitive, k). Requires
/// integer generators. Throws NumericalError if a trace overflows.
std::vector<ClassPower> class_powers(const SchottkyGroup& group, const std::vector<GeodesicClass>& table,
                                     double T);

struct TraceTable {
    double T = 0.0;
    std::map<std::int64_t, std::int64_t> m;  ///< signed integer trace -> class count
    std::int64_t class_count = 0;
    std::int64_t sum_m = 0;
    std::int64_t sum_m2 = 0;
    bool complete = true;
};

TraceTable trace_multiplicities(const SchottkyGroup& group, double T);
TraceTable trace_multiplicities(const std::vector<ClassPower>& powers, double T, bool complete = true);

/// Least-squares slope b of log S(T) + k log T = a + b T, i.e. the exponent
/// of S ~ e^{bT} / T^k. k = 0 gives the plain log-linear fit.
double fit_growth_exponent(const std::vector<double>& T, const std::vector<double>& S, double k = 0.0);

// ---------------------------------------------------------------------------
// Conjugacy versus traces

struct Conj1Violation {
    std::size_t first = 0, second = 0;  ///< indices into the class list
    std::int64_t trace_first = 0, trace_second = 0;
    bool same_trace = false;  ///< traces equal but not conjugate, or vice versa
};

struct Conj1Report {
    std::int64_t p = 0;
    double beta = 0.0;
    double T = 0.0;
    std::size_t classes = 0;
    std::int64_t pairs_checked = 0;
    std::int64_t violation_count = 0;
    std::vector<Conj1Violation> violations;  ///< at most max_listed
};

/// Over all class powers C^k with k l(C) <= beta log p, compares equality of
/// integer traces with conjugacy mod p. Requires beta < 2.
Conj1Report conj1_check(const SchottkyGroup& group, std::int64_t p, double beta, std::size_t max_listed = 100);

// ---------------------------------------------------------------------------
// Character average

/// Weight l(C) / (1 - e^{k l(C)}); negative for every class.
double geodesic_weight(double length, int k);

/// sum_{i,j} w_i w_j Z(i) [class_i == class_j]: the column-orthogonality
/// form of sum over irreducibles of |sum_i chi(g_i) w_i|^2.
double dirac_sum(const std::vector<int>& class_id, const std::vector<double>& weight,
                 const std::vector<double>& centralizer);

struct CharacterAverage {
    std::int64_t p = 0;
    double T = 0.0;
    double epsilon = 0.0;
    double S = 0.0;
    double paired_count = 0.0;  ///< pairs with k l, k' l' <= T(1-eps) conjugate mod p
    double lower_bound = 0.0;   ///< (p-1) * paired_count
    double sum_m2 = 0.0;        ///< sum of m(t)^2 over the same range
    double ratio = 0.0;         ///< S / lower_bound, the empirical constant
    std::size_t terms = 0;
};

/// S(p) in Dirac form with centralizer weights. test_fn is phi_0 on [-1, 1].
CharacterAverage character_average(const SchottkyGroup& group, std::int64_t p, double T,
                                   const std::function<double(double)>& test_fn, double epsilon = 0.1);

}  // namespace reslab
