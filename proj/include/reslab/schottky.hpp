#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reslab/moebius.hpp"

namespace reslab {

/// Letters are 0-based: 0..m-1 are the generators, m..2m-1 their inverses.
/// Printed output uses the 1-based convention.
using Word = std::vector<int>;

/// Schottky data: 2m discs orthogonal to the real line and m generators with
/// gamma_i(D_i) = complement of closure(D_{m+i}).
///
/// Construction only checks shapes; geometric validity is reported by
/// validate() so bad inputs can be diagnosed instead of rejected outright.
class SchottkyGroup {
public:
    SchottkyGroup(std::vector<Disc> discs, std::vector<MoebiusMap> generators,
                  std::optional<std::vector<IntMatrix>> integer_generators = std::nullopt,
                  std::string name = "custom");

    int m() const { return m_; }
    int letter_count() const { return 2 * m_; }
    int inverse_letter(int k) const { return (k + m_) % (2 * m_); }
    const std::string& name() const { return name_; }

    const Disc& disc(int k) const { return discs_[k]; }
    const std::vector<Disc>& discs() const { return discs_; }
    /// Normalized map of letter k (generator or inverse).
    const MoebiusMap& letter_map(int k) const { return letters_[k]; }
    const MoebiusMap& generator(int i) const { return letters_[i]; }

    bool has_integer_generators() const { return int_letters_.has_value(); }
    /// Integer lift of letter k. Requires has_integer_generators().
    const IntMatrix& integer_letter(int k) const;

private:
    int m_;
    std::vector<Disc> discs_;
    std::vector<MoebiusMap> letters_;
    std::optional<std::vector<IntMatrix>> int_letters_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// Presets

/// Hyperbolic cylinder: one generator of trace t > 2.
SchottkyGroup preset_cylinder(double trace = 3.0);
/// Reflection-symmetric three-funnel group; theta in (0, pi/4) is the
/// angular half-width of the four discs in the unit-disc picture.
SchottkyGroup preset_symmetric3(double theta = 0.25);
/// Two SL2(Z) matrices with discs taken as their isometric circles.
SchottkyGroup preset_sl2z_pair(const IntMatrix& A, const IntMatrix& B);
SchottkyGroup preset_sl2z_pair();
/// Integer one-holed torus group with delta near 0.68; the dense preset
/// for trace-multiplicity experiments. Its discs are nearly tangent, so
/// determinants need lmax around 96 for full accuracy.
SchottkyGroup preset_sl2z_torus();
/// Same construction for any number of integer generators.
SchottkyGroup group_from_isometric_circles(const std::vector<IntMatrix>& gens,
                                           std::string name = "isometric");

/// Discs from the Dirichlet domain at base point o in the upper half-plane:
/// D_i = {z : d(z, g_i^{-1} o) < d(z, o)}, D_{m+i} = {z : d(z, g_i o) < d(z, o)}.
/// The pairing holds by construction; disjointness is left to validate().
SchottkyGroup group_from_dirichlet(const std::vector<MoebiusMap>& gens, cd base,
                                   std::optional<std::vector<IntMatrix>> integer_generators,
                                   std::string name);
/// Scans base points and keeps the one whose Dirichlet discs have the largest
/// minimal gap relative to the largest radius. Throws ValidationError if no
/// scanned point yields disjoint discs.
SchottkyGroup dirichlet_group(const std::vector<IntMatrix>& gens, std::string name);

/// Parses "cylinder", "cylinder(3)", "symmetric3(0.25)", "sl2z-pair",
/// "sl2z-pair(a,b,c,d;a,b,c,d)", "sl2z-torus". Throws ValidationError.
SchottkyGroup preset_by_name(const std::string& spec);

/// Builds the generator mapping D(c1,r1) onto the exterior of D(c2,r2):
/// z -> c2 - r1 r2 / (z - c1), normalized.
MoebiusMap disc_swap_map(const Disc& from, const Disc& to);

// ---------------------------------------------------------------------------
// Validation

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double margin = 0.0;  ///< positive when passing; gap or residual slack
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    double min_gap = 0.0;
    double max_boundary_residual = 0.0;

    bool ok() const;
};

ValidationReport validate(const SchottkyGroup& group);

// ---------------------------------------------------------------------------
// Words

bool is_admissible(const SchottkyGroup& group, const Word& w);
bool is_cyclically_reduced(const SchottkyGroup& group, const Word& w);

/// Visits every admissible word of length n, optionally skipping those whose
/// last letter equals exclude_last. Words are produced in lexicographic order.
void for_each_word(const SchottkyGroup& group, int n, std::optional<int> exclude_last,
                   const std::function<void(const Word&)>& visit);
std::vector<Word> enumerate_words(const SchottkyGroup& group, int n,
                                  std::optional<int> exclude_last = std::nullopt);

/// gamma_{w_1} o ... o gamma_{w_n}; det 1 up to rounding.
/// Throws ValidationError for inadmissible words.
MoebiusMap word_map(const SchottkyGroup& group, const Word& w);
IntMatrix word_integer_matrix(const SchottkyGroup& group, const Word& w);

/// Sum of principal logs of single-letter derivatives along the orbit of z,
/// so exp(s * result) is the branch-correct (gamma_w'(z))^s.
/// Throws NumericalError if a derivative lies on the cut (-inf, 0].
cd log_derivative_cocycle(const SchottkyGroup& group, const Word& w, cd z);

std::vector<int> homology(const SchottkyGroup& group, const Word& w);

/// True when w is strictly smaller than every proper rotation: the canonical
/// representative of a primitive cyclic class.
bool is_lyndon(const Word& w);

std::string format_word(const Word& w);

// ---------------------------------------------------------------------------
// Closed geodesics

struct GeodesicClass {
    Word word;                         ///< Lyndon representative
    double length = 0.0;               ///< 2 arccosh(|tr|/2)
    double trace = 0.0;                ///< trace of the normalized word map
    std::optional<long long> int_trace;  ///< exact, for integer groups
    std::vector<int> homology;
    double fixed_point = 0.0;          ///< attracting fixed point
    double fixed_point_derivative = 0.0;
};

/// Builds the record for a cyclically reduced word (need not be Lyndon).
GeodesicClass make_geodesic(const SchottkyGroup& group, const Word& w);

/// All primitive classes with word length <= max_depth, sorted by
/// (length, word).
std::vector<GeodesicClass> primitive_classes_to_depth(const SchottkyGroup& group, int max_depth);

struct GeodesicTable {
    std::vector<GeodesicClass> classes;  ///< sorted by (length, word)
    double max_length = 0.0;
    int depth_reached = 0;
    bool complete = true;
    std::vector<std::string> warnings;
};

/// One Lyndon representative per primitive class with length <= max_length.
/// C and C^{-1} are distinct classes. Depth grows until two consecutive
/// depths contain no word shorter than max_length, or depth_cap is hit.
GeodesicTable primitive_geodesics(const SchottkyGroup& group, double max_length,
                                  int depth_cap = 18);

}  // namespace reslab
