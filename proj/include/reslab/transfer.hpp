#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "reslab/schottky.hpp"

namespace reslab {

/// Finite quotient G of the free group, given by its multiplication table and
/// the image of every letter. Element 0 is the identity.
struct FiniteQuotient {
    int order = 1;
    std::vector<std::vector<int>> table;  ///< table[a][b] = a*b
    std::vector<int> letter_image;        ///< size 2m

    /// Z/N_1 x ... x Z/N_m with letter k -> e_k and letter k+m -> -e_k.
    static FiniteQuotient abelian(const std::vector<int>& moduli);

    int image(const Word& w) const;
    void check(int letters) const;
};

/// Unitary twist of the transfer operator.
struct TwistSpec {
    enum class Kind { Trivial, Abelian, Matrix, Regular };

    Kind kind = Kind::Trivial;
    std::vector<double> theta;                   ///< Abelian
    std::vector<Eigen::MatrixXcd> unitaries;     ///< Matrix: one per letter (2m)
    std::shared_ptr<const FiniteQuotient> quotient;  ///< Regular

    static TwistSpec trivial();
    static TwistSpec abelian(std::vector<double> theta);
    /// U holds one unitary per generator; inverses are filled in.
    static TwistSpec matrix(const std::vector<Eigen::MatrixXcd>& U);
    static TwistSpec regular(FiniteQuotient q);

    int dim() const;
    /// rho(letter) as a dim x dim matrix.
    Eigen::MatrixXcd letter_matrix(int letter, int m) const;
    /// tr rho(w_1) ... rho(w_n).
    cd character(const Word& w, int m) const;
    /// Throws ValidationError when the twist does not fit a group with m
    /// generators or a matrix is not unitary to 1e-10.
    void check(int m) const;
};

/// Precomputed sampling data for one group and truncation order; assembling
/// at a new s only needs exponentials and small matrix products.
class TransferBasis {
public:
    TransferBasis(const SchottkyGroup& group, int lmax);

    const SchottkyGroup& group() const { return group_; }
    int lmax() const { return lmax_; }
    int samples() const { return K_; }

    /// Scalar (untwisted) block mapping coefficients on the source disc of
    /// letter j to coefficients on disc i. Requires j != i.
    Eigen::MatrixXcd block(int i, int j, cd s) const;

private:
    struct Pair {
        int i = 0, j = 0;
        Eigen::VectorXcd log_der;  ///< principal log of gamma_j' at samples
        Eigen::MatrixXcd values;   ///< K x (lmax+1): phi_l^(src)(gamma_j z_k)
    };

    SchottkyGroup group_;
    int lmax_;
    int K_;
    std::vector<Eigen::MatrixXcd> analysis_;  ///< per disc: (lmax+1) x K
    std::vector<Pair> pairs_;                 ///< index i * 2m + j
};

struct TransferMatrix {
    cd s;
    int lmax = 0;
    int m = 0;
    int dim = 1;  ///< twist dimension
    Eigen::MatrixXcd mat;

    /// Row/column of (disc, degree, twist coordinate).
    int index(int disc, int degree, int k) const { return (disc * (lmax + 1) + degree) * dim + k; }
};

TransferMatrix assemble(const TransferBasis& basis, cd s, const TwistSpec& twist);
TransferMatrix assemble(const SchottkyGroup& group, cd s, const TwistSpec& twist, int lmax);

/// det(I - M) by partial-pivot LU.
cd fredholm_det(const TransferMatrix& M);
cd fredholm_det(const Eigen::MatrixXcd& M);

std::vector<double> singular_values(const TransferMatrix& M);

struct DecayFit {
    double slope = 0.0;      ///< of log mu_k against k
    double intercept = 0.0;
    int used = 0;            ///< values in the fit
};

/// Least-squares line through log mu_k for k >= skip and mu_k above
/// rel_floor * mu_0, which keeps rounding noise out of the tail.
DecayFit singular_value_decay(const std::vector<double>& mu, double rel_floor = 1e-12, int skip = 1);
double spectral_radius(const TransferMatrix& M);

/// Sum over cyclically reduced words of length N of
/// chi(w) e^{-s l}/(1 - e^{-l}), using fixed-point data of each word map.
cd lefschetz_trace(const SchottkyGroup& group, cd s, const TwistSpec& twist, int N);
cd matrix_power_trace(const TransferMatrix& M, int N);

struct TraceCheck {
    cd matrix_trace;
    cd lefschetz;
    double residual = 0.0;
};

TraceCheck operator_trace_check(const SchottkyGroup& group, cd s, const TwistSpec& twist, int lmax,
                                int N, int depth_cap = 10);

struct AutoLmax {
    int lmax = 0;
    double change = 0.0;  ///< |det(lmax) - det(lmax + step)|
    bool converged = false;
};

/// Raises lmax from start in increments of step until successive
/// determinants at s agree to tol, or max_lmax is reached.
AutoLmax auto_lmax(const SchottkyGroup& group, cd s, const TwistSpec& twist, int start = 32,
                   double tol = 1e-10, int step = 8, int max_lmax = 96);

}  // namespace reslab
