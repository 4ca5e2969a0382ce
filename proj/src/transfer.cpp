#include "reslab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "reslab/error.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "transfer";
constexpr double kSampleRadius = 0.75;
}  // namespace

// ---------------------------------------------------------------------------
// Finite quotients and twists

FiniteQuotient FiniteQuotient::abelian(const std::vector<int>& moduli) {
    const int m = static_cast<int>(moduli.size());
    FiniteQuotient q;
    q.order = 1;
    for (int N : moduli) {
        if (N < 1) throw ValidationError(kModule, "abelian modulus must be >= 1");
        q.order *= N;
    }
    // Mixed radix: element index = sum x_k * stride_k.
    std::vector<int> stride(m, 1);
    for (int k = 1; k < m; ++k) stride[k] = stride[k - 1] * moduli[k - 1];
    auto digits = [&](int e) {
        std::vector<int> x(m);
        for (int k = 0; k < m; ++k) x[k] = (e / stride[k]) % moduli[k];
        return x;
    };
    q.table.assign(q.order, std::vector<int>(q.order, 0));
    for (int a = 0; a < q.order; ++a) {
        const auto xa = digits(a);
        for (int b = 0; b < q.order; ++b) {
            const auto xb = digits(b);
            int idx = 0;
            for (int k = 0; k < m; ++k) idx += ((xa[k] + xb[k]) % moduli[k]) * stride[k];
            q.table[a][b] = idx;
        }
    }
    q.letter_image.assign(2 * m, 0);
    for (int k = 0; k < m; ++k) {
        q.letter_image[k] = moduli[k] > 1 ? stride[k] : 0;
        q.letter_image[k + m] = moduli[k] > 1 ? (moduli[k] - 1) * stride[k] : 0;
    }
    return q;
}

int FiniteQuotient::image(const Word& w) const {
    int g = 0;
    for (int x : w) g = table[g][letter_image[x]];
    return g;
}

void FiniteQuotient::check(int letters) const {
    if (order < 1 || static_cast<int>(table.size()) != order) {
        throw ValidationError(kModule, "quotient multiplication table has wrong size");
    }
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != order) throw ValidationError(kModule, "ragged multiplication table");
        for (int v : row) {
            if (v < 0 || v >= order) throw ValidationError(kModule, "multiplication table entry out of range");
        }
    }
    if (static_cast<int>(letter_image.size()) != letters) {
        throw ValidationError(kModule, "quotient needs one image per letter");
    }
    for (int g = 0; g < order; ++g) {
        if (table[0][g] != g || table[g][0] != g) throw ValidationError(kModule, "element 0 is not the identity");
    }
    const int m = letters / 2;
    for (int k = 0; k < m; ++k) {
        if (table[letter_image[k]][letter_image[k + m]] != 0) {
            throw ValidationError(kModule, "letter images of a generator and its inverse do not cancel");
        }
    }
}

TwistSpec TwistSpec::trivial() { return {}; }

TwistSpec TwistSpec::abelian(std::vector<double> theta) {
    TwistSpec t;
    t.kind = Kind::Abelian;
    t.theta = std::move(theta);
    return t;
}

TwistSpec TwistSpec::matrix(const std::vector<Eigen::MatrixXcd>& U) {
    TwistSpec t;
    t.kind = Kind::Matrix;
    const int m = static_cast<int>(U.size());
    t.unitaries.resize(2 * m);
    for (int k = 0; k < m; ++k) {
        t.unitaries[k] = U[k];
        t.unitaries[k + m] = U[k].adjoint();
    }
    return t;
}

TwistSpec TwistSpec::regular(FiniteQuotient q) {
    TwistSpec t;
    t.kind = Kind::Regular;
    t.quotient = std::make_shared<const FiniteQuotient>(std::move(q));
    return t;
}

int TwistSpec::dim() const {
    switch (kind) {
        case Kind::Trivial:
        case Kind::Abelian: return 1;
        case Kind::Matrix: return unitaries.empty() ? 1 : static_cast<int>(unitaries[0].rows());
        case Kind::Regular: return quotient->order;
    }
    return 1;
}

Eigen::MatrixXcd TwistSpec::letter_matrix(int letter, int m) const {
    switch (kind) {
        case Kind::Trivial: return Eigen::MatrixXcd::Identity(1, 1);
        case Kind::Abelian: {
            const double sign = letter < m ? 1.0 : -1.0;
            const double t = theta[letter % m];
            Eigen::MatrixXcd r(1, 1);
            r(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi * sign * t);
            return r;
        }
        case Kind::Matrix: return unitaries[letter];
        case Kind::Regular: {
            // Left multiplication: e_h -> e_{gh}.
            const int q = quotient->order;
            const int g = quotient->letter_image[letter];
            Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(q, q);
            for (int h = 0; h < q; ++h) P(quotient->table[g][h], h) = 1.0;
            return P;
        }
    }
    return Eigen::MatrixXcd::Identity(1, 1);
}

cd TwistSpec::character(const Word& w, int m) const {
    switch (kind) {
        case Kind::Trivial: return 1.0;
        case Kind::Abelian: {
            double phase = 0.0;
            for (int x : w) phase += (x < m ? 1.0 : -1.0) * theta[x % m];
            return std::polar(1.0, 2.0 * std::numbers::pi * phase);
        }
        case Kind::Matrix: {
            Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(dim(), dim());
            for (int x : w) P = P * unitaries[x];
            return P.trace();
        }
        case Kind::Regular: return quotient->image(w) == 0 ? cd(quotient->order) : cd(0.0);
    }
    return 1.0;
}

void TwistSpec::check(int m) const {
    switch (kind) {
        case Kind::Trivial: return;
        case Kind::Abelian:
            if (static_cast<int>(theta.size()) != m) {
                throw ValidationError(kModule, "abelian twist needs " + std::to_string(m) + " angles, got " +
                                                   std::to_string(theta.size()));
            }
            for (double t : theta) {
                if (!std::isfinite(t)) throw ValidationError(kModule, "non-finite twist angle");
            }
            return;
        case Kind::Matrix: {
            if (static_cast<int>(unitaries.size()) != 2 * m) {
                throw ValidationError(kModule, "matrix twist needs one unitary per generator");
            }
            const int d = dim();
            for (int k = 0; k < 2 * m; ++k) {
                const auto& U = unitaries[k];
                if (U.rows() != d || U.cols() != d) throw ValidationError(kModule, "twist matrices differ in size");
                const double err = (U.adjoint() * U - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
                if (err > 1e-10) {
                    std::ostringstream msg;
                    msg << "twist matrix for letter " << (k + 1) << " is not unitary (error " << err << ")";
                    throw ValidationError(kModule, msg.str());
                }
            }
            for (int k = 0; k < m; ++k) {
                const double err = (unitaries[k] * unitaries[k + m] - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
                if (err > 1e-10) throw ValidationError(kModule, "inverse-letter twist is not the inverse matrix");
            }
            return;
        }
        case Kind::Regular:
            if (!quotient) throw ValidationError(kModule, "regular twist without a quotient");
            quotient->check(2 * m);
            return;
    }
}

// ---------------------------------------------------------------------------
// Basis sampling

TransferBasis::TransferBasis(const SchottkyGroup& group, int lmax)
    : group_(group), lmax_(lmax), K_(4 * (lmax + 1)) {
    if (lmax < 2) throw ValidationError(kModule, "lmax must be >= 2, got " + std::to_string(lmax));
    const int L = group_.letter_count();
    const int n1 = lmax + 1;

    // Taylor coefficient n of g at c_i from equispaced samples on radius
    // 0.75 r_i, rescaled to the orthonormal monomial of degree n.
    analysis_.resize(L);
    for (int i = 0; i < L; ++i) {
        const double r = group_.disc(i).radius;
        Eigen::MatrixXcd A(n1, K_);
        for (int n = 0; n < n1; ++n) {
            const double scale = r * std::pow(kSampleRadius, -n) * std::sqrt(std::numbers::pi / (n + 1)) / K_;
            for (int k = 0; k < K_; ++k) {
                const long long nk = static_cast<long long>(n) * k % K_;
                A(n, k) = scale * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(nk) / K_);
            }
        }
        analysis_[i] = std::move(A);
    }

    pairs_.resize(static_cast<std::size_t>(L) * L);
    for (int i = 0; i < L; ++i) {
        const Disc& Di = group_.disc(i);
        for (int j = 0; j < L; ++j) {
            if (j == i) continue;
            Pair& P = pairs_[i * L + j];
            P.i = i;
            P.j = j;
            P.log_der.resize(K_);
            P.values.resize(K_, n1);
            const int src = group_.inverse_letter(j);
            const Disc& Ds = group_.disc(src);
            const MoebiusMap& g = group_.letter_map(j);
            for (int k = 0; k < K_; ++k) {
                const cd z = Di.center + kSampleRadius * Di.radius *
                                             std::polar(1.0, 2.0 * std::numbers::pi * k / K_);
                P.log_der(k) = log_derivative_cocycle(group_, Word{j}, z);
                const cd u = (g.apply(z) - Ds.center) / Ds.radius;
                cd pw = 1.0;
                for (int l = 0; l < n1; ++l) {
                    P.values(k, l) = std::sqrt((l + 1) / std::numbers::pi) / Ds.radius * pw;
                    pw *= u;
                }
            }
        }
    }
}

Eigen::MatrixXcd TransferBasis::block(int i, int j, cd s) const {
    const Pair& P = pairs_[i * group_.letter_count() + j];
    Eigen::VectorXcd w(K_);
    for (int k = 0; k < K_; ++k) w(k) = std::exp(s * P.log_der(k));
    return analysis_[i] * (w.asDiagonal() * P.values);
}

// ---------------------------------------------------------------------------

TransferMatrix assemble(const TransferBasis& basis, cd s, const TwistSpec& twist) {
    const SchottkyGroup& group = basis.group();
    const int m = group.m();
    twist.check(m);
    const int L = group.letter_count();
    const int n1 = basis.lmax() + 1;

    TransferMatrix M;
    M.s = s;
    M.lmax = basis.lmax();
    M.m = m;
    M.dim = twist.dim();
    const int d = M.dim;
    const int size = L * n1 * d;
    M.mat = Eigen::MatrixXcd::Zero(size, size);

    std::vector<Eigen::MatrixXcd> rhoT(L);
    for (int j = 0; j < L; ++j) rhoT[j] = twist.letter_matrix(j, m).transpose();

    // Blocks (i, j) write disjoint regions, so the fill is order-free.
    const std::size_t nblocks = static_cast<std::size_t>(L) * L;
    parallel_for(nblocks, [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / L;
        const int j = static_cast<int>(idx) % L;
        if (i == j) return;
        const Eigen::MatrixXcd B = basis.block(i, j, s);
        const int src = group.inverse_letter(j);
        const Eigen::MatrixXcd& R = rhoT[j];
        for (int n = 0; n < n1; ++n) {
            for (int l = 0; l < n1; ++l) {
                const cd b = B(n, l);
                for (int k = 0; k < d; ++k) {
                    for (int kk = 0; kk < d; ++kk) {
                        const cd r = R(k, kk);
                        if (r != 0.0) M.mat(M.index(i, n, k), M.index(src, l, kk)) = b * r;
                    }
                }
            }
        }
    });
    return M;
}

TransferMatrix assemble(const SchottkyGroup& group, cd s, const TwistSpec& twist, int lmax) {
    return assemble(TransferBasis(group, lmax), s, twist);
}

cd fredholm_det(const Eigen::MatrixXcd& M) {
    const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(M.rows(), M.cols()) - M;
    return A.partialPivLu().determinant();
}

cd fredholm_det(const TransferMatrix& M) { return fredholm_det(M.mat); }

std::vector<double> singular_values(const TransferMatrix& M) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M.mat);
    const auto& v = svd.singularValues();
    std::vector<double> out(v.data(), v.data() + v.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double spectral_radius(const TransferMatrix& M) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M.mat, false);
    if (es.info() != Eigen::Success) throw NumericalError(kModule, "eigenvalue solver did not converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

DecayFit singular_value_decay(const std::vector<double>& mu, double rel_floor, int skip) {
    if (mu.empty() || !(mu[0] > 0.0)) throw ValidationError(kModule, "decay fit needs a positive leading value");
    if (!(rel_floor > 0.0 && rel_floor < 1.0) || skip < 0) throw ValidationError(kModule, "bad decay fit window");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t k = static_cast<std::size_t>(skip); k < mu.size(); ++k) {
        if (!(mu[k] > rel_floor * mu[0])) break;
        const double x = static_cast<double>(k), y = std::log(mu[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) throw NumericalError(kModule, "fewer than 3 singular values above the floor");
    DecayFit fit;
    fit.used = n;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

cd lefschetz_trace(const SchottkyGroup& group, cd s, const TwistSpec& twist, int N) {
    twist.check(group.m());
    cd sum = 0.0;
    for_each_word(group, N, std::nullopt, [&](const Word& w) {
        if (w.front() == group.inverse_letter(w.back())) return;
        const MoebiusMap g = word_map(group, w);
        const auto fp = g.fixed_points();
        if (!fp) throw NumericalError(kModule, "closed word " + format_word(w) + " is not hyperbolic");
        const double x = (*fp)[0];
        const double der = g.derivative(cd(x, 0.0)).real();
        sum += twist.character(w, group.m()) * std::exp(s * std::log(der)) / (1.0 - der);
    });
    return sum;
}

cd matrix_power_trace(const TransferMatrix& M, int N) {
    if (N < 1) throw ValidationError(kModule, "trace power must be >= 1");
    Eigen::MatrixXcd P = M.mat;
    for (int k = 1; k < N; ++k) P = P * M.mat;
    return P.trace();
}

TraceCheck operator_trace_check(const SchottkyGroup& group, cd s, const TwistSpec& twist, int lmax,
                                int N, int depth_cap) {
    if (N < 1 || N > depth_cap) {
        throw ValidationError(kModule, "trace power N = " + std::to_string(N) + " outside [1, " +
                                           std::to_string(depth_cap) + "]");
    }
    TraceCheck tc;
    tc.matrix_trace = matrix_power_trace(assemble(group, s, twist, lmax), N);
    tc.lefschetz = lefschetz_trace(group, s, twist, N);
    tc.residual = std::abs(tc.matrix_trace - tc.lefschetz);
    return tc;
}

AutoLmax auto_lmax(const SchottkyGroup& group, cd s, const TwistSpec& twist, int start, double tol,
                   int step, int max_lmax) {
    AutoLmax out;
    int l = start;
    cd prev = fredholm_det(assemble(group, s, twist, l));
    while (l + step <= max_lmax) {
        const cd next = fredholm_det(assemble(group, s, twist, l + step));
        out.change = std::abs(next - prev);
        out.lmax = l;
        if (out.change < tol) {
            out.converged = true;
            return out;
        }
        l += step;
        prev = next;
    }
    out.lmax = l;
    return out;
}

}  // namespace reslab
