#pragma once

// Orthonormal Krylov bases K_m(A, g) = span{g, Ag, ..., A^(m-1) g} by
// Arnoldi, and distances to their span.

#include <krylovlab/errors.hpp>
#include <krylovlab/linalg.hpp>
#include <krylovlab/operator_model.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>

namespace krylovlab {

enum class Reorthogonalization { never, always };

/// Default relative breakdown threshold on h_{k+1,k} / ||A||.
inline constexpr double kBreakdownTol = 1e-12;

class KrylovBasis
{
public:
    KrylovBasis(Matrix columns, Matrix hessenberg, Vector next, bool breakdown, Vector seed)
        : columns_(std::move(columns)),
          hessenberg_(std::move(hessenberg)),
          next_(std::move(next)),
          breakdown_(breakdown),
          seed_(std::move(seed))
    {
    }

    /// Krylov dimension d reached (number of columns).
    Index dim() const { return columns_.cols(); }
    Index ambient_dim() const { return columns_.rows(); }

    /// Q_d, orthonormal.
    const Matrix& columns() const { return columns_; }
    /// The (d+1) x d upper-Hessenberg matrix H~.
    const Matrix& hessenberg() const { return hessenberg_; }
    /// q_{d+1}; zero after breakdown.
    const Vector& next() const { return next_; }
    /// True when the recurrence reached an invariant subspace.
    bool breakdown() const { return breakdown_; }
    const Vector& seed() const { return seed_; }

    /// Q_{d+1} = [Q_d, q_{d+1}].
    Matrix extended_columns() const
    {
        Matrix q(columns_.rows(), dim() + 1);
        q.leftCols(dim()) = columns_;
        q.col(dim()) = next_;
        return q;
    }

    /// Basis of K_m for m <= d (leading columns).
    Matrix leading_columns(Index m) const
    {
        if (m < 0 || m > dim())
            throw InvalidArgument("prefix length exceeds the Krylov dimension");
        return columns_.leftCols(m);
    }

private:
    Matrix columns_;
    Matrix hessenberg_;
    Vector next_;
    bool breakdown_;
    Vector seed_;
};

/// Arnoldi with modified Gram-Schmidt; `always` adds a second
/// orthogonalisation pass. Terminates at m_max columns or when the next
/// residual satisfies h_{k+1,k} <= tol * ||A||.
inline KrylovBasis arnoldi(const CompactNormalModel& model, const Vector& g, Index m_max,
                           Reorthogonalization reorth = Reorthogonalization::always,
                           double tol = kBreakdownTol)
{
    const Index n = model.dim();
    if (g.size() != n)
        throw DimensionError("seed vector has the wrong dimension");
    const double gnorm = g.norm();
    if (gnorm == 0.0)
        throw ZeroVector("Krylov seed must be non-zero");
    if (m_max < 1 || m_max > n)
        throw InvalidArgument("m_max must satisfy 1 <= m_max <= N");

    const double threshold = tol * model.norm();
    Matrix q(n, m_max);
    Matrix h = Matrix::Zero(m_max + 1, m_max);
    q.col(0) = g / gnorm;

    for (Index k = 0; k < m_max; ++k) {
        Vector w = model.apply(q.col(k));
        const int passes = reorth == Reorthogonalization::always ? 2 : 1;
        for (int pass = 0; pass < passes; ++pass)
            for (Index j = 0; j <= k; ++j) {
                const Complex c = q.col(j).dot(w);
                h(j, k) += c;
                w -= c * q.col(j);
            }
        const double beta = w.norm();
        h(k + 1, k) = beta;
        if (beta <= threshold) {
            const Index d = k + 1;
            return KrylovBasis(q.leftCols(d), h.topLeftCorner(d + 1, d), Vector::Zero(n), true, g);
        }
        if (k + 1 == m_max)
            return KrylovBasis(std::move(q), std::move(h), w / beta, false, g);
        q.col(k + 1) = w / beta;
    }
    throw Error("unreachable");
}

/// Full-length Arnoldi run until breakdown (the termination index).
inline KrylovBasis arnoldi_to_termination(const CompactNormalModel& model, const Vector& g,
                                          double tol = kBreakdownTol)
{
    return arnoldi(model, g, model.dim(), Reorthogonalization::always, tol);
}

/// ||v - Q Q* v|| for the leading m columns (all when m < 0).
inline double distance_to_krylov(const KrylovBasis& basis, const Vector& v, Index m = -1)
{
    if (v.size() != basis.ambient_dim())
        throw DimensionError("vector has the wrong dimension");
    const Index cols = m < 0 ? basis.dim() : m;
    const auto q = basis.leading_columns(cols);
    Vector r = v;
    for (int pass = 0; pass < 2; ++pass)
        r -= q * (q.adjoint() * r);
    return r.norm();
}

/// Arnoldi termination index; for a compact normal model this counts the
/// spectral components P_n g that g actually sees.
inline Index krylov_dimension(const CompactNormalModel& model, const Vector& g,
                              double tol = kBreakdownTol)
{
    return arnoldi_to_termination(model, g, tol).dim();
}

/// ||A Q_d - Q_{d+1} H~||_2.
inline double arnoldi_relation_residual(const CompactNormalModel& model, const KrylovBasis& basis)
{
    Matrix aq(basis.ambient_dim(), basis.dim());
    for (Index j = 0; j < basis.dim(); ++j)
        aq.col(j) = model.apply(basis.columns().col(j));
    return spectral_norm(aq - basis.extended_columns() * basis.hessenberg());
}

/// max |Q*Q - I|.
inline double orthogonality_loss(const KrylovBasis& basis)
{
    const Matrix gram = basis.columns().adjoint() * basis.columns();
    return (gram - Matrix::Identity(basis.dim(), basis.dim())).cwiseAbs().maxCoeff();
}

/// Column-major dump of Q, one "re,im" pair per line.
inline void write_basis_csv(const KrylovBasis& basis, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string());
    out << "re,im\n" << std::setprecision(17);
    const Matrix& q = basis.columns();
    for (Index j = 0; j < q.cols(); ++j)
        for (Index i = 0; i < q.rows(); ++i)
            out << q(i, j).real() << ',' << q(i, j).imag() << '\n';
}

} // namespace krylovlab
