#pragma once

// Dense complex linear-algebra helpers shared by the modules.

#include <krylovlab/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace krylovlab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

/// z^k by repeated multiplication (std::pow goes through log and turns 0^0
/// into NaN).
inline Complex ipow(Complex z, int k)
{
    Complex r(1.0);
    for (int i = 0; i < k; ++i)
        r *= z;
    return r;
}

/// Largest singular value.
inline double spectral_norm(const Matrix& m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// Vector of i.i.d. standard complex Gaussians (E|z|^2 = 1).
template <typename Rng>
Vector random_complex_vector(Index n, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = Complex(re, im);
    }
    return v;
}

/// Haar-distributed unitary: QR of a seeded complex Gaussian matrix with
/// the phases of diag(R) folded into Q, so the result is deterministic.
inline Matrix haar_unitary(Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Matrix z(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix& r = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        const Complex phase = mag > 0.0 ? r(j, j) / mag : Complex(1.0);
        q.col(j) *= phase;
    }
    return q;
}

/// Orthonormal basis of the column span; columns with relative norm
/// below `tol` after projection are dropped.
inline Matrix orthonormal_basis(const Matrix& columns, double tol = 1e-12)
{
    const Index n = columns.rows();
    Matrix q(n, 0);
    double scale = 0.0;
    for (Index j = 0; j < columns.cols(); ++j)
        scale = std::max(scale, columns.col(j).norm());
    if (scale == 0.0)
        return q;
    for (Index j = 0; j < columns.cols(); ++j) {
        Vector w = columns.col(j);
        for (int pass = 0; pass < 2; ++pass)
            if (q.cols() > 0)
                w -= q * (q.adjoint() * w);
        const double nw = w.norm();
        if (nw > tol * scale) {
            q.conservativeResize(Eigen::NoChange, q.cols() + 1);
            q.col(q.cols() - 1) = w / nw;
        }
    }
    return q;
}

/// Largest principal angle between the spans of two orthonormal bases.
///
/// Small angles come from the sines (singular values of the component of
/// `b` orthogonal to `a`), large ones from the cosines (singular values of
/// a* b); cosine-only evaluation cannot resolve angles below ~1e-8.
/// Subspaces of different dimension are at angle pi/2.
inline double max_principal_angle(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows())
        throw DimensionError("principal angles need bases in the same space");
    if (a.cols() != b.cols())
        return kPi / 2;
    if (a.cols() == 0)
        return 0.0;
    const Matrix cross = a.adjoint() * b;
    const Matrix residual = b - a * cross;
    Eigen::BDCSVD<Matrix> sines(residual);
    const double sin_max = std::min(1.0, sines.singularValues()(0));
    if (sin_max < std::sqrt(0.5))
        return std::asin(sin_max);
    Eigen::BDCSVD<Matrix> cosines(cross);
    const double cos_min = std::clamp(cosines.singularValues()(cross.cols() - 1), 0.0, 1.0);
    return std::acos(cos_min);
}

/// Pairwise (cascade) summation of a sequence of vectors, deterministic
/// in order.
inline Vector pairwise_sum(std::span<const Vector> terms)
{
    if (terms.empty())
        throw InvalidArgument("pairwise_sum of an empty range");
    if (terms.size() == 1)
        return terms.front();
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

/// 64-bit FNV-1a, used for stable seed derivation.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// splitmix64 finaliser.
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace krylovlab
