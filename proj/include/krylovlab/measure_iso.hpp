#pragma once

// The scalar spectral measure mu_g = sum_n ||P_n g||^2 delta_{lambda_n} and
// the identities behind the isometry L^2(sigma(A), mu_g) -> closure of
// K(A, g), f |-> f(A) g, together with its converse.

#include <krylovlab/errors.hpp>
#include <krylovlab/krylov.hpp>
#include <krylovlab/linalg.hpp>
#include <krylovlab/operator_model.hpp>
#include <krylovlab/solvability.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace krylovlab {

struct Atom
{
    SpectralIndex index = 0;
    Complex point{};
    double weight = 0.0;
};

struct ScalarMeasure
{
    std::vector<Atom> atoms;

    double total_mass() const
    {
        double m = 0.0;
        for (const auto& a : atoms)
            m += a.weight;
        return m;
    }

    /// \int f d mu.
    template <typename F>
    Complex integrate(F&& f) const
    {
        Complex s(0.0);
        for (const auto& a : atoms)
            s += f(a.point) * a.weight;
        return s;
    }
};

/// Atoms (lambda_n, ||P_n g||^2) over the spectral components g sees.
inline ScalarMeasure scalar_measure(const CompactNormalModel& model, const Vector& g)
{
    ScalarMeasure mu;
    const Vector c = model.to_eigencoordinates(g);
    for (SpectralIndex n : active_indices(model, g)) {
        double w = 0.0;
        for (Index i : model.block(n))
            w += std::norm(c(i));
        mu.atoms.push_back(Atom{n, model.spectrum().entry(n).value, w});
    }
    return mu;
}

struct MomentOutcome
{
    double deviation = 0.0; // max_{j,k} |G_jk - M_jk|
    double threshold = 0.0;
    bool passed() const { return deviation <= threshold; }
};

/// Compares the Gram matrix G_jk = <A^j g, A^k g> of the assembled matrix
/// with the moments M_jk = \int conj(z)^j z^k d mu_g, 0 <= j, k <= k_max.
inline MomentOutcome gram_moment_check(const CompactNormalModel& model, const Vector& g, int k_max)
{
    if (k_max < 0)
        throw InvalidArgument("k_max must be non-negative");
    const double anorm = model.norm();
    if (anorm > 1.0 &&
        2.0 * k_max * std::log(anorm) > std::log(std::numeric_limits<double>::max()) - 2.0)
        throw DegreeTooLarge("||A||^(2 k_max) overflows double precision");

    const Matrix a = model.dense();
    Matrix powers(model.dim(), k_max + 1);
    powers.col(0) = g;
    for (int k = 1; k <= k_max; ++k)
        powers.col(k) = a * powers.col(k - 1);
    const Matrix gram = powers.adjoint() * powers;

    const ScalarMeasure mu = scalar_measure(model, g);
    MomentOutcome out;
    for (int j = 0; j <= k_max; ++j)
        for (int k = 0; k <= k_max; ++k) {
            const Complex m = mu.integrate([&](Complex z) {
                return ipow(std::conj(z), j) * ipow(z, k);
            });
            out.deviation = std::max(out.deviation, std::abs(gram(j, k) - m));
        }
    out.threshold = 1e-9 * g.squaredNorm() * std::max(1.0, std::pow(anorm, 2.0 * k_max));
    return out;
}

/// q(z, conj z) = sum c_ab z^a conj(z)^b.
class BivariatePolynomial
{
public:
    using Exponents = std::pair<int, int>;

    BivariatePolynomial() = default;
    explicit BivariatePolynomial(std::map<Exponents, Complex> coefficients)
        : coefficients_(std::move(coefficients))
    {
        for (const auto& [e, c] : coefficients_)
            if (e.first < 0 || e.second < 0)
                throw InvalidArgument("exponents must be non-negative");
    }

    /// Dense random coefficients on every monomial of total degree <= d.
    template <typename Rng>
    static BivariatePolynomial random(int degree, Rng& rng)
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::map<Exponents, Complex> c;
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                const double re = normal(rng);
                const double im = normal(rng);
                c[{a, b}] = Complex(re, im);
            }
        return BivariatePolynomial(std::move(c));
    }

    const std::map<Exponents, Complex>& coefficients() const { return coefficients_; }

    int degree() const
    {
        int d = 0;
        for (const auto& [e, c] : coefficients_)
            d = std::max(d, e.first + e.second);
        return d;
    }

    Complex operator()(Complex z) const
    {
        Complex s(0.0);
        for (const auto& [e, c] : coefficients_)
            s += c * ipow(z, e.first) * ipow(std::conj(z), e.second);
        return s;
    }

    /// q(A, A*) v via repeated applications of A and A* (they commute).
    Vector apply(const CompactNormalModel& model, const Vector& v) const
    {
        Vector out = Vector::Zero(v.size());
        for (const auto& [e, c] : coefficients_) {
            Vector w = v;
            for (int b = 0; b < e.second; ++b)
                w = model.apply_adjoint(w);
            for (int a = 0; a < e.first; ++a)
                w = model.apply(w);
            out += c * w;
        }
        return out;
    }

private:
    std::map<Exponents, Complex> coefficients_;
};

struct IsometryOutcome
{
    double isometry_deviation = 0.0; // | ||q(A,A*)g||^2 - \int |q|^2 d mu | / \int |q|^2 d mu
    double membership = 0.0;         // dist(q(A,A*)g, K) / ||q(A,A*)g||
    bool passed(double iso_tol = 1e-9, double member_tol = 1e-8) const
    {
        return isometry_deviation <= iso_tol && membership <= member_tol;
    }
};

inline IsometryOutcome isometry_check(const CompactNormalModel& model, const Vector& g,
                                      const KrylovBasis& basis, const BivariatePolynomial& q)
{
    const Vector v = q.apply(model, g);
    const ScalarMeasure mu = scalar_measure(model, g);
    const double s = mu.integrate([&](Complex z) { return Complex(std::norm(q(z))); }).real();
    IsometryOutcome out;
    const double vn = v.norm();
    out.isometry_deviation = std::abs(vn * vn - s) / std::max(s, g.squaredNorm() * 1e-24);
    out.membership = vn > 0.0 ? distance_to_krylov(basis, v) / vn : 0.0;
    return out;
}

inline IsometryOutcome isometry_check(const CompactNormalModel& model, const Vector& g,
                                      const BivariatePolynomial& q)
{
    return isometry_check(model, g, arnoldi_to_termination(model, g), q);
}

struct ConverseOutcome
{
    double adjoint_norm_sq = 0.0;  // ||A* g||^2
    double measure_integral = 0.0; // \int |z|^2 d mu_g
    double forward_norm_sq = 0.0;  // ||A g||^2
    double relative_deviation = 0.0;
    double reducibility = 0.0;
    bool passed() const { return relative_deviation <= 1e-10 && reducibility <= 1e-8; }
};

/// ||A* g||^2 = \int |conj z|^2 d mu = ||A g||^2, hence A* g lies in K(A, g).
inline ConverseOutcome converse_criterion_check(const CompactNormalModel& model, const Vector& g)
{
    ConverseOutcome out;
    out.adjoint_norm_sq = model.apply_adjoint(g).squaredNorm();
    out.forward_norm_sq = model.apply(g).squaredNorm();
    out.measure_integral =
        scalar_measure(model, g).integrate([](Complex z) { return Complex(std::norm(z)); }).real();
    const double scale = std::max({out.adjoint_norm_sq, out.forward_norm_sq, out.measure_integral});
    if (scale > 0.0)
        out.relative_deviation =
            std::max({std::abs(out.adjoint_norm_sq - out.measure_integral),
                      std::abs(out.forward_norm_sq - out.measure_integral),
                      std::abs(out.adjoint_norm_sq - out.forward_norm_sq)}) /
            scale;
    out.reducibility = g.norm() > 0.0 ? reducibility_residual(model, g) : 0.0;
    return out;
}

} // namespace krylovlab
