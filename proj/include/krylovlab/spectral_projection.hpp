#pragma once

// Riesz projections P = (1/2 pi i) \oint (z - A)^-1 dz over circle
// contours by the trapezoidal rule, and polynomial approximations p(A) of
// the same projections with exact operator-norm error certificates.

#include <krylovlab/errors.hpp>
#include <krylovlab/linalg.hpp>
#include <krylovlab/operator_model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

namespace krylovlab {

struct Circle
{
    Complex center{};
    double radius = 1.0;
};

/// Union of positively oriented circles bounding pairwise disjoint disks.
struct AdmissibleContour
{
    std::vector<Circle> circles;
    int nodes_per_circle = 16;
};

/// A partition of the present spectral indices into two groups.
struct SpectrumSplit
{
    std::vector<SpectralIndex> sigma1;
    std::vector<SpectralIndex> sigma2;
    double gap = std::numeric_limits<double>::infinity();
};

namespace detail {

inline bool contains_index(const std::vector<SpectralIndex>& set, SpectralIndex n)
{
    return std::find(set.begin(), set.end(), n) != set.end();
}

inline double min_pairwise_distance(const CompactNormalModel& model,
                                    const std::vector<SpectralIndex>& a,
                                    const std::vector<SpectralIndex>& b)
{
    double d = std::numeric_limits<double>::infinity();
    for (SpectralIndex i : a)
        for (SpectralIndex j : b)
            if (&a != &b || i != j)
                d = std::min(d, std::abs(model.spectrum().entry(i).value -
                                         model.spectrum().entry(j).value));
    return d;
}

} // namespace detail

/// Split with explicit groups. Every present index must appear in one of
/// them; an index in both gives gap 0.
inline SpectrumSplit make_split(const CompactNormalModel& model, std::vector<SpectralIndex> sigma1,
                                std::vector<SpectralIndex> sigma2)
{
    const auto present = model.spectrum().present_indices();
    for (SpectralIndex n : sigma1)
        if (!detail::contains_index(present, n))
            throw IndexError("index " + std::to_string(n) + " is not in sigma(A)");
    for (SpectralIndex n : sigma2)
        if (!detail::contains_index(present, n))
            throw IndexError("index " + std::to_string(n) + " is not in sigma(A)");
    for (SpectralIndex n : present)
        if (!detail::contains_index(sigma1, n) && !detail::contains_index(sigma2, n))
            throw InvalidArgument("split does not cover index " + std::to_string(n));
    if (sigma1.empty())
        throw InvalidArgument("sigma1 must be non-empty");
    if (sigma2.empty() && present.size() > 1)
        throw InvalidArgument("sigma2 may be empty only for a single-point spectrum");

    SpectrumSplit split{std::move(sigma1), std::move(sigma2), 0.0};
    split.gap = detail::min_pairwise_distance(model, split.sigma1, split.sigma2);
    if (!(split.gap > 0.0))
        throw InseparableSpectrum("the two spectral groups touch (gap = 0)");
    return split;
}

/// Split with sigma2 the complement of sigma1 in sigma(A).
inline SpectrumSplit make_split(const CompactNormalModel& model, std::vector<SpectralIndex> sigma1)
{
    std::vector<SpectralIndex> sigma2;
    for (SpectralIndex n : model.spectrum().present_indices())
        if (!detail::contains_index(sigma1, n))
            sigma2.push_back(n);
    return make_split(model, std::move(sigma1), std::move(sigma2));
}

/// sum_{n in sigma} P_n v.
inline Vector exact_projection_apply(const CompactNormalModel& model,
                                     const std::vector<SpectralIndex>& sigma, const Vector& v)
{
    const Vector c = model.to_eigencoordinates(v);
    Vector masked = Vector::Zero(c.size());
    for (SpectralIndex n : sigma)
        for (Index i : model.block(n))
            masked(i) = c(i);
    return model.from_eigencoordinates(masked);
}

/// Minimum distance of the contour from sigma(A). Throws when the contour
/// touches the spectrum or the disks overlap.
inline double contour_separation(const CompactNormalModel& model, const AdmissibleContour& contour)
{
    if (contour.circles.empty())
        throw InvalidArgument("contour has no circles");
    if (contour.nodes_per_circle < 1)
        throw InvalidArgument("nodes_per_circle must be positive");
    for (std::size_t i = 0; i < contour.circles.size(); ++i) {
        if (!(contour.circles[i].radius > 0.0))
            throw InvalidArgument("circle radius must be positive");
        for (std::size_t j = 0; j < i; ++j) {
            const auto& a = contour.circles[i];
            const auto& b = contour.circles[j];
            if (std::abs(a.center - b.center) <= a.radius + b.radius)
                throw ContourTouchesSpectrum("circles must bound pairwise disjoint closed disks");
        }
    }
    double delta = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (const auto& c : contour.circles) {
        scale = std::max(scale, std::abs(c.center) + c.radius);
        for (SpectralIndex n : model.spectrum().present_indices())
            delta = std::min(delta, std::abs(std::abs(model.spectrum().entry(n).value - c.center) -
                                             c.radius));
    }
    if (!(delta > 1e-12 * std::max(1.0, scale)))
        throw ContourTouchesSpectrum("contour passes within " + std::to_string(delta) +
                                     " of the spectrum");
    return delta;
}

/// One circle of radius rho = min(gap, closest sigma1 pair) / 3 around each
/// eigenvalue in sigma1. Each disk isolates a single eigenvalue and every
/// other eigenvalue sits at least 3 rho from its centre, so the trapezoidal
/// rule converges like 3^-K.
inline AdmissibleContour auto_contour(const CompactNormalModel& model, const SpectrumSplit& split,
                                      int nodes_per_circle = 16)
{
    double spacing = std::min(split.gap,
                              detail::min_pairwise_distance(model, split.sigma1, split.sigma1));
    if (!std::isfinite(spacing))
        spacing = std::max(1.0, model.norm());
    AdmissibleContour contour;
    contour.nodes_per_circle = nodes_per_circle;
    for (SpectralIndex n : split.sigma1)
        contour.circles.push_back(Circle{model.spectrum().entry(n).value, spacing / 3.0});
    return contour;
}

/// Trapezoidal rule for (1/2 pi i) \oint (z - A)^-1 v dz with K equispaced
/// nodes per circle; node contributions are combined by pairwise summation.
inline Vector riesz_projection_quadrature(const CompactNormalModel& model,
                                          const AdmissibleContour& contour, const Vector& v)
{
    if (v.size() != model.dim())
        throw DimensionError("vector has the wrong dimension");
    contour_separation(model, contour);
    const int k = contour.nodes_per_circle;
    std::vector<Vector> terms;
    terms.reserve(contour.circles.size() * static_cast<std::size_t>(k));
    for (const auto& circle : contour.circles)
        for (int j = 0; j < k; ++j) {
            const Complex offset = std::polar(circle.radius, 2.0 * kPi * j / k);
            // dz = i (z - c) d theta; the 1/(2 pi i) and d theta = 2 pi / K
            // leave (z - c) / K, and (z - A)^-1 = -(A - z)^-1.
            terms.push_back(-(offset / static_cast<double>(k)) *
                            model.resolvent_apply(circle.center + offset, v));
        }
    return pairwise_sum(terms);
}

struct QuadratureResult
{
    Vector value;
    int nodes_per_circle = 0;
    /// (K, ||Q_K v - Q_{K/2} v|| / ||v||) for each doubling.
    std::vector<std::pair<int, double>> history;
};

/// Starts at K = k_start and doubles until successive results differ by at
/// most `tol` relative to ||v||.
inline QuadratureResult riesz_projection_auto(const CompactNormalModel& model,
                                              AdmissibleContour contour, const Vector& v,
                                              double tol = 1e-11, int k_start = 16,
                                              int k_max = 1 << 16)
{
    const double scale = std::max(v.norm(), std::numeric_limits<double>::min());
    contour.nodes_per_circle = k_start;
    QuadratureResult result;
    result.value = riesz_projection_quadrature(model, contour, v);
    while (contour.nodes_per_circle < k_max) {
        contour.nodes_per_circle *= 2;
        Vector next = riesz_projection_quadrature(model, contour, v);
        const double diff = (next - result.value).norm() / scale;
        result.history.emplace_back(contour.nodes_per_circle, diff);
        result.value = std::move(next);
        result.nodes_per_circle = contour.nodes_per_circle;
        if (diff <= tol)
            return result;
    }
    throw Error("quadrature did not settle within " + std::to_string(k_max) + " nodes");
}

// --- polynomial approximation ----------------------------------------------

/// p(z) = sum_k c_k z^k approximating the indicator of sigma1.
struct IndicatorPolynomial
{
    std::vector<Complex> coefficients;
    SpectrumSplit target;
    double sup_error = 0.0;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }

    Complex operator()(Complex z) const
    {
        Complex acc(0.0);
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
            acc = acc * z + *it;
        return acc;
    }
};

struct Lagrange
{
};

/// Least squares over `sample_count` points spread over a disk around each
/// group, blind to the exact eigenvalues.
struct LeastSquares
{
    int degree = 4;
    int sample_count = 512;
};

using PolynomialMethod = std::variant<Lagrange, LeastSquares>;

namespace detail {

inline double indicator(const SpectrumSplit& split, SpectralIndex n)
{
    return contains_index(split.sigma1, n) ? 1.0 : 0.0;
}

inline double sup_error(const CompactNormalModel& model, const SpectrumSplit& split,
                        const IndicatorPolynomial& p)
{
    double err = 0.0;
    for (SpectralIndex n : model.spectrum().present_indices())
        err = std::max(err, std::abs(p(model.spectrum().entry(n).value) - indicator(split, n)));
    return err;
}

/// Leja ordering keeps the Newton form well conditioned.
inline std::vector<std::size_t> leja_order(const std::vector<Complex>& nodes)
{
    std::vector<std::size_t> order;
    std::vector<bool> used(nodes.size(), false);
    std::vector<double> logprod(nodes.size(), 0.0);
    for (std::size_t step = 0; step < nodes.size(); ++step) {
        std::size_t best = nodes.size();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (used[i])
                continue;
            const double score = step == 0 ? std::abs(nodes[i]) : logprod[i];
            if (best == nodes.size() ||
                score > (step == 0 ? std::abs(nodes[best]) : logprod[best]))
                best = i;
        }
        used[best] = true;
        order.push_back(best);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (!used[i])
                logprod[i] += std::log(std::abs(nodes[i] - nodes[best]));
    }
    return order;
}

struct Disk
{
    Complex center{};
    double radius = 0.0;
};

inline Disk enclosing_disk(const CompactNormalModel& model, const std::vector<SpectralIndex>& group)
{
    Complex centroid(0.0);
    for (SpectralIndex n : group)
        centroid += model.spectrum().entry(n).value;
    centroid /= static_cast<double>(group.size());
    double radius = 0.0;
    for (SpectralIndex n : group)
        radius = std::max(radius, std::abs(model.spectrum().entry(n).value - centroid));
    return {centroid, radius};
}

/// Vogel spiral: `count` points evenly covering the disk.
inline void sample_disk(const Disk& disk, int count, std::vector<Complex>& out)
{
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < count; ++j) {
        const double r = disk.radius * std::sqrt((j + 0.5) / count);
        out.push_back(disk.center + std::polar(r, golden * j));
    }
}

inline std::vector<Complex> lagrange_coefficients(const std::vector<Complex>& nodes,
                                                  const std::vector<double>& values)
{
    const auto order = leja_order(nodes);
    const std::size_t m = nodes.size();
    std::vector<Complex> x(m);
    std::vector<Complex> dd(m);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = nodes[order[i]];
        dd[i] = values[order[i]];
    }
    for (std::size_t level = 1; level < m; ++level)
        for (std::size_t i = m - 1; i >= level; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - level]);

    // Newton form to monomials: p = dd[m-1]; p = p (z - x_k) + dd[k].
    std::vector<Complex> coeffs{dd[m - 1]};
    for (std::size_t k = m - 1; k-- > 0;) {
        std::vector<Complex> next(coeffs.size() + 1, Complex(0.0));
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            next[j + 1] += coeffs[j];
            next[j] -= x[k] * coeffs[j];
        }
        next[0] += dd[k];
        coeffs = std::move(next);
    }
    return coeffs;
}

} // namespace detail

inline IndicatorPolynomial indicator_polynomial(const CompactNormalModel& model,
                                                const SpectrumSplit& split,
                                                const PolynomialMethod& method)
{
    if (!(split.gap > 0.0))
        throw InseparableSpectrum("gap must be positive");
    IndicatorPolynomial p;
    p.target = split;

    if (std::holds_alternative<Lagrange>(method)) {
        std::vector<Complex> nodes;
        std::vector<double> values;
        for (SpectralIndex n : model.spectrum().present_indices()) {
            nodes.push_back(model.spectrum().entry(n).value);
            values.push_back(detail::indicator(split, n));
        }
        p.coefficients = detail::lagrange_coefficients(nodes, values);
    } else {
        const auto& ls = std::get<LeastSquares>(method);
        if (ls.degree < 0 || ls.sample_count < ls.degree + 1)
            throw InvalidArgument("least squares needs sample_count > degree >= 0");
        auto d1 = detail::enclosing_disk(model, split.sigma1);
        std::vector<Complex> samples;
        std::vector<double> targets;
        if (split.sigma2.empty()) {
            d1.radius = std::max(d1.radius, std::max(model.norm(), 1.0)) * 1.1;
            detail::sample_disk(d1, ls.sample_count, samples);
            targets.assign(samples.size(), 1.0);
        } else {
            auto d2 = detail::enclosing_disk(model, split.sigma2);
            const double clearance = std::abs(d1.center - d2.center) - d1.radius - d2.radius;
            if (!(clearance > 0.0))
                throw InseparableSpectrum("the enclosing disks of the two groups overlap");
            d1.radius += clearance / 4.0;
            d2.radius += clearance / 4.0;
            const int half = ls.sample_count / 2;
            detail::sample_disk(d1, half, samples);
            targets.assign(samples.size(), 1.0);
            detail::sample_disk(d2, ls.sample_count - half, samples);
            targets.resize(samples.size(), 0.0);
        }
        double s = 0.0;
        for (const auto& z : samples)
            s = std::max(s, std::abs(z));
        if (s == 0.0)
            s = 1.0;
        const Index rows = static_cast<Index>(samples.size());
        Matrix vander(rows, ls.degree + 1);
        Vector rhs(rows);
        for (Index i = 0; i < rows; ++i) {
            Complex zk(1.0);
            const Complex zs = samples[static_cast<std::size_t>(i)] / s;
            for (int k = 0; k <= ls.degree; ++k) {
                vander(i, k) = zk;
                zk *= zs;
            }
            rhs(i) = targets[static_cast<std::size_t>(i)];
        }
        const Vector scaled = vander.colPivHouseholderQr().solve(rhs);
        p.coefficients.resize(static_cast<std::size_t>(ls.degree) + 1);
        for (int k = 0; k <= ls.degree; ++k)
            p.coefficients[static_cast<std::size_t>(k)] = scaled(k) / std::pow(s, k);
    }
    p.sup_error = detail::sup_error(model, split, p);
    return p;
}

/// 1 - p, which approximates the indicator of sigma2.
inline IndicatorPolynomial complement(const CompactNormalModel& model, const IndicatorPolynomial& p)
{
    IndicatorPolynomial q;
    q.coefficients = p.coefficients;
    for (auto& c : q.coefficients)
        c = -c;
    q.coefficients[0] += 1.0;
    q.target = SpectrumSplit{p.target.sigma2, p.target.sigma1, p.target.gap};
    q.sup_error = detail::sup_error(model, q.target, q);
    return q;
}

/// p(A) v by Horner's rule with repeated applications of A.
inline Vector apply_polynomial(const CompactNormalModel& model, const IndicatorPolynomial& p,
                               const Vector& v)
{
    if (v.size() != model.dim())
        throw DimensionError("vector has the wrong dimension");
    if (p.coefficients.empty())
        return Vector::Zero(v.size());
    Vector acc = p.coefficients.back() * v;
    for (auto it = p.coefficients.rbegin() + 1; it != p.coefficients.rend(); ++it)
        acc = model.apply(acc) + *it * v;
    return acc;
}

/// Dense p(A) by Horner's rule on the assembled matrix.
inline Matrix dense_polynomial(const CompactNormalModel& model, const IndicatorPolynomial& p)
{
    const Matrix a = model.dense();
    const Index n = model.dim();
    if (p.coefficients.empty())
        return Matrix::Zero(n, n);
    Matrix acc = p.coefficients.back() * Matrix::Identity(n, n);
    for (auto it = p.coefficients.rbegin() + 1; it != p.coefficients.rend(); ++it) {
        acc = a * acc;
        acc.diagonal().array() += *it;
    }
    return acc;
}

struct ProjectionError
{
    double spectral = 0.0; // max_n |p(lambda_n) - chi(lambda_n)|
    double dense = 0.0;    // ||p(A) - P_sigma1||_2 on assembled matrices
    bool consistent(double tol = 1e-9) const { return std::abs(spectral - dense) <= tol; }
};

/// ||p(A) - P_sigma1||_2, which for normal A is the largest error of p on
/// the spectrum; cross-checked by a dense 2-norm evaluation.
inline ProjectionError projection_approx_error(const CompactNormalModel& model,
                                               const IndicatorPolynomial& p)
{
    ProjectionError err;
    err.spectral = detail::sup_error(model, p.target, p);
    Matrix target = Matrix::Zero(model.dim(), model.dim());
    for (SpectralIndex n : p.target.sigma1)
        target += model.dense_projection(n);
    err.dense = spectral_norm(dense_polynomial(model, p) - target);
    return err;
}

} // namespace krylovlab
