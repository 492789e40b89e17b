#pragma once

// The explicit Krylov solution f = sum_{n>=1} lambda_n^-1 P_n g of Af = g
// for compact normal A, and certificates for its properties: Krylov
// membership, norm minimality, uniqueness, the structure of K(A, g),
// K(A, g)-reducibility and cyclicity.

#include <krylovlab/errors.hpp>
#include <krylovlab/krylov.hpp>
#include <krylovlab/linalg.hpp>
#include <krylovlab/operator_model.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace krylovlab {

/// P_0 g must vanish to this relative tolerance for g to lie in ran A.
inline constexpr double kRangeTol = 1e-12;
/// Spectral components with ||P_n g|| below this fraction of ||g|| are
/// treated as absent.
inline constexpr double kActiveTol = 1e-12;
/// Active eigenvalues smaller than this fraction of ||A|| raise a
/// conditioning warning.
inline constexpr double kConditioningTol = 1e-8;

/// Indices n with ||P_n g|| > kActiveTol * ||g||, in index order.
inline std::vector<SpectralIndex> active_indices(const CompactNormalModel& model, const Vector& g,
                                                 double tol = kActiveTol)
{
    std::vector<SpectralIndex> out;
    const double gnorm = g.norm();
    if (gnorm == 0.0)
        return out;
    const Vector c = model.to_eigencoordinates(g);
    for (SpectralIndex n : model.spectrum().present_indices()) {
        double sq = 0.0;
        for (Index i : model.block(n))
            sq += std::norm(c(i));
        if (std::sqrt(sq) > tol * gnorm)
            out.push_back(n);
    }
    return out;
}

enum class SolutionStatus { solved };

struct KrylovSolutionReport
{
    SolutionStatus status = SolutionStatus::solved;
    Vector solution;
    double residual = 0.0;           // ||A f - g||
    double norm = 0.0;               // ||f||
    double kernel_component = 0.0;   // ||P_0 f||
    double distance_in_krylov = 0.0; // dist(f, K_d(A, g))
    Index krylov_dim = 0;
    std::vector<SpectralIndex> active_indices;
    /// max |lambda| / min active |lambda|; the finite-scale shadow of the
    /// summability condition sum |lambda_n|^-2 ||P_n g||^2 < inf.
    double condition = 1.0;
    std::vector<std::string> warnings;
};

inline KrylovSolutionReport krylov_solution(const CompactNormalModel& model, const Vector& g)
{
    if (g.size() != model.dim())
        throw DimensionError("datum has the wrong dimension");
    KrylovSolutionReport report;
    const double gnorm = g.norm();
    if (gnorm == 0.0) {
        report.solution = Vector::Zero(model.dim());
        return report;
    }

    const Vector c = model.to_eigencoordinates(g);
    double kernel_sq = 0.0;
    for (Index i : model.block(0))
        kernel_sq += std::norm(c(i));
    if (std::sqrt(kernel_sq) > kRangeTol * gnorm)
        throw DatumNotInRange("||P_0 g|| = " + std::to_string(std::sqrt(kernel_sq)) +
                              " exceeds the range-membership tolerance");

    Vector fc(c.size());
    const Vector& lambda = model.coordinate_eigenvalues();
    for (Index i = 0; i < c.size(); ++i)
        fc(i) = model.block_index()[static_cast<std::size_t>(i)] == 0 ? Complex(0.0) : c(i) / lambda(i);
    report.solution = model.from_eigencoordinates(fc);

    report.norm = report.solution.norm();
    report.residual = (model.apply(report.solution) - g).norm();
    report.kernel_component = model.eigenprojection_apply(0, report.solution).norm();
    report.active_indices = active_indices(model, g);

    double min_active = std::numeric_limits<double>::infinity();
    for (SpectralIndex n : report.active_indices)
        if (n != 0)
            min_active = std::min(min_active, std::abs(model.spectrum().entry(n).value));
    if (std::isfinite(min_active)) {
        report.condition = model.norm() / min_active;
        if (min_active < kConditioningTol * model.norm())
            report.warnings.push_back("ill-conditioned: min active |lambda| / ||A|| = " +
                                      std::to_string(min_active / model.norm()));
    }

    const KrylovBasis basis = arnoldi_to_termination(model, g);
    report.krylov_dim = basis.dim();
    report.distance_in_krylov = distance_to_krylov(basis, report.solution);
    return report;
}

struct CheckOutcome
{
    bool passed = false;
    double deviation = 0.0;
};

/// Pythagoras deviation |(||f+psi||^2 - ||f||^2 - ||psi||^2)| / (||f|| + ||psi||)^2.
inline double pythagoras_deviation(const Vector& f, const Vector& psi)
{
    const double scale = f.norm() + psi.norm();
    if (scale == 0.0)
        return 0.0;
    const double gap = (f + psi).squaredNorm() - f.squaredNorm() - psi.squaredNorm();
    return std::abs(gap) / (scale * scale);
}

/// Perturbs f by random kernel vectors and checks that every perturbation
/// is again a solution, orthogonal to f, and no shorter.
inline CheckOutcome minimal_norm_check(const CompactNormalModel& model,
                                       const KrylovSolutionReport& report, const Vector& g,
                                       int trials, std::uint64_t seed)
{
    CheckOutcome out{true, 0.0};
    if (model.spectrum().kernel_dim() == 0)
        return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    const Vector& f = report.solution;
    for (int t = 0; t < trials; ++t) {
        Vector psi = model.eigenprojection_apply(0, random_complex_vector(model.dim(), rng));
        psi *= scale(rng) * std::max(1.0, f.norm()) / std::max(psi.norm(), 1e-300);
        const Vector perturbed = f + psi;
        const double dev = pythagoras_deviation(f, psi);
        out.deviation = std::max(out.deviation, dev);
        const double bound = f.norm() + psi.norm();
        const double solve_err = (model.apply(perturbed) - g).norm();
        if (dev > 1e-10 || perturbed.norm() < f.norm() ||
            solve_err > 1e-10 * std::max(1.0, model.norm() * bound))
            out.passed = false;
    }
    return out;
}

struct UniquenessOutcome
{
    bool passed = false;
    double deviation = 0.0;          // ||f_K - f|| / ||f||
    double restricted_sigma_min = 0.0;
    double restricted_sigma_max = 0.0;
};

/// Solves min_y ||A Q y - g|| over the terminated Krylov basis Q and
/// checks that A Q has trivial kernel and Q y reproduces f.
inline UniquenessOutcome uniqueness_check(const CompactNormalModel& model, const Vector& g,
                                          const KrylovSolutionReport& report)
{
    UniquenessOutcome out;
    if (g.norm() == 0.0) {
        out.passed = report.solution.norm() == 0.0;
        return out;
    }
    const KrylovBasis basis = arnoldi_to_termination(model, g);
    const Matrix& q = basis.columns();
    Matrix aq(model.dim(), q.cols());
    for (Index j = 0; j < q.cols(); ++j)
        aq.col(j) = model.apply(q.col(j));
    Eigen::BDCSVD<Matrix> svd(aq, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    out.restricted_sigma_max = sigma(0);
    out.restricted_sigma_min = sigma(sigma.size() - 1);
    const double eps = std::numeric_limits<double>::epsilon();
    const bool nonsingular = out.restricted_sigma_min >
                             static_cast<double>(q.rows()) * eps * out.restricted_sigma_max;
    const Vector y = svd.solve(g);
    const Vector fk = q * y;
    const double fnorm = report.solution.norm();
    out.deviation = (fk - report.solution).norm() / (fnorm > 0.0 ? fnorm : 1.0);
    out.passed = nonsingular && out.deviation <= 1e-8;
    return out;
}

struct StructureOutcome
{
    double max_angle = 0.0;
    Index krylov_dim = 0;
    Index component_count = 0;
    bool passed() const { return max_angle <= 1e-8; }
};

/// Largest principal angle between the terminated Arnoldi span and
/// span{P_n g : P_n g != 0}.
inline StructureOutcome krylov_subspace_structure_check(const CompactNormalModel& model,
                                                        const Vector& g)
{
    const KrylovBasis basis = arnoldi_to_termination(model, g);
    const auto active = active_indices(model, g);
    Matrix components(model.dim(), static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k)
        components.col(static_cast<Index>(k)) = model.eigenprojection_apply(active[k], g);
    const Matrix spectral_basis = orthonormal_basis(components, 0.0);
    StructureOutcome out;
    out.krylov_dim = basis.dim();
    out.component_count = spectral_basis.cols();
    out.max_angle = max_principal_angle(basis.columns(), spectral_basis);
    return out;
}

/// dist(A* g, K(A, g)) / ||A* g||, 0 when A* g = 0.
inline double reducibility_residual(const CompactNormalModel& model, const Vector& g)
{
    const KrylovBasis basis = arnoldi_to_termination(model, g);
    const Vector adj = model.apply_adjoint(g);
    const double an = adj.norm();
    if (an == 0.0)
        return 0.0;
    return distance_to_krylov(basis, adj) / an;
}

struct InvarianceResiduals
{
    double range_leak = 0.0;      // ||(I - Pi) A Pi||_2 / ||A||
    double complement_leak = 0.0; // ||Pi A (I - Pi)||_2 / ||A||
};

/// Operator-norm residuals of A K subset K and A K^perp subset K^perp for
/// the Krylov projector Pi = Q Q*.
inline InvarianceResiduals invariance_residuals(const CompactNormalModel& model,
                                                const KrylovBasis& basis)
{
    const Matrix& q = basis.columns();
    Matrix aq(q.rows(), q.cols());
    Matrix adq(q.rows(), q.cols());
    for (Index j = 0; j < q.cols(); ++j) {
        aq.col(j) = model.apply(q.col(j));
        adq.col(j) = model.apply_adjoint(q.col(j));
    }
    // ||Pi A (I - Pi)|| = ||(I - Pi) A* Pi||.
    const Matrix leak = aq - q * (q.adjoint() * aq);
    const Matrix leak_adj = adq - q * (q.adjoint() * adq);
    const double scale = model.norm() > 0.0 ? model.norm() : 1.0;
    return {spectral_norm(leak) / scale, spectral_norm(leak_adj) / scale};
}

/// Vector-level version: ||(I - Pi) A Pi v|| and ||Pi A (I - Pi) v||.
inline InvarianceResiduals invariance_residuals(const CompactNormalModel& model,
                                                const KrylovBasis& basis, const Vector& v)
{
    const Matrix& q = basis.columns();
    auto project = [&](const Vector& x) -> Vector { return q * (q.adjoint() * x); };
    const Vector pv = project(v);
    const Vector a_pv = model.apply(pv);
    const Vector a_cv = model.apply(v - pv);
    return {(a_pv - project(a_pv)).norm(), project(a_cv).norm()};
}

/// g = phi_0 + sum_{n>=1} phi_n / n, with phi_n the unit eigenvectors
/// (phi_0 omitted when A is injective).
inline Vector cyclic_proof_vector(const CompactNormalModel& model)
{
    const auto& spectrum = model.spectrum();
    if (spectrum.kernel_dim() > 1 || !spectrum.simple())
        throw NotSimpleSpectrum("cyclic vector needs dim ker A <= 1 and simple eigenvalues");
    Vector g = Vector::Zero(model.dim());
    for (SpectralIndex n : spectrum.present_indices()) {
        const Vector phi = model.eigenprojection(n).columns.col(0);
        g += (n == 0 ? 1.0 : 1.0 / static_cast<double>(n)) * phi;
    }
    return g;
}

struct CyclicityOutcome
{
    bool passed = false;
    Index krylov_dim = 0;
    Index dim = 0;
};

inline CyclicityOutcome cyclicity_check(const CompactNormalModel& model)
{
    const Vector g = cyclic_proof_vector(model);
    CyclicityOutcome out;
    out.dim = model.dim();
    out.krylov_dim = krylov_dimension(model, g);
    out.passed = out.krylov_dim == out.dim;
    return out;
}

} // namespace krylovlab
