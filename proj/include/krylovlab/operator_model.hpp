#pragma once

// Finite truncations A = sum_n lambda_n P_n of compact normal operators.
//
// A model is U D U* with U unitary and D diagonal. Every coordinate of D
// belongs to exactly one spectral index n; index 0 is the kernel block
// (lambda_0 = 0), indices n >= 1 carry the distinct non-zero eigenvalues
// enumerated by non-increasing modulus.

#include <krylovlab/errors.hpp>
#include <krylovlab/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace krylovlab {

using SpectralIndex = int;

struct SpectrumEntry
{
    SpectralIndex index = 0;
    Complex value{};
    int multiplicity = 0;

    friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

/// Enumeration order of non-zero eigenvalues: modulus non-increasing,
/// ties broken by ascending phase in (-pi, pi].
inline bool spectral_order(Complex a, Complex b)
{
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb)
        return ma > mb;
    return std::arg(a) < std::arg(b);
}

/// Distinct eigenvalues with multiplicities. entries[0] is always the
/// kernel entry (index 0, value 0, multiplicity = dim ker A, possibly 0);
/// entries[k] has index k for k >= 1.
class SpectrumSpec
{
public:
    SpectrumSpec() : entries_{SpectrumEntry{0, Complex(0.0), 0}} {}

    /// Validates and takes ownership of an entry list.
    explicit SpectrumSpec(std::vector<SpectrumEntry> entries) : entries_(std::move(entries))
    {
        validate();
    }

    /// Builds a spectrum from (eigenvalue, multiplicity) pairs, sorting
    /// them into the canonical enumeration. Zero eigenvalues are folded
    /// into the kernel entry.
    static SpectrumSpec from_eigenvalues(const std::vector<std::pair<Complex, int>>& values,
                                         int kernel_dim = 0)
    {
        std::vector<std::pair<Complex, int>> nonzero;
        for (const auto& [value, mult] : values) {
            if (value == Complex(0.0))
                kernel_dim += mult;
            else
                nonzero.emplace_back(value, mult);
        }
        std::sort(nonzero.begin(), nonzero.end(),
                  [](const auto& a, const auto& b) { return spectral_order(a.first, b.first); });
        std::vector<SpectrumEntry> entries{SpectrumEntry{0, Complex(0.0), kernel_dim}};
        for (std::size_t k = 0; k < nonzero.size(); ++k)
            entries.push_back(SpectrumEntry{static_cast<SpectralIndex>(k + 1), nonzero[k].first,
                                            nonzero[k].second});
        return SpectrumSpec(std::move(entries));
    }

    const std::vector<SpectrumEntry>& entries() const { return entries_; }

    /// Truncation dimension N = sum of multiplicities.
    Index dim() const
    {
        Index n = 0;
        for (const auto& e : entries_)
            n += e.multiplicity;
        return n;
    }

    int kernel_dim() const { return entries_.front().multiplicity; }

    /// Number of distinct non-zero eigenvalues.
    int count() const { return static_cast<int>(entries_.size()) - 1; }

    bool contains(SpectralIndex n) const
    {
        return n >= 0 && n < static_cast<SpectralIndex>(entries_.size());
    }

    const SpectrumEntry& entry(SpectralIndex n) const
    {
        if (!contains(n))
            throw IndexError("spectral index " + std::to_string(n) + " not in S");
        return entries_[static_cast<std::size_t>(n)];
    }

    /// Indices whose eigenspace is non-trivial (the kernel index only when
    /// dim ker A > 0).
    std::vector<SpectralIndex> present_indices() const
    {
        std::vector<SpectralIndex> out;
        for (const auto& e : entries_)
            if (e.multiplicity > 0)
                out.push_back(e.index);
        return out;
    }

    /// Spectral radius, which equals the operator norm for normal A.
    double max_modulus() const
    {
        double m = 0.0;
        for (const auto& e : entries_)
            if (e.multiplicity > 0)
                m = std::max(m, std::abs(e.value));
        return m;
    }

    bool simple() const
    {
        return std::all_of(entries_.begin() + 1, entries_.end(),
                           [](const SpectrumEntry& e) { return e.multiplicity == 1; });
    }

    friend bool operator==(const SpectrumSpec&, const SpectrumSpec&) = default;

private:
    void validate() const
    {
        if (entries_.empty())
            throw InvalidArgument("spectrum must contain the kernel entry");
        const auto& kernel = entries_.front();
        if (kernel.index != 0 || kernel.value != Complex(0.0) || kernel.multiplicity < 0)
            throw InvalidArgument("entry 0 must be the kernel entry with lambda_0 = 0");
        for (std::size_t k = 1; k < entries_.size(); ++k) {
            const auto& e = entries_[k];
            if (e.index != static_cast<SpectralIndex>(k))
                throw InvalidArgument("spectral indices must be 0, 1, 2, ... in order");
            if (e.value == Complex(0.0))
                throw InvalidArgument("lambda_n must be non-zero for n >= 1");
            if (e.multiplicity < 1)
                throw InvalidArgument("multiplicity must be positive for n >= 1");
            if (k >= 2 && spectral_order(e.value, entries_[k - 1].value))
                throw InvalidArgument("eigenvalues must be sorted by non-increasing modulus");
            for (std::size_t j = 1; j < k; ++j)
                if (entries_[j].value == e.value)
                    throw DegenerateSpectrum("eigenvalues must be pairwise distinct");
        }
        if (dim() < 1)
            throw InvalidArgument("truncation dimension must be positive");
    }

    std::vector<SpectrumEntry> entries_;
};

// --- spectrum families -----------------------------------------------------

struct PowerDecay
{
    double alpha = 1.0;
};

struct ExpDecay
{
    double rho = 0.5;
};

struct RandomAnnulus
{
    double r_min = 0.1;
    double r_max = 1.0;
};

/// |lambda_n| = n^-alpha, rho^(n-1), or uniform-in-area on an annulus.
using SpectrumFamily = std::variant<PowerDecay, ExpDecay, RandomAnnulus>;

inline std::string family_name(const SpectrumFamily& family)
{
    struct Visitor
    {
        std::string operator()(const PowerDecay&) const { return "power_decay"; }
        std::string operator()(const ExpDecay&) const { return "exp_decay"; }
        std::string operator()(const RandomAnnulus&) const { return "random_annulus"; }
    };
    return std::visit(Visitor{}, family);
}

/// Largest modulus discarded by truncating a decay family after `count`
/// eigenvalues; empty for the annulus family, which has no tail.
inline std::optional<double> truncation_tail(const SpectrumFamily& family, int count)
{
    if (const auto* p = std::get_if<PowerDecay>(&family))
        return std::pow(static_cast<double>(count + 1), -p->alpha);
    if (const auto* e = std::get_if<ExpDecay>(&family))
        return std::pow(e->rho, static_cast<double>(count));
    return std::nullopt;
}

inline SpectrumSpec generate_spectrum(const SpectrumFamily& family, int count, int kernel_dim,
                                      std::uint64_t seed)
{
    if (count < 1)
        throw InvalidArgument("count must be at least 1");
    if (kernel_dim < 0)
        throw InvalidArgument("kernel_dim must be non-negative");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> modulus(static_cast<std::size_t>(count));
    std::vector<double> phase(static_cast<std::size_t>(count));

    if (const auto* p = std::get_if<PowerDecay>(&family)) {
        if (!(p->alpha > 0.0))
            throw InvalidArgument("power_decay needs alpha > 0");
        for (int n = 1; n <= count; ++n)
            modulus[n - 1] = std::pow(static_cast<double>(n), -p->alpha);
    } else if (const auto* e = std::get_if<ExpDecay>(&family)) {
        if (!(e->rho > 0.0 && e->rho < 1.0))
            throw InvalidArgument("exp_decay needs 0 < rho < 1");
        for (int n = 1; n <= count; ++n)
            modulus[n - 1] = std::pow(e->rho, static_cast<double>(n - 1));
    } else {
        const auto& a = std::get<RandomAnnulus>(family);
        if (!(a.r_min > 0.0 && a.r_min < a.r_max))
            throw InvalidArgument("random_annulus needs 0 < r_min < r_max");
        const double lo = a.r_min * a.r_min;
        const double hi = a.r_max * a.r_max;
        for (auto& m : modulus)
            m = std::clamp(std::sqrt(lo + (hi - lo) * unit(rng)), a.r_min, a.r_max);
    }
    for (auto& t : phase)
        t = 2.0 * kPi * unit(rng);

    std::vector<Complex> values(static_cast<std::size_t>(count));
    for (std::size_t k = 0; k < values.size(); ++k)
        values[k] = std::polar(modulus[k], phase[k]);

    // Collisions are resolved by a deterministic phase nudge, never merged.
    auto collides = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j)
            if (std::abs(values[j] - values[k]) <=
                1e-14 * std::max(std::abs(values[j]), std::abs(values[k])))
                return true;
        return false;
    };
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (!collides(k))
            continue;
        phase[k] += 2.0 * kPi * 1e-6 * static_cast<double>(k + 1);
        values[k] = std::polar(modulus[k], phase[k]);
        if (collides(k))
            throw DegenerateSpectrum("eigenvalue collision persists after phase perturbation");
    }

    std::vector<std::pair<Complex, int>> pairs;
    pairs.reserve(values.size());
    for (const auto& v : values)
        pairs.emplace_back(v, 1);
    return SpectrumSpec::from_eigenvalues(pairs, kernel_dim);
}

// --- the model -------------------------------------------------------------

struct Conjugation
{
    enum class Kind { diagonal, haar_unitary };
    Kind kind = Kind::diagonal;
    std::uint64_t seed = 0;

    static Conjugation diagonal() { return {}; }
    static Conjugation haar(std::uint64_t seed) { return {Kind::haar_unitary, seed}; }

    friend bool operator==(const Conjugation&, const Conjugation&) = default;
};

/// Orthonormal columns spanning ran P_n.
struct EigenProjection
{
    SpectralIndex index = 0;
    Matrix columns;
};

/// Residuals of the structural invariants of a model.
struct ModelDiagnostics
{
    double unitarity = 0.0;     // ||U*U - I||_max
    double commutator = 0.0;    // ||AA* - A*A||_2
    double resolution = 0.0;    // ||sum_n P_n - I||_max
    double orthogonality = 0.0; // max_{n != m} ||P_n P_m||_max
    double reconstruction = 0.0; // ||A - sum_n lambda_n P_n||_2
};

/// Immutable normal matrix A = U D U* with its eigenstructure.
class CompactNormalModel
{
public:
    CompactNormalModel(SpectrumSpec spectrum, Conjugation conjugation, Matrix basis,
                       std::vector<SpectralIndex> block_index)
        : spectrum_(std::move(spectrum)),
          conjugation_(conjugation),
          basis_(std::move(basis)),
          block_index_(std::move(block_index))
    {
        const Index n = spectrum_.dim();
        if (basis_.rows() != n || basis_.cols() != n)
            throw DimensionError("basis must be N x N");
        if (static_cast<Index>(block_index_.size()) != n)
            throw DimensionError("block_index must have N entries");
        diagonal_.resize(n);
        blocks_.assign(spectrum_.entries().size(), {});
        for (Index i = 0; i < n; ++i) {
            const SpectralIndex k = block_index_[static_cast<std::size_t>(i)];
            diagonal_(i) = spectrum_.entry(k).value;
            blocks_[static_cast<std::size_t>(k)].push_back(i);
        }
        for (const auto& e : spectrum_.entries())
            if (static_cast<int>(blocks_[static_cast<std::size_t>(e.index)].size()) != e.multiplicity)
                throw InvalidArgument("block sizes must match multiplicities");
    }

    /// Diagonal model diag(values) in the given coordinate order; equal
    /// values share one spectral index.
    static CompactNormalModel from_diagonal(const std::vector<Complex>& values)
    {
        std::vector<std::pair<Complex, int>> distinct;
        for (const auto& v : values) {
            auto it = std::find_if(distinct.begin(), distinct.end(),
                                   [&](const auto& p) { return p.first == v; });
            if (it == distinct.end())
                distinct.emplace_back(v, 1);
            else
                ++it->second;
        }
        SpectrumSpec spectrum = SpectrumSpec::from_eigenvalues(distinct);
        std::vector<SpectralIndex> block(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            for (const auto& e : spectrum.entries())
                if (e.value == values[i] && (e.index != 0 || e.multiplicity > 0))
                    block[i] = e.index;
        const auto n = static_cast<Index>(values.size());
        return CompactNormalModel(std::move(spectrum), Conjugation::diagonal(),
                                  Matrix::Identity(n, n), std::move(block));
    }

    Index dim() const { return diagonal_.size(); }
    const SpectrumSpec& spectrum() const { return spectrum_; }
    const Conjugation& conjugation() const { return conjugation_; }
    bool is_diagonal() const { return conjugation_.kind == Conjugation::Kind::diagonal; }
    const Matrix& basis() const { return basis_; }
    const std::vector<SpectralIndex>& block_index() const { return block_index_; }
    /// Eigenvalue attached to each coordinate, i.e. diag(D).
    const Vector& coordinate_eigenvalues() const { return diagonal_; }
    /// ||A||_2 = spectral radius.
    double norm() const { return spectrum_.max_modulus(); }

    const std::vector<Index>& block(SpectralIndex n) const
    {
        if (!spectrum_.contains(n))
            throw IndexError("spectral index " + std::to_string(n) + " not in S");
        return blocks_[static_cast<std::size_t>(n)];
    }

    /// U* v.
    Vector to_eigencoordinates(const Vector& v) const
    {
        check_dim(v);
        if (is_diagonal())
            return v;
        return basis_.adjoint() * v;
    }

    /// U c.
    Vector from_eigencoordinates(const Vector& c) const
    {
        check_dim(c);
        if (is_diagonal())
            return c;
        return basis_ * c;
    }

    /// f(A) v = U f(D) U* v for a scalar function of the eigenvalue.
    template <typename F>
    Vector apply_function(F&& f, const Vector& v) const
    {
        Vector c = to_eigencoordinates(v);
        for (Index i = 0; i < c.size(); ++i)
            c(i) *= f(diagonal_(i));
        return from_eigencoordinates(c);
    }

    Vector apply(const Vector& v) const
    {
        check_dim(v);
        if (is_diagonal())
            return diagonal_.cwiseProduct(v);
        return basis_ * diagonal_.cwiseProduct(basis_.adjoint() * v);
    }

    Vector apply_adjoint(const Vector& v) const
    {
        check_dim(v);
        if (is_diagonal())
            return diagonal_.conjugate().cwiseProduct(v);
        return basis_ * diagonal_.conjugate().cwiseProduct(basis_.adjoint() * v);
    }

    /// P_n v. Index 0 is always in S; P_0 = 0 for injective A.
    Vector eigenprojection_apply(SpectralIndex n, const Vector& v) const
    {
        const auto& coords = block(n);
        Vector c = to_eigencoordinates(v);
        Vector masked = Vector::Zero(dim());
        for (Index i : coords)
            masked(i) = c(i);
        return from_eigencoordinates(masked);
    }

    EigenProjection eigenprojection(SpectralIndex n) const
    {
        const auto& coords = block(n);
        Matrix cols(dim(), static_cast<Index>(coords.size()));
        for (std::size_t k = 0; k < coords.size(); ++k)
            cols.col(static_cast<Index>(k)) = basis_.col(coords[k]);
        return EigenProjection{n, std::move(cols)};
    }

    /// (A - z)^-1 v = sum_n (lambda_n - z)^-1 P_n v.
    Vector resolvent_apply(Complex z, const Vector& v) const
    {
        check_dim(v);
        for (SpectralIndex n : spectrum_.present_indices())
            if (std::abs(spectrum_.entry(n).value - z) <= 1e-12)
                throw SpectrumHit("z lies on the eigenvalue with index " + std::to_string(n));
        return apply_function([z](Complex lambda) { return 1.0 / (lambda - z); }, v);
    }

    /// dist(z, sigma(A)).
    double distance_to_spectrum(Complex z) const
    {
        double d = std::numeric_limits<double>::infinity();
        for (SpectralIndex n : spectrum_.present_indices())
            d = std::min(d, std::abs(spectrum_.entry(n).value - z));
        return d;
    }

    /// Assembled U D U*.
    Matrix dense() const
    {
        if (is_diagonal())
            return diagonal_.asDiagonal().toDenseMatrix();
        return basis_ * diagonal_.asDiagonal() * basis_.adjoint();
    }

    /// Assembled P_n = U B_n U*.
    Matrix dense_projection(SpectralIndex n) const
    {
        const Matrix cols = eigenprojection(n).columns;
        return cols * cols.adjoint();
    }

    ModelDiagnostics diagnose() const
    {
        ModelDiagnostics d;
        const Index n = dim();
        const Matrix gram = basis_.adjoint() * basis_;
        d.unitarity = (gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
        const Matrix a = dense();
        d.commutator = spectral_norm(a * a.adjoint() - a.adjoint() * a);
        d.resolution = (basis_ * basis_.adjoint() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
        // P_n P_m = U_n (U_n* U_m) U_m*, so the off-block entries of U*U
        // bound every pairwise product.
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (block_index_[static_cast<std::size_t>(i)] != block_index_[static_cast<std::size_t>(j)])
                    d.orthogonality = std::max(d.orthogonality, std::abs(gram(i, j)));
        Matrix sum = Matrix::Zero(n, n);
        for (SpectralIndex k : spectrum_.present_indices())
            if (k != 0)
                sum += spectrum_.entry(k).value * dense_projection(k);
        d.reconstruction = spectral_norm(a - sum);
        return d;
    }

private:
    void check_dim(const Vector& v) const
    {
        if (v.size() != dim())
            throw DimensionError("vector of size " + std::to_string(v.size()) +
                                 " for an operator of dimension " + std::to_string(dim()));
    }

    SpectrumSpec spectrum_;
    Conjugation conjugation_;
    Matrix basis_;
    std::vector<SpectralIndex> block_index_;
    Vector diagonal_;
    std::vector<std::vector<Index>> blocks_;
};

/// Lays the eigenspaces out as contiguous coordinate blocks, indices
/// 1, 2, ... first and the kernel block last, then conjugates by U.
inline CompactNormalModel build_model(const SpectrumSpec& spectrum, Conjugation conjugation)
{
    const Index n = spectrum.dim();
    std::vector<SpectralIndex> block;
    block.reserve(static_cast<std::size_t>(n));
    for (const auto& e : spectrum.entries())
        if (e.index != 0)
            block.insert(block.end(), static_cast<std::size_t>(e.multiplicity), e.index);
    block.insert(block.end(), static_cast<std::size_t>(spectrum.kernel_dim()), 0);
    Matrix basis = conjugation.kind == Conjugation::Kind::diagonal
                       ? Matrix(Matrix::Identity(n, n))
                       : haar_unitary(n, conjugation.seed);
    return CompactNormalModel(spectrum, conjugation, std::move(basis), std::move(block));
}

} // namespace krylovlab
