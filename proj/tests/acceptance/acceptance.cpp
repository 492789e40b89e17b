// Acceptance suite: one PASS/FAIL line per criterion.
//
// Oracles are computed here from the assembled dense matrices or from the
// known construction (U, D) of each model, never through the library routine
// under test.

#include <krylovlab/krylovlab.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace krylovlab;

namespace {

// Pinned tolerances.
constexpr double kResidualTol = 1e-10;      // ||A f - g|| / (||A|| ||f||)
constexpr double kKrylovDistanceTol = 1e-8; // dist(f, K) / ||f||
constexpr double kKernelTol = 1e-12;        // ||P_0 f|| / ||f||
constexpr double kAngleTol = 1e-8;          // radians
constexpr double kReducibilityTol = 1e-8;
constexpr double kInvarianceTol = 1e-8;     // operator-norm leak / ||A||
constexpr double kLagrangeTol = 1e-9;
constexpr double kQuadratureTol = 1e-10;
constexpr double kQuadratureRatio = 0.1;
constexpr double kQuadratureFloor = 1e-12;
constexpr double kMassTol = 1e-12;
constexpr double kMomentTol = 1e-10;
constexpr double kIsometryTol = 1e-9;
constexpr double kMembershipTol = 1e-8;
constexpr double kNormEqualityTol = 1e-10;
constexpr double kOracleTol = 1e-8;
constexpr double kBudget1 = 60.0; // seconds
constexpr double kBudget4 = 30.0;
constexpr double kBudget5 = 20.0;
constexpr double kBudget6 = 30.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

int g_failures = 0;

void verdict(int id, bool ok, const std::string& title, const std::string& detail)
{
    std::printf("[%s] criterion %d: %s | %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++g_failures;
}

// --- criteria 1, 2, 3, 7: the shared 100-case sweep -------------------------

struct SweepCase
{
    int id = 0;
    Index n = 0;
    SpectrumFamily family;
    int kernel_dim = 0;
    bool haar = false;
    std::uint64_t seed = 0;

    std::string label() const
    {
        return "#" + std::to_string(id) + " " + family_name(family) + " N=" + std::to_string(n) +
               " ker=" + std::to_string(kernel_dim) + (haar ? " haar" : " diag");
    }
};

std::vector<SweepCase> sweep_cases()
{
    const Index sizes[] = {16, 64, 256};
    const SpectrumFamily families[] = {PowerDecay{1.0}, ExpDecay{0.5}, RandomAnnulus{0.1, 1.0}};
    const int kernels[] = {0, 1, 3};
    std::vector<SweepCase> out;
    for (int i = 0; i < 100; ++i) {
        SweepCase c;
        c.id = i;
        c.n = sizes[i % 3];
        c.family = families[(i / 3) % 3];
        c.kernel_dim = kernels[(i / 9) % 3];
        c.haar = (i / 27) % 2 == 1 ? (i % 2 == 0) : (i % 2 == 1);
        c.seed = 1000 + static_cast<std::uint64_t>(i);
        out.push_back(c);
    }
    return out;
}

struct Worst
{
    double value = 0.0;
    std::string where;
    int violations = 0;
    std::vector<std::string> offenders;

    void add(double v, double tol, const std::string& label)
    {
        if (!(v <= tol)) {
            ++violations;
            offenders.push_back(label + " " + sci(v));
        }
        if (!(v <= value)) {
            value = v;
            where = label;
        }
    }
    std::string describe(const std::string& name) const
    {
        // ACCEPTANCE_VERBOSE=1 lists every violating case on stderr
        if (std::getenv("ACCEPTANCE_VERBOSE"))
            for (const auto& o : offenders)
                std::cerr << "  " << name << ": " << o << "\n";
        return name + " worst " + sci(value) + (violations ? " at " + where : "") + " (" +
               std::to_string(violations) + " over)";
    }
};

void criteria_1_2_3_7()
{
    double c1_seconds = 0.0; // model construction and krylov_solution only
    Worst residual, distance, kernel, angle, reducibility, leak, oracle;
    int solved = 0;
    int rejected = 0;

    for (const auto& c : sweep_cases()) {
        const auto t0 = Clock::now();
        const int count = static_cast<int>(c.n) - c.kernel_dim;
        const auto spectrum = generate_spectrum(c.family, count, c.kernel_dim, c.seed);
        const auto model = build_model(spectrum, c.haar ? Conjugation::haar(c.seed * 31 + 7)
                                                        : Conjugation::diagonal());
        const Matrix a = model.dense();
        const double anorm = spectral_norm(a); // oracle for ||A||

        std::mt19937_64 rng(c.seed * 977 + 5);
        const Vector g = a * random_complex_vector(model.dim(), rng); // g in ran A

        KrylovSolutionReport report;
        try {
            report = krylov_solution(model, g);
            c1_seconds += seconds_since(t0);
        } catch (const DatumNotInRange&) {
            c1_seconds += seconds_since(t0);
            ++rejected;
            residual.add(std::numeric_limits<double>::infinity(), kResidualTol, c.label());
            continue;
        }
        ++solved;
        const double fn = report.solution.norm();

        // Residual and kernel component recomputed from the dense matrix and
        // the known kernel columns of U (the kernel block sits last).
        const double res = (a * report.solution - g).norm();
        const Matrix ker = model.basis().rightCols(c.kernel_dim);
        const double kc = c.kernel_dim > 0 ? (ker.adjoint() * report.solution).norm() : 0.0;
        residual.add(res / (anorm * fn), kResidualTol, c.label());
        kernel.add(kc / fn, kKernelTol, c.label());
        distance.add(report.distance_in_krylov / fn, kKrylovDistanceTol, c.label());

        // Criterion 2: Arnoldi span vs span{P_n g}; P_n g from U's blocks.
        {
            const auto basis = arnoldi_to_termination(model, g);
            const Matrix& u = model.basis();
            const Vector coeff = u.adjoint() * g;
            std::vector<Vector> parts;
            Index offset = 0;
            std::vector<std::pair<Index, Index>> blocks; // (start, length)
            for (int n = 1; n <= spectrum.count(); ++n) {
                blocks.emplace_back(offset, spectrum.entry(n).multiplicity);
                offset += spectrum.entry(n).multiplicity;
            }
            blocks.emplace_back(offset, c.kernel_dim);
            for (auto [start, len] : blocks) {
                if (len == 0)
                    continue;
                const Vector part = u.middleCols(start, len) * coeff.segment(start, len);
                if (part.norm() > 1e-12 * g.norm())
                    parts.push_back(part);
            }
            Matrix comp(model.dim(), static_cast<Index>(parts.size()));
            for (std::size_t k = 0; k < parts.size(); ++k)
                comp.col(static_cast<Index>(k)) = parts[k];
            // Orthonormal basis of the component span by Householder QR;
            // the components are mutually orthogonal, so this is well posed.
            Eigen::HouseholderQR<Matrix> qr(comp);
            const Matrix spectral = qr.householderQ() * Matrix::Identity(model.dim(), comp.cols());
            angle.add(max_principal_angle(basis.columns(), spectral), kAngleTol,
                      c.label() + " d=" + std::to_string(basis.dim()) + " components=" +
                          std::to_string(parts.size()));

            // Criterion 3.
            const Vector adj = a.adjoint() * g;
            const Matrix& q = basis.columns();
            const Vector r1 = adj - q * (q.adjoint() * adj);
            const Vector r2 = r1 - q * (q.adjoint() * r1);
            reducibility.add(adj.norm() > 0 ? r2.norm() / adj.norm() : 0.0, kReducibilityTol, c.label());
            const Matrix aq = a * q;
            const Matrix adq = a.adjoint() * q;
            const double l1 = spectral_norm(aq - q * (q.adjoint() * aq)) / anorm;
            const double l2 = spectral_norm(adq - q * (q.adjoint() * adq)) / anorm;
            leak.add(std::max(l1, l2), kInvarianceTol, c.label());
        }

        // Criterion 7: dense minimum-norm least-squares oracle.
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
        oracle.add((cod.solve(g) - report.solution).norm() / fn, kOracleTol, c.label());
    }
    verdict(1, residual.violations + distance.violations + kernel.violations == 0 && rejected == 0 &&
                   c1_seconds < kBudget1,
            "Krylov solvability on 100 models",
            std::to_string(solved) + " solved, " + std::to_string(rejected) + " rejected; " +
                residual.describe("residual") + "; " + distance.describe("krylov distance") + "; " +
                kernel.describe("kernel") + "; " + sci(c1_seconds) + " s");
    verdict(2, angle.violations == 0, "Krylov span equals span{P_n g}", angle.describe("angle"));
    verdict(3, reducibility.violations + leak.violations == 0, "K(A,g)-reducibility",
            reducibility.describe("residual") + "; " + leak.describe("invariance leak"));
    verdict(7, oracle.violations == 0, "pseudoinverse oracle agreement", oracle.describe("deviation"));
}

// --- criterion 4 ------------------------------------------------------------

struct ClusterModel
{
    CompactNormalModel model;
    std::vector<Complex> diagonal;  // D, coordinate order
    std::vector<bool> in_sigma1;    // per coordinate
    std::vector<SpectralIndex> sigma1;
};

/// Two clusters of simple or double eigenvalues around c and -c (rotated),
/// scaled so that ||A|| <= 1 and the gap exceeds 0.2 ||A||.
ClusterModel two_cluster_model(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int per = 3 + static_cast<int>(seed % 4); // 3..6 per cluster
    const double centre = 0.5 + 0.2 * unit(rng);
    const double spread = 0.12;
    const Complex rot = std::polar(1.0, 2.0 * kPi * unit(rng));

    std::vector<std::pair<Complex, int>> values;
    auto draw = [&](Complex c) {
        for (;;) {
            const Complex z = c + std::polar(spread * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
            bool clear = true;
            for (const auto& [v, m] : values)
                clear = clear && std::abs(v - z) > 0.02;
            if (clear)
                return z;
        }
    };
    for (int k = 0; k < per; ++k) {
        values.emplace_back(draw(rot * centre), 1 + (k == 0 && seed % 2 ? 1 : 0));
        values.emplace_back(draw(-rot * centre), 1);
    }
    const int kernel = static_cast<int>(seed % 3 == 0);
    if (kernel)
        values.emplace_back(Complex(0.0), 1);
    const auto spectrum = SpectrumSpec::from_eigenvalues(values);

    // U and D built here; the model is assembled from them so the oracle
    // projection U_S U_S* uses only (U, D).
    const Index n = spectrum.dim();
    const Matrix u = haar_unitary(n, seed * 13 + 1);
    std::vector<SpectralIndex> block;
    std::vector<Complex> diag;
    for (const auto& e : spectrum.entries())
        for (int k = 0; k < e.multiplicity; ++k) {
            block.push_back(e.index);
            diag.push_back(e.value);
        }
    ClusterModel out{CompactNormalModel(spectrum, Conjugation::haar(seed * 13 + 1), u, block), diag, {}, {}};
    for (const auto& z : diag)
        out.in_sigma1.push_back(std::abs(z - rot * centre) < std::abs(z + rot * centre));
    for (const auto& e : spectrum.entries())
        if (e.multiplicity > 0 && std::abs(e.value - rot * centre) < std::abs(e.value + rot * centre))
            out.sigma1.push_back(e.index);
    return out;
}

void criterion_4()
{
    const auto t0 = Clock::now();
    Worst lagrange, dense_mismatch, quadrature, ratio, gap_margin;
    int ls_non_decreasing = 0;
    std::string ls_where;
    int evaluated = 0;

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto cm = two_cluster_model(seed);
        const auto& m = cm.model;
        const Index n = m.dim();
        const Matrix a = m.dense();
        const double anorm = spectral_norm(a);
        const std::string label = "seed " + std::to_string(seed);

        // Gap oracle from D.
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cm.diagonal.size(); ++i)
            for (std::size_t j = 0; j < cm.diagonal.size(); ++j)
                if (cm.in_sigma1[i] && !cm.in_sigma1[j])
                    gap = std::min(gap, std::abs(cm.diagonal[i] - cm.diagonal[j]));
        gap_margin.add(0.2 * anorm / gap, 1.0, label); // <= 1 iff gap >= 0.2 ||A||

        Matrix u_s(n, 0);
        for (Index i = 0; i < n; ++i)
            if (cm.in_sigma1[static_cast<std::size_t>(i)]) {
                u_s.conservativeResize(Eigen::NoChange, u_s.cols() + 1);
                u_s.col(u_s.cols() - 1) = m.basis().col(i);
            }
        const Matrix p_exact = u_s * u_s.adjoint();

        const auto split = make_split(m, cm.sigma1);

        // Lagrange: operator-norm error measured on the dense p(A).
        const auto p = indicator_polynomial(m, split, Lagrange{});
        const double dense_err = spectral_norm(dense_polynomial(m, p) - p_exact);
        lagrange.add(dense_err, kLagrangeTol, label + " degree " + std::to_string(p.degree()));
        dense_mismatch.add(std::abs(projection_approx_error(m, p).spectral - dense_err), 1e-9, label);

        // Least squares at degrees 4, 8, 16.
        double prev = std::numeric_limits<double>::infinity();
        std::string seq;
        bool decreasing = true;
        for (int degree : {4, 8, 16}) {
            const auto q = indicator_polynomial(m, split, LeastSquares{degree, 512});
            const double err = spectral_norm(dense_polynomial(m, q) - p_exact);
            seq += (seq.empty() ? "" : ">") + sci(err);
            decreasing = decreasing && err < prev;
            prev = err;
        }
        if (!decreasing) {
            ++ls_non_decreasing;
            ls_where = label + " " + seq;
        }

        // Contour quadrature against U_S U_S* v.
        std::mt19937_64 rng(seed + 500);
        const Vector v = random_complex_vector(n, rng);
        const Vector exact = p_exact * v;
        const auto contour = auto_contour(m, split);
        const auto result = riesz_projection_auto(m, contour, v);
        quadrature.add((result.value - exact).norm() / v.norm(), kQuadratureTol,
                       label + " K=" + std::to_string(result.nodes_per_circle));

        double prev_err = -1.0;
        for (int k = 4; k <= 128; k *= 2) {
            auto c = contour;
            c.nodes_per_circle = k;
            const double err = (riesz_projection_quadrature(m, c, v) - exact).norm() / v.norm();
            if (prev_err > kQuadratureFloor && err > kQuadratureFloor)
                ratio.add(err / prev_err, kQuadratureRatio, label + " K=" + std::to_string(k));
            prev_err = err;
        }
        ++evaluated;
    }
    const double elapsed = seconds_since(t0);
    const bool ok = lagrange.violations + dense_mismatch.violations + quadrature.violations +
                            ratio.violations + gap_margin.violations + ls_non_decreasing ==
                        0 &&
                    evaluated == 20 && elapsed < kBudget4;
    verdict(4, ok, "spectral projections by polynomials and contours (20 two-cluster models)",
            lagrange.describe("lagrange") + "; least squares non-decreasing " +
                std::to_string(ls_non_decreasing) + (ls_where.empty() ? "" : " at " + ls_where) + "; " +
                quadrature.describe("quadrature") + "; " + ratio.describe("K->2K ratio") + "; " +
                gap_margin.describe("0.2||A||/gap") + "; " + sci(elapsed) + " s");
}

// --- criterion 5 ------------------------------------------------------------

void criterion_5()
{
    const auto t0 = Clock::now();
    const SpectrumFamily families[] = {RandomAnnulus{0.1, 1.0}, PowerDecay{1.0}};
    const Index sizes[] = {8, 16, 32, 64, 128};
    int failures = 0;
    std::string where;
    for (int i = 0; i < 20; ++i) {
        const SpectrumFamily family = families[i % 2];
        const Index n = sizes[(i / 2) % 5];
        const int kernel = (i / 10) % 2;
        const auto spectrum = generate_spectrum(family, static_cast<int>(n) - kernel, kernel,
                                                static_cast<std::uint64_t>(3000 + i));
        const auto m = build_model(spectrum, i % 4 < 2 ? Conjugation::haar(4000 + i) : Conjugation::diagonal());
        // The vector sum_n phi_n / n (+ phi_0) assembled from U directly.
        Vector g = Vector::Zero(n);
        for (Index j = 0; j < n - kernel; ++j)
            g += m.basis().col(j) / static_cast<double>(j + 1);
        if (kernel)
            g += m.basis().col(n - 1);
        const Vector lib = cyclic_proof_vector(m);
        const auto out = cyclicity_check(m);
        const bool ok = out.krylov_dim == n && (lib - g).norm() <= 1e-14 * g.norm();
        if (!ok) {
            ++failures;
            where = family_name(family) + " N=" + std::to_string(n) + " d=" + std::to_string(out.krylov_dim);
        }
    }
    const double elapsed = seconds_since(t0);
    verdict(5, failures == 0 && elapsed < kBudget5, "cyclicity of simple spectra (20 models)",
            std::to_string(failures) + " models short of N" + (where.empty() ? "" : " e.g. " + where) + "; " +
                sci(elapsed) + " s");
}

// --- criterion 6 ------------------------------------------------------------

void criterion_6()
{
    const auto t0 = Clock::now();
    Worst mass, moment, iso, member, norms, chain;
    for (int i = 0; i < 20; ++i) {
        const Index sizes[] = {16, 32, 64};
        const Index n = sizes[i % 3];
        const int kernel = i % 3;
        const auto spectrum = generate_spectrum(RandomAnnulus{0.1, 1.0}, static_cast<int>(n) - kernel,
                                                kernel, static_cast<std::uint64_t>(6000 + i));
        const auto m = build_model(spectrum, i % 2 ? Conjugation::haar(7000 + i) : Conjugation::diagonal());
        const Matrix a = m.dense();
        const std::string label = "model " + std::to_string(i);

        std::mt19937_64 rng(8000 + i);
        Vector g = random_complex_vector(n, rng);
        g /= g.norm();

        const auto mu = scalar_measure(m, g);
        mass.add(std::abs(mu.total_mass() - g.squaredNorm()) / g.squaredNorm(), kMassTol, label);

        // Moments: Gram matrix from dense powers vs atoms rebuilt from U, D.
        const Vector c = m.basis().adjoint() * g;
        const Vector& d = m.coordinate_eigenvalues();
        Matrix powers(n, 7);
        powers.col(0) = g;
        for (int k = 1; k <= 6; ++k)
            powers.col(k) = a * powers.col(k - 1);
        const Matrix gram = powers.adjoint() * powers;
        double dev = 0.0;
        for (int j = 0; j <= 6; ++j)
            for (int k = 0; k <= 6; ++k) {
                Complex s(0.0);
                for (Index t = 0; t < n; ++t)
                    s += std::norm(c(t)) * ipow(std::conj(d(t)), j) * ipow(d(t), k);
                dev = std::max(dev, std::abs(gram(j, k) - s));
            }
        moment.add(dev, kMomentTol, label);
        moment.add(gram_moment_check(m, g, 6).deviation, kMomentTol, label + " (library)");

        const auto basis = arnoldi_to_termination(m, g);
        std::uniform_int_distribution<int> degree(0, 4);
        for (int t = 0; t < 50; ++t) {
            const auto q = BivariatePolynomial::random(degree(rng), rng);
            // q(A, A*) g by dense powers.
            Vector v = Vector::Zero(n);
            for (const auto& [e, coef] : q.coefficients()) {
                Vector w = g;
                for (int b = 0; b < e.second; ++b)
                    w = a.adjoint() * w;
                for (int b = 0; b < e.first; ++b)
                    w = a * w;
                v += coef * w;
            }
            double s = 0.0;
            for (Index r = 0; r < n; ++r)
                s += std::norm(q(d(r))) * std::norm(c(r));
            iso.add(std::abs(v.squaredNorm() - s) / s, kIsometryTol, label);
            const auto out = isometry_check(m, g, basis, q);
            iso.add(out.isometry_deviation, kIsometryTol, label + " (library)");
            member.add(out.membership, kMembershipTol, label);
        }

        const double fwd = (a * g).norm();
        const double adj = (a.adjoint() * g).norm();
        norms.add(std::abs(fwd - adj) / fwd, kNormEqualityTol, label);
        const auto conv = converse_criterion_check(m, g);
        chain.add(conv.relative_deviation, kNormEqualityTol, label);
        chain.add(conv.reducibility, kReducibilityTol, label + " reducibility");
    }
    const double elapsed = seconds_since(t0);
    const bool ok = mass.violations + moment.violations + iso.violations + member.violations +
                            norms.violations + chain.violations ==
                        0 &&
                    elapsed < kBudget6;
    verdict(6, ok, "measure and isometry identities (20 models x 50 polynomials)",
            mass.describe("mass") + "; " + moment.describe("moments") + "; " + iso.describe("isometry") +
                "; " + member.describe("membership") + "; " + norms.describe("||A*g|| vs ||Ag||") + "; " +
                chain.describe("converse chain") + "; " + sci(elapsed) + " s");
}

// --- criterion 8 ------------------------------------------------------------

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion_8()
{
    const auto specs = parse_suite(demo_suite_json());
    const auto base = std::filesystem::temp_directory_path() / "krylovlab_acceptance";
    std::filesystem::remove_all(base);
    const auto s1 = run_suite(specs, 1, base / "p1");
    const auto s8 = run_suite(specs, 8, base / "p8");
    const std::string a = slurp(base / "p1" / "report.json");
    const std::string b = slurp(base / "p8" / "report.json");
    const bool ok = !a.empty() && a == b && s1 == s8;
    verdict(8, ok, "report.json identical at parallelism 1 and 8",
            std::to_string(a.size()) + " bytes; summary pass " + std::to_string(s1.pass) + " warn " +
                std::to_string(s1.warn) + " fail " + std::to_string(s1.fail));
    std::filesystem::remove_all(base);
}

} // namespace

int main()
{
    criteria_1_2_3_7();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_8();
    std::printf("%s: %d criterion failure(s)\n", g_failures ? "FAILED" : "ALL PASSED", g_failures);
    return g_failures == 0 ? 0 : 1;
}
