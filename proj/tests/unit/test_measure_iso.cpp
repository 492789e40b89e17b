#include <krylovlab/measure_iso.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace krylovlab;

namespace {

Vector vec(std::initializer_list<Complex> xs)
{
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (auto x : xs)
        v(i++) = x;
    return v;
}

CompactNormalModel normalized_model(int count, int kernel, std::uint64_t seed)
{
    return build_model(generate_spectrum(RandomAnnulus{0.1, 1.0}, count, kernel, seed),
                       Conjugation::haar(seed * 7 + 1));
}

BivariatePolynomial monomial(int a, int b)
{
    return BivariatePolynomial(std::map<BivariatePolynomial::Exponents, Complex>{{{a, b}, Complex(1.0)}});
}

} // namespace

TEST(ScalarMeasure, Examples)
{
    const auto d = CompactNormalModel::from_diagonal({1.0, 0.5});
    const auto eig = scalar_measure(d, vec({0.0, 1.0}));
    ASSERT_EQ(eig.atoms.size(), 1u);
    EXPECT_EQ(eig.atoms[0].point, Complex(0.5));
    EXPECT_DOUBLE_EQ(eig.atoms[0].weight, 1.0);

    const auto mu = scalar_measure(d, vec({0.6, 0.8}));
    ASSERT_EQ(mu.atoms.size(), 2u);
    EXPECT_NEAR(mu.atoms[0].weight, 9.0 / 25.0, 1e-15);
    EXPECT_NEAR(mu.atoms[1].weight, 16.0 / 25.0, 1e-15);
    EXPECT_NEAR(mu.total_mass(), 1.0, 1e-15);

    const auto empty = scalar_measure(d, Vector::Zero(2));
    EXPECT_TRUE(empty.atoms.empty());
    EXPECT_EQ(empty.total_mass(), 0.0);
}

TEST(ScalarMeasure, KernelAtomAndMass)
{
    std::mt19937_64 rng(1);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto m = normalized_model(20, static_cast<int>(seed % 3), seed);
        const Vector g = random_complex_vector(m.dim(), rng);
        const auto mu = scalar_measure(m, g);
        EXPECT_LE(std::abs(mu.total_mass() - g.squaredNorm()), 1e-12 * g.squaredNorm());
        for (const auto& a : mu.atoms)
            EXPECT_GE(a.weight, 0.0);
        EXPECT_EQ(mu.atoms.front().index == 0, m.spectrum().kernel_dim() > 0);
    }
}

TEST(ScalarMeasure, PushforwardMatchesDiagonal)
{
    const auto s = generate_spectrum(PowerDecay{1.0}, 16, 2, 3);
    const auto dense = build_model(s, Conjugation::haar(4));
    const auto diag = build_model(s, Conjugation::diagonal());
    std::mt19937_64 rng(2);
    const Vector g = random_complex_vector(dense.dim(), rng);
    const auto a = scalar_measure(dense, g);
    const auto b = scalar_measure(diag, dense.basis().adjoint() * g);
    ASSERT_EQ(a.atoms.size(), b.atoms.size());
    for (std::size_t k = 0; k < a.atoms.size(); ++k) {
        EXPECT_EQ(a.atoms[k].point, b.atoms[k].point);
        EXPECT_NEAR(a.atoms[k].weight, b.atoms[k].weight, 1e-10);
    }
}

TEST(GramMoment, Examples)
{
    const auto d = CompactNormalModel::from_diagonal({Complex(0.3, 0.4), 0.5});
    const Vector eig = vec({2.0, 0.0});
    const auto out = gram_moment_check(d, eig, 5);
    EXPECT_TRUE(out.passed());
    EXPECT_LE(out.deviation, 1e-15);

    const Vector g = vec({1.0, Complex(0.0, 2.0)});
    EXPECT_NEAR(gram_moment_check(d, g, 0).deviation, 0.0, 1e-15);

    const auto m = normalized_model(32, 0, 5);
    std::mt19937_64 rng(3);
    const auto r = gram_moment_check(m, random_complex_vector(m.dim(), rng), 6);
    EXPECT_LE(r.deviation, 1e-10);
    EXPECT_TRUE(r.passed());
}

TEST(GramMoment, OverflowGuard)
{
    const auto d = CompactNormalModel::from_diagonal({1e10, 1.0});
    EXPECT_THROW(gram_moment_check(d, vec({1.0, 1.0}), 20), DegreeTooLarge);
    EXPECT_THROW(gram_moment_check(d, vec({1.0, 1.0}), -1), InvalidArgument);
    EXPECT_NO_THROW(gram_moment_check(d, vec({1.0, 1.0}), 2));
}

TEST(Bivariate, EvaluationAndApplication)
{
    auto q = monomial(1, 1);
    EXPECT_EQ(q.degree(), 2);
    EXPECT_NEAR(std::abs(q(Complex(0.3, 0.4)) - 0.25), 0.0, 1e-15);
    EXPECT_THROW(monomial(-1, 0), InvalidArgument);

    std::mt19937_64 rng(4);
    const auto r = BivariatePolynomial::random(3, rng);
    EXPECT_EQ(r.coefficients().size(), 10u);
    EXPECT_EQ(r.degree(), 3);
}

TEST(Isometry, Examples)
{
    const auto m = normalized_model(24, 1, 6);
    std::mt19937_64 rng(5);
    const Vector g = random_complex_vector(m.dim(), rng);

    const auto one = monomial(0, 0);
    const auto o = isometry_check(m, g, one);
    EXPECT_TRUE(o.passed());
    EXPECT_LE((one.apply(m, g) - g).norm(), 0.0);

    const auto zbar = monomial(0, 1);
    const auto z = isometry_check(m, g, zbar);
    EXPECT_NEAR(z.membership, reducibility_residual(m, g), 1e-14);
    EXPECT_TRUE(z.passed());

    const auto zz = monomial(1, 1);
    const Vector v = zz.apply(m, g);
    double s = 0.0;
    for (const auto& a : scalar_measure(m, g).atoms)
        s += std::pow(std::abs(a.point), 4) * a.weight;
    EXPECT_LE(std::abs(v.squaredNorm() - s), 1e-10 * s);
}

TEST(Isometry, RandomPolynomials)
{
    const auto m = normalized_model(40, 2, 8);
    std::mt19937_64 rng(6);
    const Vector g = random_complex_vector(m.dim(), rng);
    const auto basis = arnoldi_to_termination(m, g);
    std::uniform_int_distribution<int> degree(0, 4);
    for (int t = 0; t < 50; ++t) {
        const auto q = BivariatePolynomial::random(degree(rng), rng);
        const auto out = isometry_check(m, g, basis, q);
        EXPECT_LE(out.isometry_deviation, 1e-9);
        EXPECT_LE(out.membership, 1e-8);
    }
}

TEST(Converse, Examples)
{
    const auto d = CompactNormalModel::from_diagonal({Complex(0.0, 1.0), Complex(0.0, 2.0)});
    const Vector g = vec({1.0, 1.0}) / std::sqrt(2.0);
    const auto out = converse_criterion_check(d, g);
    EXPECT_NEAR(out.adjoint_norm_sq, 2.5, 1e-15);
    EXPECT_NEAR(out.measure_integral, 2.5, 1e-15);
    EXPECT_TRUE(out.passed());

    const auto k = CompactNormalModel::from_diagonal({1.0, 0.0});
    const auto kernel = converse_criterion_check(k, vec({0.0, 1.0}));
    EXPECT_EQ(kernel.adjoint_norm_sq, 0.0);
    EXPECT_TRUE(kernel.passed());

    const auto m = normalized_model(50, 1, 9);
    std::mt19937_64 rng(7);
    const auto r = converse_criterion_check(m, random_complex_vector(m.dim(), rng));
    EXPECT_TRUE(r.passed());
    EXPECT_LE(std::abs(std::sqrt(r.adjoint_norm_sq) - std::sqrt(r.forward_norm_sq)),
              1e-10 * std::sqrt(r.forward_norm_sq));
}
