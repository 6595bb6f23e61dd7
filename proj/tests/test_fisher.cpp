#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "popinfo/errors.hpp"
#include "popinfo/fisher.hpp"
#include "support/instances.hpp"

namespace popinfo {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

CurvatureField constant_uniform_field(double j_value)
{
    return CurvatureField([=](const VectorXd&) { return MatrixXd::Constant(1, 1, j_value); },
                          [](const VectorXd&) { return MatrixXd::Zero(1, 1); },
                          [](const VectorXd&) { return 1.0; }, QuadratureGrid::trapezoid(0.0, 1.0, 200));
}

// Two-dimensional field with an x-dependent, non-diagonal J under a Gaussian prior
// with covariance diag(1, 4).
CurvatureField coupled_2d_field(double scale = 1.0)
{
    const std::vector<QuadratureGrid> axes{QuadratureGrid::trapezoid_step(-8.0, 8.0, 0.1),
                                           QuadratureGrid::trapezoid_step(-16.0, 16.0, 0.2)};
    return CurvatureField(
        [=](const VectorXd& x) {
            MatrixXd j(2, 2);
            j << 3.0 + std::sin(x[0]), 0.5 * std::cos(x[1]), 0.5 * std::cos(x[1]), 2.0 + x[0] * x[0] / 10.0;
            return MatrixXd(scale * j);
        },
        [](const VectorXd&) {
            MatrixXd p(2, 2);
            p << 1.0, 0.0, 0.0, 0.25;
            return p;
        },
        [](const VectorXd& x) {
            return std::exp(-x[0] * x[0] / 2.0 - x[1] * x[1] / 8.0) / (2.0 * std::numbers::pi * 2.0);
        },
        QuadratureGrid::product(axes));
}

CurvatureField bump_field(double step)
{
    std::vector<DifferentiableTuning> tuning;
    for (double c : {-2.0, -0.5, 1.0, 2.5}) tuning.push_back(gaussian_bump_tuning(0.2, 8.0, c, 1.2));
    return poisson_1d_field(tuning, 1.0, QuadratureGrid::trapezoid_step(-8.0, 8.0, step));
}

// Expected log-likelihood L(x') = sum_n sum_r p_n(r|x) ln p_n(r|x') by enumeration;
// its negative second derivative at x' = x is the Fisher information.
double expected_log_likelihood(const std::vector<DifferentiableTuning>& tuning, double x, double xp)
{
    double total = 0.0;
    for (const auto& t : tuning) {
        const double lam = t.rate(x), lamp = t.rate(xp);
        for (std::size_t r = 0; r < 90; ++r) {
            total += std::exp(test::ref_log_pmf(r, lam)) * test::ref_log_pmf(r, lamp);
        }
    }
    return total;
}

TEST(Quadrature, TrapezoidWeights)
{
    const auto g = QuadratureGrid::trapezoid(0.0, 1.0, 4);
    ASSERT_EQ(g.points.size(), 5u);
    EXPECT_DOUBLE_EQ(g.weights[0], 0.125);
    EXPECT_DOUBLE_EQ(g.weights[2], 0.25);
    EXPECT_THROW(QuadratureGrid::trapezoid(1.0, 0.0, 4), ConfigError);
    EXPECT_THROW(QuadratureGrid::trapezoid_step(0.0, 1.0, 0.0), ConfigError);
}

TEST(IG, ConstantFieldOnUnitInterval)
{
    const double n0 = 37.0;
    EXPECT_NEAR(i_G(constant_uniform_field(kTwoPiE * n0)), 0.5 * std::log(n0), 1e-12);
}

TEST(IG, DoublingJAddsHalfLnTwoPerDimension)
{
    const auto a = constant_uniform_field(5.0);
    const auto b = constant_uniform_field(10.0);
    EXPECT_NEAR(i_G(b) - i_G(a), 0.5 * std::log(2.0), 1e-12);
}

TEST(IG, LinearGaussianChannel)
{
    for (double n : {1.0, 10.0, 100.0}) {
        const double sigma = 1.5, noise = 2.0;
        const auto field = linear_gaussian_field(sigma, n, noise, QuadratureGrid::trapezoid_step(-12.0, 12.0, 0.01));
        EXPECT_NEAR(i_G(field), 0.5 * std::log(1.0 + n * sigma * sigma / (noise * noise)), 1e-6);
        // flat-prior reading: I_F = (1/2) ln(J / 2 pi e) + H
        EXPECT_NEAR(i_F(field), 0.5 * std::log(n / (noise * noise) / kTwoPiE) + field.entropy(), 1e-12);
    }
}

TEST(IF, EqualsIGWithoutPriorCurvature)
{
    const auto f = constant_uniform_field(3.0);
    EXPECT_EQ(i_F(f), i_G(f));
}

TEST(IF, BelowIGWithPsdPrior)
{
    EXPECT_LT(i_F(coupled_2d_field()), i_G(coupled_2d_field()));
    EXPECT_LE(i_F(bump_field(0.01)), i_G(bump_field(0.01)));
}

TEST(IGamma, HalfOrderIdentity)
{
    for (const auto& f : {constant_uniform_field(4.0), coupled_2d_field(), bump_field(0.01)}) {
        const double k = static_cast<double>(f.dim());
        EXPECT_NEAR(i_gamma(f, 0.5), i_G(f) - 0.5 * k * std::log(4.0 / std::numbers::e), 1e-12);
    }
}

TEST(IGamma, SymmetricInBetaAndDivergesAtEdge)
{
    const auto f = coupled_2d_field();
    for (double beta : {0.1, 0.3, 0.45}) {
        EXPECT_NEAR(i_gamma(f, beta), i_gamma(f, 1.0 - beta), 1e-12);
    }
    const double g1 = i_gamma(f, 1e-3), g2 = i_gamma(f, 1e-6);
    // ln det(gamma G) = K ln gamma + ln det G
    EXPECT_NEAR(g1 - g2, std::log((1e-3 * (1 - 1e-3)) / (1e-6 * (1 - 1e-6))), 1e-9);
    EXPECT_THROW(i_gamma(f, 0.0), DomainError);
    EXPECT_THROW(i_gamma(f, 1.0), DomainError);
}

TEST(Field, RejectsBadInputs)
{
    auto one = [](const VectorXd&) { return MatrixXd::Constant(1, 1, 1.0); };
    auto zero = [](const VectorXd&) { return MatrixXd::Zero(1, 1); };
    auto negative = [](const VectorXd&) { return MatrixXd::Constant(1, 1, -1.0); };
    auto unit = [](const VectorXd&) { return 1.0; };
    auto half = [](const VectorXd&) { return 0.5; };
    const auto grid = QuadratureGrid::trapezoid(0.0, 1.0, 10);
    EXPECT_THROW(CurvatureField(one, zero, half, grid), ConfigError);
    EXPECT_THROW(CurvatureField(negative, zero, unit, grid), ConfigError);
    auto asym = [](const VectorXd&) {
        MatrixXd m(2, 2);
        m << 1, 0.5, 0.2, 1;
        return m;
    };
    const std::vector<QuadratureGrid> axes{grid, grid};
    EXPECT_THROW(CurvatureField(asym, [](const VectorXd&) { return MatrixXd::Zero(2, 2); }, unit,
                                QuadratureGrid::product(axes)),
                 ConfigError);
}

TEST(Field, SingularGNamesTheNode)
{
    const CurvatureField f([](const VectorXd& x) { return MatrixXd::Constant(1, 1, x[0] * x[0]); },
                           [](const VectorXd&) { return MatrixXd::Zero(1, 1); },
                           [](const VectorXd&) { return 0.5; }, QuadratureGrid::trapezoid(-1.0, 1.0, 10));
    try {
        i_G(f);
        FAIL() << "expected SingularityError";
    } catch (const SingularityError& e) {
        EXPECT_NE(std::string(e.what()).find("grid node 5 "), std::string::npos) << e.what();
    }
}

TEST(Field, GridRefinementIsStable)
{
    const auto coarse = bump_field(0.01);
    const auto fine = bump_field(0.005);
    EXPECT_NEAR(i_G(coarse), i_G(fine), 1e-6);
    EXPECT_NEAR(i_F(coarse), i_F(fine), 1e-6);
    EXPECT_NEAR(i_gamma(coarse, 0.3), i_gamma(fine, 0.3), 1e-6);
}

TEST(PoissonFisher, LinearTuning)
{
    const DifferentiableTuning lin{[](double x) { return x; }, [](double) { return 1.0; }};
    const std::vector<DifferentiableTuning> one{lin};
    const std::vector<double> xs{0.5, 1.0, 4.0};
    const auto j = poisson_fisher_1d(one, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_DOUBLE_EQ(j[i], 1.0 / xs[i]);
}

TEST(PoissonFisher, AdditiveOverIdenticalNeurons)
{
    const auto t = gaussian_bump_tuning(0.1, 5.0, 0.3, 0.8);
    const std::vector<double> xs{-1.0, 0.0, 0.9, 2.0};
    const std::vector<DifferentiableTuning> one{t};
    const std::vector<DifferentiableTuning> seven(7, t);
    const auto j1 = poisson_fisher_1d(one, xs);
    const auto j7 = poisson_fisher_1d(seven, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(j7[i], 7.0 * j1[i], 1e-12 * j7[i]);
}

TEST(PoissonFisher, ZeroRateCases)
{
    const DifferentiableTuning flat{[](double) { return 0.0; }, [](double) { return 0.0; }};
    const DifferentiableTuning bad{[](double) { return 0.0; }, [](double) { return 1.0; }};
    const std::vector<double> xs{0.0, 1.0};
    const std::vector<DifferentiableTuning> ok{flat};
    EXPECT_EQ(poisson_fisher_1d(ok, xs), (std::vector<double>{0.0, 0.0}));
    const std::vector<DifferentiableTuning> broken{bad};
    EXPECT_THROW(poisson_fisher_1d(broken, xs), SingularityError);
}

TEST(PoissonFisher, MatchesFiniteDifferenceOracle)
{
    std::vector<DifferentiableTuning> tuning;
    for (double c : {-2.0, 0.0, 1.5}) tuning.push_back(gaussian_bump_tuning(0.3, 9.0, c, 1.0));
    const std::vector<double> xs{-2.6, -1.1, 0.4, 0.9, 2.2};
    const auto j = poisson_fisher_1d(tuning, xs);
    const double h = 1e-3;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const double fd = -(expected_log_likelihood(tuning, x, x + h) - 2.0 * expected_log_likelihood(tuning, x, x) +
                            expected_log_likelihood(tuning, x, x - h)) /
                          (h * h);
        EXPECT_GE(j[i], 0.0);
        EXPECT_NEAR(j[i], fd, 1e-4 * fd) << "x=" << x;
    }
}

}  // namespace
}  // namespace popinfo
