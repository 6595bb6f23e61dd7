#include "popinfo/fisher.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

#include "popinfo/errors.hpp"

namespace popinfo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

std::string describe_node(const Eigen::VectorXd& x, std::size_t index)
{
    std::ostringstream os;
    os << "grid node " << index << " (x =";
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        os << ' ' << x[k];
    }
    os << ')';
    return os.str();
}

double log_det_pd(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, std::size_t index, const char* what)
{
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw SingularityError(std::string(what) + " is not positive definite at " + describe_node(x, index));
    }
    const auto diag = llt.matrixLLT().diagonal();
    double log_det = 0.0;
    for (Eigen::Index k = 0; k < diag.size(); ++k) {
        log_det += 2.0 * std::log(diag[k]);
    }
    return log_det;
}

// (1/2) <ln det(scale * M(x)) - K ln(norm)> + H(X)
template <class MatrixAt>
double half_log_det_expectation(const CurvatureField& field, MatrixAt matrix_at, double log_scale,
                                double log_norm, const char* what)
{
    const auto& grid = field.grid();
    const auto k = static_cast<double>(field.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const double wp = grid.weights[i] * field.density()[i];
        if (wp == 0.0) {
            continue;
        }
        const double ld = log_det_pd(matrix_at(i), grid.points[i], i, what);
        acc += wp * (ld + k * (log_scale - log_norm));
    }
    return 0.5 * acc / field.mass() + field.entropy();
}

}  // namespace

QuadratureGrid QuadratureGrid::trapezoid(double lower, double upper, std::size_t intervals)
{
    if (!(upper > lower) || intervals == 0) {
        throw ConfigError("trapezoid grid needs upper > lower and at least one interval");
    }
    QuadratureGrid grid;
    grid.dim = 1;
    const double h = (upper - lower) / static_cast<double>(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) {
        Eigen::VectorXd x(1);
        x[0] = i == intervals ? upper : lower + h * static_cast<double>(i);
        grid.points.push_back(x);
        grid.weights.push_back((i == 0 || i == intervals) ? 0.5 * h : h);
    }
    return grid;
}

QuadratureGrid QuadratureGrid::trapezoid_step(double lower, double upper, double step)
{
    if (!(step > 0.0)) {
        throw ConfigError("grid step must be positive");
    }
    const auto intervals = static_cast<std::size_t>(std::max(1.0, std::round((upper - lower) / step)));
    return trapezoid(lower, upper, intervals);
}

QuadratureGrid QuadratureGrid::product(std::span<const QuadratureGrid> axes)
{
    if (axes.empty()) {
        throw ConfigError("product grid needs at least one axis");
    }
    QuadratureGrid out;
    out.dim = axes.size();
    out.points.emplace_back(Eigen::VectorXd(0));
    out.weights.push_back(1.0);
    for (const auto& axis : axes) {
        if (axis.dim != 1) {
            throw ConfigError("product grid axes must be one-dimensional");
        }
        QuadratureGrid next;
        for (std::size_t i = 0; i < out.points.size(); ++i) {
            for (std::size_t j = 0; j < axis.points.size(); ++j) {
                Eigen::VectorXd x(out.points[i].size() + 1);
                x << out.points[i], axis.points[j][0];
                next.points.push_back(std::move(x));
                next.weights.push_back(out.weights[i] * axis.weights[j]);
            }
        }
        out.points = std::move(next.points);
        out.weights = std::move(next.weights);
    }
    return out;
}

CurvatureField::CurvatureField(MatrixFn fisher, MatrixFn prior_curvature, DensityFn density,
                               QuadratureGrid grid)
    : grid_(std::move(grid))
{
    if (grid_.points.empty() || grid_.points.size() != grid_.weights.size()) {
        throw ConfigError("quadrature grid is empty or inconsistent");
    }
    const auto k = static_cast<Eigen::Index>(grid_.dim);
    for (std::size_t i = 0; i < grid_.points.size(); ++i) {
        const auto& x = grid_.points[i];
        if (!(grid_.weights[i] > 0.0)) {
            throw ConfigError("quadrature weights must be positive");
        }
        Eigen::MatrixXd j = fisher(x);
        Eigen::MatrixXd p = prior_curvature(x);
        const double d = density(x);
        if (j.rows() != k || j.cols() != k || p.rows() != k || p.cols() != k) {
            throw DimensionError("curvature matrices must be K x K at " + describe_node(x, i));
        }
        const double scale = 1.0 + j.norm();
        if ((j - j.transpose()).norm() > 1e-12 * scale || (p - p.transpose()).norm() > 1e-12 * (1.0 + p.norm())) {
            throw ConfigError("curvature matrices must be symmetric at " + describe_node(x, i));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
            throw ConfigError("Fisher information is not positive semidefinite at " + describe_node(x, i));
        }
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw ConfigError("prior density must be finite and nonnegative");
        }
        fisher_.push_back(std::move(j));
        prior_curvature_.push_back(std::move(p));
        density_.push_back(d);
        mass_ += grid_.weights[i] * d;
    }
    if (std::fabs(mass_ - 1.0) > 1e-6) {
        throw ConfigError("prior density integrates to " + std::to_string(mass_) + " on the grid, not 1");
    }
}

double CurvatureField::entropy() const
{
    double acc = 0.0;
    for (std::size_t i = 0; i < density_.size(); ++i) {
        if (density_[i] > 0.0) {
            acc -= grid_.weights[i] * density_[i] * std::log(density_[i]);
        }
    }
    return acc / mass_;
}

double i_G(const CurvatureField& field)
{
    return half_log_det_expectation(
        field, [&](std::size_t i) -> Eigen::MatrixXd { return field.fisher()[i] + field.prior_curvature()[i]; },
        0.0, std::log(kTwoPiE), "G(x)");
}

double i_F(const CurvatureField& field)
{
    return half_log_det_expectation(
        field, [&](std::size_t i) -> const Eigen::MatrixXd& { return field.fisher()[i]; }, 0.0,
        std::log(kTwoPiE), "J(x)");
}

double i_gamma(const CurvatureField& field, double beta)
{
    if (!(beta > 0.0 && beta < 1.0)) {
        throw DomainError("beta must lie strictly inside (0, 1)");
    }
    const double gamma = beta * (1.0 - beta);
    return half_log_det_expectation(
        field, [&](std::size_t i) -> Eigen::MatrixXd { return field.fisher()[i] + field.prior_curvature()[i]; },
        std::log(gamma), std::log(kTwoPi), "G(x)");
}

DifferentiableTuning gaussian_bump_tuning(double baseline, double amplitude, double center, double width)
{
    if (!(width > 0.0)) {
        throw ConfigError("tuning width must be positive");
    }
    const double inv = 1.0 / (2.0 * width * width);
    return {
        [=](double x) { return baseline + amplitude * std::exp(-(x - center) * (x - center) * inv); },
        [=](double x) {
            return -amplitude * (x - center) / (width * width) * std::exp(-(x - center) * (x - center) * inv);
        },
    };
}

std::vector<double> poisson_fisher_1d(std::span<const DifferentiableTuning> tuning,
                                      std::span<const double> grid)
{
    std::vector<double> fisher(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (const auto& t : tuning) {
            const double f = t.rate(grid[i]);
            const double df = t.slope(grid[i]);
            if (f > 0.0) {
                acc += df * df / f;
            } else if (df != 0.0) {
                throw SingularityError("zero rate with nonzero slope at x = " + std::to_string(grid[i]));
            }
        }
        fisher[i] = acc;
    }
    return fisher;
}

namespace {
double gaussian_density(double x, double sigma)
{
    return std::exp(-0.5 * x * x / (sigma * sigma)) / (std::sqrt(kTwoPi) * sigma);
}
}  // namespace

CurvatureField linear_gaussian_field(double prior_sigma, double observations, double noise_sigma,
                                     const QuadratureGrid& grid)
{
    if (!(prior_sigma > 0.0) || !(noise_sigma > 0.0) || !(observations > 0.0)) {
        throw ConfigError("linear-Gaussian field needs positive sigmas and observation count");
    }
    if (grid.dim != 1) {
        throw ConfigError("linear-Gaussian field is one-dimensional");
    }
    const double j = observations / (noise_sigma * noise_sigma);
    const double p = 1.0 / (prior_sigma * prior_sigma);
    return CurvatureField([j](const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, j); },
                          [p](const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, p); },
                          [prior_sigma](const Eigen::VectorXd& x) { return gaussian_density(x[0], prior_sigma); },
                          grid);
}

CurvatureField poisson_1d_field(std::vector<DifferentiableTuning> tuning, double prior_sigma,
                                const QuadratureGrid& grid)
{
    if (!(prior_sigma > 0.0)) {
        throw ConfigError("prior sigma must be positive");
    }
    if (grid.dim != 1) {
        throw ConfigError("Poisson-1D field is one-dimensional");
    }
    const double p = 1.0 / (prior_sigma * prior_sigma);
    auto shared = std::make_shared<std::vector<DifferentiableTuning>>(std::move(tuning));
    return CurvatureField(
        [shared](const Eigen::VectorXd& x) {
            const double at[] = {x[0]};
            return Eigen::MatrixXd::Constant(1, 1, poisson_fisher_1d(*shared, at)[0]);
        },
        [p](const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, p); },
        [prior_sigma](const Eigen::VectorXd& x) { return gaussian_density(x[0], prior_sigma); }, grid);
}

}  // namespace popinfo
