#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace popinfo {

/// Quadrature nodes and positive weights over a K-dimensional stimulus region.
struct QuadratureGrid {
    std::size_t dim = 1;
    std::vector<Eigen::VectorXd> points;
    std::vector<double> weights;

    /// Composite trapezoid rule on [lower, upper] with `intervals` equal steps.
    static QuadratureGrid trapezoid(double lower, double upper, std::size_t intervals);
    /// Trapezoid rule with the step rounded so that it divides [lower, upper].
    static QuadratureGrid trapezoid_step(double lower, double upper, double step);
    /// Tensor product of one-dimensional grids.
    static QuadratureGrid product(std::span<const QuadratureGrid> axes);
};

/// Fisher information J(x), prior curvature P(x) = -d^2 ln p / dx dx^T and the
/// prior density, sampled on a quadrature grid at construction.
class CurvatureField {
public:
    using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
    using DensityFn = std::function<double(const Eigen::VectorXd&)>;

    /// Throws ConfigError if weights are not positive, sum(w p) deviates from 1 by
    /// more than 1e-6, or J is not symmetric positive semidefinite at a node.
    CurvatureField(MatrixFn fisher, MatrixFn prior_curvature, DensityFn density, QuadratureGrid grid);

    std::size_t dim() const { return grid_.dim; }
    const QuadratureGrid& grid() const { return grid_; }
    std::span<const Eigen::MatrixXd> fisher() const { return fisher_; }
    std::span<const Eigen::MatrixXd> prior_curvature() const { return prior_curvature_; }
    std::span<const double> density() const { return density_; }

    /// sum over nodes of w * p; the expectations below divide by it.
    double mass() const { return mass_; }
    /// Differential entropy -<ln p(x)>.
    double entropy() const;

private:
    QuadratureGrid grid_;
    std::vector<Eigen::MatrixXd> fisher_;
    std::vector<Eigen::MatrixXd> prior_curvature_;
    std::vector<double> density_;
    double mass_ = 0.0;
};

/// (1/2) <ln det(G / (2 pi e))> + H(X), G = J + P. Throws SingularityError naming the node
/// when G is not positive definite.
double i_G(const CurvatureField& field);

/// (1/2) <ln det(J / (2 pi e))> + H(X).
double i_F(const CurvatureField& field);

/// (1/2) <ln det(gamma G / (2 pi))> + H(X), gamma = beta (1 - beta). Throws DomainError
/// unless 0 < beta < 1.
double i_gamma(const CurvatureField& field, double beta);

/// A tuning curve with an analytic derivative.
struct DifferentiableTuning {
    std::function<double(double)> rate;
    std::function<double(double)> slope;
};

/// baseline + amplitude * exp(-(x - center)^2 / (2 width^2)).
DifferentiableTuning gaussian_bump_tuning(double baseline, double amplitude, double center, double width);

/// Pointwise Poisson Fisher information sum_n f'_n(x)^2 / f_n(x). Neurons with zero rate and
/// zero slope contribute 0; zero rate with nonzero slope throws SingularityError.
std::vector<double> poisson_fisher_1d(std::span<const DifferentiableTuning> tuning,
                                      std::span<const double> grid);

/// Linear-Gaussian channel: x ~ N(0, prior_sigma^2) observed `observations` times through
/// additive N(0, noise_sigma^2) noise. J = observations / noise_sigma^2, P = 1 / prior_sigma^2.
CurvatureField linear_gaussian_field(double prior_sigma, double observations, double noise_sigma,
                                     const QuadratureGrid& grid);

/// Poisson population with differentiable tuning under a N(0, prior_sigma^2) prior.
CurvatureField poisson_1d_field(std::vector<DifferentiableTuning> tuning, double prior_sigma,
                                const QuadratureGrid& grid);

}  // namespace popinfo
