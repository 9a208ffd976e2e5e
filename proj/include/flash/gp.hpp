#pragma once

// Exact Gaussian-process regression with a squared-exponential kernel, the
// surrogate behind the ePAL baseline. Cost is cubic in the training size.

#include "flash/config_space.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace flash {

struct GpKernel {
    double length_scale = 0.2;
    double signal_variance = 1.0;
    double noise_variance = 1e-6;

    double operator()(std::span<const double> a, std::span<const double> b) const;
};

struct GpPrediction {
    double mean = 0.0;
    double sd = 0.0; // latent-function standard deviation, always >= 0
};

class GaussianProcess {
public:
    // The prior mean is the constant mean of the training targets. When the
    // Cholesky factorization fails, diagonal jitter escalates from 1e-10 to
    // 1e-2 times the signal variance before NumericalError is thrown.
    static GaussianProcess fit(const std::vector<std::vector<double>>& inputs, std::span<const double> targets,
                               const GpKernel& kernel);

    GpPrediction predict(std::span<const double> x) const;
    std::vector<GpPrediction> predict_batch(const std::vector<std::vector<double>>& xs) const;

    double log_marginal_likelihood() const;
    double prior_mean() const noexcept { return prior_mean_; }
    const GpKernel& kernel() const noexcept { return kernel_; }
    double jitter() const noexcept { return jitter_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(inputs_.rows()); }

private:
    GpKernel kernel_;
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd centered_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
    Eigen::VectorXd alpha_;
    double prior_mean_ = 0.0;
    double jitter_ = 0.0;
};

// Refits with each length scale in `grid` and keeps the model with the
// highest log marginal likelihood (first wins ties). An empty grid fits
// `kernel` as given.
GaussianProcess fit_gp_with_length_search(const std::vector<std::vector<double>>& inputs,
                                          std::span<const double> targets, const GpKernel& kernel,
                                          std::span<const double> grid);

// Min-max scaling of each option to [0, 1] using ranges taken from a
// reference set; constant options map to 0.
class InputScaler {
public:
    explicit InputScaler(std::span<const Configuration> reference);
    std::vector<double> operator()(std::span<const double> config) const;

private:
    std::vector<double> lo_;
    std::vector<double> span_;
};

} // namespace flash
