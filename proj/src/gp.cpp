#include "flash/gp.hpp"

#include "flash/error.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <numbers>

namespace flash {

double GpKernel::operator()(std::span<const double> a, std::span<const double> b) const {
    double sq = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        sq += d * d;
    }
    return signal_variance * std::exp(-0.5 * sq / (length_scale * length_scale));
}

GaussianProcess GaussianProcess::fit(const std::vector<std::vector<double>>& inputs, std::span<const double> targets,
                                     const GpKernel& kernel) {
    if (inputs.empty()) throw ValidationError("a Gaussian process needs at least one training point");
    if (inputs.size() != targets.size()) throw ValidationError("inputs and targets differ in length");
    if (!(kernel.length_scale > 0.0) || !(kernel.signal_variance > 0.0) || !(kernel.noise_variance >= 0.0)) {
        throw ValidationError("invalid kernel hyper-parameters");
    }
    const auto n = static_cast<Eigen::Index>(inputs.size());
    const auto d = static_cast<Eigen::Index>(inputs.front().size());

    GaussianProcess gp;
    gp.kernel_ = kernel;
    gp.inputs_.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(inputs[static_cast<std::size_t>(i)].size()) != d) {
            throw ValidationError("inconsistent input dimensionality");
        }
        for (Eigen::Index j = 0; j < d; ++j) gp.inputs_(i, j) = inputs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    double sum = 0.0;
    for (double t : targets) sum += t;
    gp.prior_mean_ = sum / static_cast<double>(n);
    gp.centered_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) gp.centered_(i) = targets[static_cast<std::size_t>(i)] - gp.prior_mean_;

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = kernel(inputs[static_cast<std::size_t>(i)], inputs[static_cast<std::size_t>(j)]);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    k.diagonal().array() += kernel.noise_variance;

    double jitter = 0.0;
    for (;;) {
        Eigen::MatrixXd a = k;
        a.diagonal().array() += jitter;
        gp.factor_.compute(a);
        if (gp.factor_.info() == Eigen::Success) break;
        jitter = jitter == 0.0 ? 1e-10 * kernel.signal_variance : jitter * 10.0;
        if (jitter > 1e-2 * kernel.signal_variance) {
            throw NumericalError("kernel matrix is not positive definite after jitter escalation");
        }
    }
    gp.jitter_ = jitter;
    gp.alpha_ = gp.factor_.solve(gp.centered_);
    return gp;
}

GpPrediction GaussianProcess::predict(std::span<const double> x) const {
    return predict_batch({std::vector<double>(x.begin(), x.end())}).front();
}

std::vector<GpPrediction> GaussianProcess::predict_batch(const std::vector<std::vector<double>>& xs) const {
    const auto n = inputs_.rows();
    const auto d = inputs_.cols();
    const auto c = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd cross(n, c);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (Eigen::Index q = 0; q < c; ++q) {
        const auto& x = xs[static_cast<std::size_t>(q)];
        if (static_cast<Eigen::Index>(x.size()) != d) throw ValidationError("query dimensionality mismatch");
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = inputs_(i, j);
            cross(i, q) = kernel_(row, x);
        }
    }
    const Eigen::VectorXd means = cross.transpose() * alpha_;
    const Eigen::MatrixXd v = factor_.matrixL().solve(cross);
    const Eigen::VectorXd explained = v.colwise().squaredNorm().transpose();

    std::vector<GpPrediction> out(xs.size());
    for (Eigen::Index q = 0; q < c; ++q) {
        const double var = kernel_.signal_variance - explained(q);
        out[static_cast<std::size_t>(q)] = {prior_mean_ + means(q), std::sqrt(std::max(0.0, var))};
    }
    return out;
}

double GaussianProcess::log_marginal_likelihood() const {
    const Eigen::MatrixXd l = factor_.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const auto n = static_cast<double>(centered_.size());
    return -0.5 * centered_.dot(alpha_) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

GaussianProcess fit_gp_with_length_search(const std::vector<std::vector<double>>& inputs,
                                          std::span<const double> targets, const GpKernel& kernel,
                                          std::span<const double> grid) {
    if (grid.empty()) return GaussianProcess::fit(inputs, targets, kernel);
    std::optional<GaussianProcess> best;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (double ell : grid) {
        GpKernel k = kernel;
        k.length_scale = ell;
        auto gp = GaussianProcess::fit(inputs, targets, k);
        const double lml = gp.log_marginal_likelihood();
        if (!best || lml > best_lml) {
            best_lml = lml;
            best = std::move(gp);
        }
    }
    return std::move(*best);
}

InputScaler::InputScaler(std::span<const Configuration> reference) {
    if (reference.empty()) throw ValidationError("input scaler needs a reference set");
    const std::size_t d = reference.front().size();
    lo_.assign(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (const auto& c : reference) {
        for (std::size_t j = 0; j < d; ++j) {
            lo_[j] = std::min(lo_[j], c[j]);
            hi[j] = std::max(hi[j], c[j]);
        }
    }
    span_.resize(d);
    for (std::size_t j = 0; j < d; ++j) span_[j] = hi[j] - lo_[j];
}

std::vector<double> InputScaler::operator()(std::span<const double> config) const {
    std::vector<double> out(config.size());
    for (std::size_t j = 0; j < config.size(); ++j) {
        out[j] = span_[j] > 0.0 ? (config[j] - lo_[j]) / span_[j] : 0.0;
    }
    return out;
}

} // namespace flash
