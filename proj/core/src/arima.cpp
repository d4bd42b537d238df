#include "eventflow/arima.hpp"

#include "eventflow/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eventflow {

namespace {

struct Layout {
    bool intercept;
    int p;
    int q;
    int size() const { return (intercept ? 1 : 0) + p + q; }
};

/// Conditional residuals; returns +inf when the recursion diverges.
double css(std::span<const double> z, const Layout& layout, const std::vector<double>& theta,
           std::vector<double>* residuals = nullptr) {
    const int off = layout.intercept ? 1 : 0;
    const double c = layout.intercept ? theta[0] : 0.0;
    const auto m = static_cast<int>(z.size());
    std::vector<double> e(static_cast<std::size_t>(m), 0.0);
    double sum = 0.0;
    for (int t = layout.p; t < m; ++t) {
        double pred = c;
        for (int i = 1; i <= layout.p; ++i) pred += theta[static_cast<std::size_t>(off + i - 1)] * z[static_cast<std::size_t>(t - i)];
        for (int j = 1; j <= layout.q && t - j >= layout.p; ++j) {
            pred += theta[static_cast<std::size_t>(off + layout.p + j - 1)] * e[static_cast<std::size_t>(t - j)];
        }
        const double r = z[static_cast<std::size_t>(t)] - pred;
        e[static_cast<std::size_t>(t)] = r;
        sum += r * r;
        if (!std::isfinite(sum)) return std::numeric_limits<double>::infinity();
    }
    if (residuals) *residuals = std::move(e);
    return sum;
}

/// OLS of z_t on an intercept (optional), p lags of z and q lags of `aux`,
/// over t >= start. Returns empty on a singular system.
std::vector<double> lagged_ols(std::span<const double> z, std::span<const double> aux, const Layout& layout, int start) {
    const int m = static_cast<int>(z.size());
    const int rows = m - start;
    const int k = layout.size();
    if (rows <= k) return {};
    Eigen::MatrixXd a(rows, k);
    Eigen::VectorXd b(rows);
    for (int t = start; t < m; ++t) {
        int col = 0;
        if (layout.intercept) a(t - start, col++) = 1.0;
        for (int i = 1; i <= layout.p; ++i) a(t - start, col++) = z[static_cast<std::size_t>(t - i)];
        for (int j = 1; j <= layout.q; ++j) a(t - start, col++) = aux[static_cast<std::size_t>(t - j)];
        b(t - start) = z[static_cast<std::size_t>(t)];
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a.transpose() * a);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) return {};
    Eigen::VectorXd beta = ldlt.solve(a.transpose() * b);
    if (!beta.allFinite()) return {};
    return {beta.data(), beta.data() + beta.size()};
}

/// Hooke-Jeeves style coordinate search.
double pattern_search(std::span<const double> z, const Layout& layout, std::vector<double>& theta, double scale) {
    std::vector<double> step(theta.size(), 0.1);
    if (layout.intercept) step[0] = 0.1 * scale;
    double best = css(z, layout, theta);
    constexpr int kMaxEvaluations = 40000;
    int evaluations = 0;
    while (evaluations < kMaxEvaluations) {
        bool improved = false;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            for (double sign : {1.0, -1.0}) {
                std::vector<double> trial = theta;
                trial[i] += sign * step[i];
                const double value = css(z, layout, trial);
                ++evaluations;
                if (value < best) {
                    best = value;
                    theta = std::move(trial);
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            double largest = 0.0;
            for (std::size_t i = 0; i < step.size(); ++i) {
                step[i] *= 0.5;
                largest = std::max(largest, step[i] / (i == 0 && layout.intercept ? scale : 1.0));
            }
            if (largest < 1e-9) break;
        }
    }
    return best;
}

}  // namespace

void ArimaOrder::validate() const {
    if (p < 0 || d < 0 || q < 0) throw ConfigError("forecast_models", "ARIMA orders must be >= 0");
}

std::vector<double> difference(std::span<const double> series) {
    std::vector<double> out;
    for (std::size_t i = 1; i < series.size(); ++i) out.push_back(series[i] - series[i - 1]);
    return out;
}

bool ar_is_stationary(std::span<const double> ar) {
    const auto p = static_cast<Eigen::Index>(ar.size());
    if (p == 0) return true;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = ar[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (std::abs(solver.eigenvalues()(i)) >= 1.0) return false;
    }
    return true;
}

ArimaModel fit_arima(std::span<const double> series, const ArimaOrder& order) {
    order.validate();
    const auto need = static_cast<std::size_t>(order.p + order.d + order.q + 10);
    if (series.size() <= need) {
        throw InsufficientHistory("forecast_models",
                                  fmt::format("ARIMA needs more than {} observations, got {}", need, series.size()));
    }
    for (double v : series) {
        if (!std::isfinite(v)) throw NonFiniteInput("series has non-finite values");
    }

    ArimaModel model;
    model.order = order;
    std::vector<double> z(series.begin(), series.end());
    for (int k = 0; k < order.d; ++k) {
        model.anchors.push_back(z.back());
        z = difference(z);
    }

    const Layout layout{order.d == 0, order.p, order.q};
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    const double scale = std::sqrt(var / static_cast<double>(z.size())) + std::abs(mean) + 1e-12;

    std::vector<double> theta(static_cast<std::size_t>(layout.size()), 0.0);
    if (layout.intercept) theta[0] = mean;

    const Layout ar_only{layout.intercept, layout.p, 0};
    std::vector<double> ar_fit;
    if (ar_only.size() > 0) ar_fit = lagged_ols(z, z, ar_only, layout.p);
    if (order.q == 0) {
        if (!ar_fit.empty()) {
            theta = ar_fit;
        } else if (layout.size() > 0) {
            pattern_search(z, layout, theta, scale);
        }
    } else {
        std::vector<std::vector<double>> starts;
        starts.push_back(theta);
        if (!ar_fit.empty()) {
            std::vector<double> s = ar_fit;
            s.resize(theta.size(), 0.0);
            starts.push_back(s);
        }
        // Hannan-Rissanen: long autoregression residuals stand in for the shocks.
        const int long_p = std::min(static_cast<int>(z.size()) / 4, order.p + order.q + 8);
        const Layout long_layout{layout.intercept, long_p, 0};
        const auto long_fit = lagged_ols(z, z, long_layout, long_p);
        if (!long_fit.empty()) {
            std::vector<double> shocks;
            css(z, long_layout, long_fit, &shocks);
            const auto hr = lagged_ols(z, shocks, layout, long_p + order.q);
            if (!hr.empty()) starts.push_back(hr);
        }
        double best = std::numeric_limits<double>::infinity();
        for (auto start : starts) {
            const double value = pattern_search(z, layout, start, scale);
            if (value < best) {
                best = value;
                theta = start;
            }
        }
    }

    const int off = layout.intercept ? 1 : 0;
    if (layout.intercept) model.intercept = theta[0];
    model.ar.assign(theta.begin() + off, theta.begin() + off + order.p);
    model.ma.assign(theta.begin() + off + order.p, theta.end());
    std::vector<double> residuals;
    const double sum = css(z, layout, theta, &residuals);
    const auto effective = static_cast<double>(z.size() - static_cast<std::size_t>(order.p));
    model.sigma2 = sum / effective;
    model.stationary = ar_is_stationary(model.ar);
    model.diff_tail.assign(z.end() - order.p, z.end());
    model.residual_tail.assign(residuals.end() - order.q, residuals.end());
    return model;
}

std::vector<double> forecast(const ArimaModel& model, int h) {
    if (h < 1) throw PreconditionError("forecast_models", "forecast horizon must be >= 1");
    const int p = model.order.p;
    const int q = model.order.q;
    if (static_cast<int>(model.ar.size()) != p || static_cast<int>(model.ma.size()) != q ||
        static_cast<int>(model.diff_tail.size()) != p || static_cast<int>(model.residual_tail.size()) != q ||
        static_cast<int>(model.anchors.size()) != model.order.d) {
        throw PreconditionError("forecast_models", "ARIMA model state does not match its orders");
    }
    std::vector<double> z(model.diff_tail);
    std::vector<double> e(model.residual_tail);
    std::vector<double> out;
    for (int step = 0; step < h; ++step) {
        double next = model.intercept;
        for (int i = 1; i <= p; ++i) next += model.ar[static_cast<std::size_t>(i - 1)] * z[z.size() - static_cast<std::size_t>(i)];
        for (int j = 1; j <= q; ++j) next += model.ma[static_cast<std::size_t>(j - 1)] * e[e.size() - static_cast<std::size_t>(j)];
        z.push_back(next);
        if (q > 0) e.push_back(0.0);
        out.push_back(next);
        if (p == 0) z.clear();
    }
    for (int k = model.order.d - 1; k >= 0; --k) {
        double level = model.anchors[static_cast<std::size_t>(k)];
        for (double& v : out) {
            level += v;
            v = level;
        }
    }
    return out;
}

}  // namespace eventflow
