#pragma once

#include <span>
#include <vector>

namespace eventflow {

struct ArimaOrder {
    int p = 1;
    int d = 0;
    int q = 0;

    void validate() const;
    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar;   ///< phi_1..phi_p
    std::vector<double> ma;   ///< theta_1..theta_q
    double intercept = 0.0;   ///< only estimated when d == 0
    double sigma2 = 0.0;      ///< mean squared conditional residual
    /// False when some root of the AR polynomial lies on or inside the unit
    /// circle. The model is still usable for forecasting.
    bool stationary = true;

    // Forecast state captured at the end of the training series.
    std::vector<double> diff_tail;      ///< last p values of the differenced series, oldest first
    std::vector<double> residual_tail;  ///< last q residuals, oldest first
    std::vector<double> anchors;        ///< anchors[k]: last value of the k-times differenced series
};

/// Conditional-sum-of-squares fit of ARIMA(p, d, q). Pre-sample residuals
/// are zero; the objective is minimised by least squares when q == 0 and by
/// a pattern search with restarts otherwise. Needs more than p + d + q + 10
/// observations.
ArimaModel fit_arima(std::span<const double> series, const ArimaOrder& order);

/// h-step forecasts integrated back to levels.
std::vector<double> forecast(const ArimaModel& model, int h);

/// True when every eigenvalue of the AR companion matrix has modulus < 1.
bool ar_is_stationary(std::span<const double> ar);

/// One round of differencing.
std::vector<double> difference(std::span<const double> series);

}  // namespace eventflow
