#pragma once

#include "eventflow/features.hpp"

#include <span>
#include <vector>

namespace eventflow {

struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    bool ridge_fallback = false;  ///< true when the normal equations were singular

    double predict_row(std::span<const double> x) const;
};

/// Weighted least squares with an unpenalised intercept. A singular Gram
/// matrix falls back to ridge with penalty 1e-8 * trace / p.
LinearModel fit_linear(const Matrix& x, std::span<const double> y, std::span<const double> w);

std::vector<double> predict_linear(const LinearModel& model, const Matrix& x);

}  // namespace eventflow
