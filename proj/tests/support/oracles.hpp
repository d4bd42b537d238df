#pragma once

#include "eventflow/features.hpp"
#include "eventflow/tree.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace eventflow::testing {

using Rational = boost::rational<std::int64_t>;

/// Session-by-session redistribution: window n' hands WOM_{n'} / (N - n')
/// to every later session. Index 0 is session 1.
std::vector<Rational> womp_bruteforce(std::span<const std::int64_t> wom, int session_count);

/// Weighted average of series[end - period + 1 .. end]; the value p days
/// before `end` gets weight period - p.
double wma_direct(std::span<const double> series, std::size_t end, int period);

/// (M(t-1) - M(t-2)) / M(t-2) with M from wma_direct.
double changing_rate_direct(std::span<const double> series, std::size_t t, int period);

/// E[f(x) | x_S] under the tree's cover distribution; mask bit j set means
/// feature j is known.
double conditional_expectation(const RegressionTree& tree, std::span<const double> x, std::uint32_t mask);

/// Shapley values of conditional_expectation by enumerating every subset.
std::vector<double> exhaustive_shapley(const RegressionTree& tree, std::span<const double> x, int n_features);

Matrix random_design(std::mt19937_64& rng, int rows, int cols);

/// y = nonlinear function of the first columns plus Gaussian noise.
std::vector<double> random_target(std::mt19937_64& rng, const Matrix& x, double noise = 0.3);

}  // namespace eventflow::testing
