#pragma once

#include "eventflow/tree.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace eventflow::bench {

struct Dataset {
    Matrix x;
    std::vector<double> y;
};

inline Dataset make_dataset(int rows, int cols, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    Dataset d{Matrix(rows, cols), std::vector<double>(static_cast<std::size_t>(rows))};
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) d.x(r, c) = n01(rng);
        d.y[static_cast<std::size_t>(r)] = 2.0 * d.x(r, 0) + std::sin(d.x(r, 1)) + d.x(r, 2) * d.x(r, 3) + 0.3 * n01(rng);
    }
    return d;
}

}  // namespace eventflow::bench
