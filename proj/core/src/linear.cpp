#include "eventflow/linear.hpp"

#include "eventflow/error.hpp"
#include "eventflow/gbdt.hpp"

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include <cmath>

namespace eventflow {

namespace {

constexpr double kMinReciprocalCondition = 1e-12;

}  // namespace

double LinearModel::predict_row(std::span<const double> x) const {
    if (x.size() != coefficients.size()) {
        throw DimensionMismatch(
                                fmt::format("expected {} features, got {}", coefficients.size(), x.size()));
    }
    double acc = intercept;
    for (std::size_t j = 0; j < x.size(); ++j) acc += coefficients[j] * x[j];
    return acc;
}

LinearModel fit_linear(const Matrix& x, std::span<const double> y, std::span<const double> w) {
    check_training_data(x, y, w);
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols() + 1;

    Eigen::MatrixXd a(n, p);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x;
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), n);

    const Eigen::MatrixXd gram = a.transpose() * wv.asDiagonal() * a;
    const Eigen::VectorXd rhs = a.transpose() * wv.cwiseProduct(yv);

    LinearModel model;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::VectorXd beta;
    if (ldlt.info() == Eigen::Success && ldlt.rcond() > kMinReciprocalCondition) {
        beta = ldlt.solve(rhs);
    } else {
        model.ridge_fallback = true;
        Eigen::MatrixXd penalised = gram;
        const double lambda = 1e-8 * std::max(gram.trace(), 1.0) / static_cast<double>(p);
        penalised.diagonal().tail(x.cols()).array() += lambda;
        // a lone intercept column with zero weight mass cannot be rescued
        penalised(0, 0) += gram(0, 0) > 0.0 ? 0.0 : lambda;
        Eigen::LDLT<Eigen::MatrixXd> ridge(penalised);
        if (ridge.info() != Eigen::Success) throw SingularSystem("ridge fallback failed");
        beta = ridge.solve(rhs);
    }
    if (!beta.allFinite()) throw SingularSystem("least-squares solution is not finite");
    model.intercept = beta(0);
    model.coefficients.assign(beta.data() + 1, beta.data() + p);
    return model;
}

std::vector<double> predict_linear(const LinearModel& model, const Matrix& x) {
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        out[static_cast<std::size_t>(r)] =
            model.predict_row(std::span<const double>(x.row(r).data(), static_cast<std::size_t>(x.cols())));
    }
    return out;
}

}  // namespace eventflow
