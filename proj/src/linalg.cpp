/*
* Copyright (C) 2026 epiforecast contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "epiforecast/linalg.hpp"

#include "epiforecast/error.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace epiforecast::linalg {

Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    if (x.rows() < x.cols()) {
        throw SingularFitError(fmt::format("{} equations for {} unknowns", x.rows(), x.cols()));
    }
    // Column scaling keeps the rank test meaningful when columns differ in
    // magnitude (time index vs. intercept).
    Eigen::VectorXd norms = x.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < norms.size(); ++j) {
        if (!(norms(j) > 0.0)) {
            throw SingularFitError(fmt::format("design column {} is identically zero", j));
        }
    }
    const Eigen::MatrixXd xs = x * norms.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(1e-11);
    if (qr.rank() < x.cols()) {
        throw SingularFitError(fmt::format("design matrix has rank {} < {}", qr.rank(), x.cols()));
    }
    Eigen::VectorXd b = qr.solve(y);
    return b.cwiseQuotient(norms);
}

Eigen::VectorXd ridge_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                                    std::span<const int> penalized)
{
    if (lambda < 0.0) {
        throw ContractError("ridge penalty must be non-negative");
    }
    if (lambda == 0.0 || penalized.empty()) {
        return least_squares(x, y);
    }
    const auto extra = static_cast<Eigen::Index>(penalized.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(x.rows() + extra, x.cols());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(x.rows() + extra);
    a.topRows(x.rows()) = x;
    b.head(x.rows()) = y;
    const double root = std::sqrt(lambda);
    for (Eigen::Index k = 0; k < extra; ++k) {
        a(x.rows() + k, penalized[static_cast<std::size_t>(k)]) = root;
    }
    return least_squares(a, b);
}

std::vector<double> lag_polynomial_root_moduli(std::span<const double> a)
{
    // Trailing zero coefficients do not contribute roots.
    std::size_t k = a.size();
    while (k > 0 && a[k - 1] == 0.0) {
        --k;
    }
    if (k == 0) {
        return {};
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
        companion(0, static_cast<Eigen::Index>(j)) = a[j];
    }
    for (std::size_t i = 1; i < k; ++i) {
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double m = std::abs(solver.eigenvalues()(i));
        moduli.push_back(m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity());
    }
    return moduli;
}

} // namespace epiforecast::linalg
