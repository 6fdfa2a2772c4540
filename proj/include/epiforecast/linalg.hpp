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
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace epiforecast::linalg {

/// argmin ||y - X b||^2 by column-pivoted QR. Throws SingularFitError when X
/// is numerically rank deficient or has fewer rows than columns.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/**
 * argmin ||y - X b||^2 + lambda * sum_{j in penalized} b_j^2, solved as an
 * augmented least-squares problem. With lambda = 0 this is least_squares.
 */
Eigen::VectorXd ridge_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                                    std::span<const int> penalized);

/// Moduli of the roots of 1 - a_1 z - ... - a_k z^k, via companion eigenvalues
/// (returned as reciprocals, so a root outside the unit circle has modulus > 1).
std::vector<double> lag_polynomial_root_moduli(std::span<const double> a);

} // namespace epiforecast::linalg
