#pragma once

#include <Eigen/Dense>

namespace sepflow {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace sepflow
