#pragma once

#include <Eigen/Dense>

namespace safel2o {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace safel2o
