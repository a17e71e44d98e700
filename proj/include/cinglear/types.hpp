#pragma once

#include <Eigen/Dense>

namespace cinglear {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

} // namespace cinglear
