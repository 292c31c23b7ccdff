#pragma once

#include <Eigen/Core>

namespace gcca {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace gcca
