#pragma once

#include <Eigen/Core>

namespace kernelseg {

using Vec3 = Eigen::Vector3d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

}  // namespace kernelseg
