#pragma once

#include <Eigen/Dense>

namespace gelsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec3i = Eigen::Vector3i;

struct Svd3 {
    Mat3 u;
    Vec3 sigma;  // descending, sigma[2] may be negative (reflection folded in)
    Mat3 v;
};

// SVD of a 3x3 matrix with det(U) = det(V) = +1; any reflection is folded
// into the smallest singular value. Requires det(f) != 0 for the sign
// convention to be meaningful.
Svd3 svd3(const Mat3& f);

}  // namespace gelsim
