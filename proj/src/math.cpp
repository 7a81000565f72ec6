#include "gelsim/math.hpp"

#include <Eigen/SVD>

namespace gelsim {

Svd3 svd3(const Mat3& f) {
    Eigen::JacobiSVD<Mat3> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    Mat3 v = svd.matrixV();
    Vec3 sigma = svd.singularValues();  // already descending, all >= 0
    // Fold reflections into the smallest singular value so both rotation
    // factors are proper and log(sigma) stays well-defined for det(f) > 0.
    if (u.determinant() < 0) {
        u.col(2) *= -1;
        sigma[2] *= -1;
    }
    if (v.determinant() < 0) {
        v.col(2) *= -1;
        sigma[2] *= -1;
    }
    return {u, sigma, v};
}

}  // namespace gelsim
