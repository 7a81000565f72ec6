#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gelsim::rl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct MlpGrads {
    std::vector<Matrix> w;
    std::vector<Vector> b;

    void set_zero();
    void scale(double s);
};

// Fully connected net, tanh hidden activations. Output is linear
// (output_scale == 0) or tanh scaled by output_scale (actor head).
class Mlp {
  public:
    Mlp() = default;
    // widths = {in, hidden..., out}
    Mlp(std::vector<int> widths, double output_scale, std::uint64_t seed);

    Vector forward(const Vector& x) const;

    // Forward pass keeping post-activation values per layer (index 0 is the
    // input) for backprop.
    Vector forward_cached(const Vector& x, std::vector<Vector>& acts) const;

    // Accumulates parameter gradients for upstream gradient dy; returns the
    // gradient with respect to the input.
    Vector backward(const std::vector<Vector>& acts, const Vector& dy,
                    MlpGrads& grads) const;

    MlpGrads zero_grads() const;

    const std::vector<int>& widths() const { return widths_; }
    double output_scale() const { return output_scale_; }
    int input_dim() const { return widths_.front(); }
    int output_dim() const { return widths_.back(); }

    std::vector<Matrix>& weights() { return w_; }
    std::vector<Vector>& biases() { return b_; }
    const std::vector<Matrix>& weights() const { return w_; }
    const std::vector<Vector>& biases() const { return b_; }

    // target <- tau * online + (1 - tau) * target
    static void polyak_mix(const Mlp& online, Mlp& target, double tau);

  private:
    std::vector<int> widths_;
    double output_scale_ = 0;
    std::vector<Matrix> w_;
    std::vector<Vector> b_;
};

// Adam over one net's parameters.
class Adam {
  public:
    Adam() = default;
    Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    void step(Mlp& net, const MlpGrads& grads);

  private:
    double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    std::int64_t t_ = 0;
    MlpGrads m_, v_;
};

}  // namespace gelsim::rl
