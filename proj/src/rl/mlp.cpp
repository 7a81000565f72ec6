#include "gelsim/rl/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gelsim::rl {

void MlpGrads::set_zero() {
    for (auto& m : w) m.setZero();
    for (auto& v : b) v.setZero();
}

void MlpGrads::scale(double s) {
    for (auto& m : w) m *= s;
    for (auto& v : b) v *= s;
}

Mlp::Mlp(std::vector<int> widths, double output_scale, std::uint64_t seed)
    : widths_(std::move(widths)), output_scale_(output_scale) {
    if (widths_.size() < 2) {
        throw std::invalid_argument("Mlp needs at least input and output widths");
    }
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        // Uniform fan-in init.
        double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(widths_[l + 1], widths_[l]);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
        Vector b(widths_[l + 1]);
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
        w_.push_back(std::move(w));
        b_.push_back(std::move(b));
    }
}

Vector Mlp::forward(const Vector& x) const {
    std::vector<Vector> acts;
    return forward_cached(x, acts);
}

Vector Mlp::forward_cached(const Vector& x, std::vector<Vector>& acts) const {
    if (x.size() != widths_.front()) {
        throw std::invalid_argument("Mlp input dimension mismatch");
    }
    acts.clear();
    acts.push_back(x);
    Vector h = x;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        h = w_[l] * h + b_[l];
        if (l + 1 < w_.size()) {
            h = h.array().tanh();
        } else if (output_scale_ != 0) {
            h = output_scale_ * h.array().tanh();
        }
        acts.push_back(h);
    }
    return h;
}

Vector Mlp::backward(const std::vector<Vector>& acts, const Vector& dy,
                     MlpGrads& grads) const {
    Vector delta = dy;
    for (std::size_t l = w_.size(); l-- > 0;) {
        const Vector& out = acts[l + 1];
        if (l + 1 < w_.size()) {
            // tanh'(z) = 1 - tanh(z)^2, with out = tanh(z)
            delta = delta.cwiseProduct(Vector(1.0 - out.array().square()));
        } else if (output_scale_ != 0) {
            // out = s * tanh(z): d out / d z = s (1 - (out/s)^2)
            Vector t = out / output_scale_;
            delta = delta.cwiseProduct(
                Vector(output_scale_ * (1.0 - t.array().square())));
        }
        grads.w[l] += delta * acts[l].transpose();
        grads.b[l] += delta;
        delta = w_[l].transpose() * delta;
    }
    return delta;
}

MlpGrads Mlp::zero_grads() const {
    MlpGrads g;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        g.w.emplace_back(Matrix::Zero(w_[l].rows(), w_[l].cols()));
        g.b.emplace_back(Vector::Zero(b_[l].size()));
    }
    return g;
}

void Mlp::polyak_mix(const Mlp& online, Mlp& target, double tau) {
    for (std::size_t l = 0; l < online.w_.size(); ++l) {
        target.w_[l] = tau * online.w_[l] + (1 - tau) * target.w_[l];
        target.b_[l] = tau * online.b_[l] + (1 - tau) * target.b_[l];
    }
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(net.zero_grads()), v_(net.zero_grads()) {}

void Adam::step(Mlp& net, const MlpGrads& grads) {
    ++t_;
    double c1 = 1 - std::pow(beta1_, static_cast<double>(t_));
    double c2 = 1 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t l = 0; l < m_.w.size(); ++l) {
        m_.w[l] = beta1_ * m_.w[l] + (1 - beta1_) * grads.w[l];
        v_.w[l] = beta2_ * v_.w[l] +
                  (1 - beta2_) * grads.w[l].cwiseProduct(grads.w[l]);
        net.weights()[l].array() -=
            lr_ * (m_.w[l] / c1).array() /
            ((v_.w[l] / c2).array().sqrt() + eps_);
        m_.b[l] = beta1_ * m_.b[l] + (1 - beta1_) * grads.b[l];
        v_.b[l] = beta2_ * v_.b[l] +
                  (1 - beta2_) * grads.b[l].cwiseProduct(grads.b[l]);
        net.biases()[l].array() -=
            lr_ * (m_.b[l] / c1).array() /
            ((v_.b[l] / c2).array().sqrt() + eps_);
    }
}

}  // namespace gelsim::rl
