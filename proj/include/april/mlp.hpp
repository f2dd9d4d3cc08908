#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "april/common.hpp"

namespace april {

/// Fully connected ReLU network with a linear scalar head. Parameters live in
/// one flat vector (per layer: weights column-major, then biases) so the
/// optimizer, the target copy and persistence all work on plain vectors.
class Mlp {
 public:
  Mlp() = default;

  explicit Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    require(sizes_.size() >= 2 && sizes_.back() == 1, ErrorCode::invalid_argument,
            "Mlp needs at least an input and a scalar output layer");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      offsets_.push_back(total);
      total += static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l + 1]) +
               static_cast<std::size_t>(sizes_[l + 1]);
    }
    params_ = Vector::Zero(static_cast<Eigen::Index>(total));
  }

  /// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases.
  template <typename Rng>
  void init(Rng& rng) {
    for (int l = 0; l < layers(); ++l) {
      const double bound = std::sqrt(6.0 / (in(l) + out(l)));
      std::uniform_real_distribution<double> u(-bound, bound);
      auto w = weight(l);
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
      bias(l).setZero();
    }
  }

  int layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_dim() const { return sizes_.front(); }
  const std::vector<int>& sizes() const { return sizes_; }
  const Vector& params() const { return params_; }
  Vector& params() { return params_; }

  Eigen::Map<Matrix> weight(int l) {
    return {params_.data() + offsets_[static_cast<std::size_t>(l)], out(l), in(l)};
  }
  Eigen::Map<const Matrix> weight(int l) const {
    return {params_.data() + offsets_[static_cast<std::size_t>(l)], out(l), in(l)};
  }
  Eigen::Map<Vector> bias(int l) {
    return {params_.data() + offsets_[static_cast<std::size_t>(l)] + out(l) * in(l), out(l)};
  }
  Eigen::Map<const Vector> bias(int l) const {
    return {params_.data() + offsets_[static_cast<std::size_t>(l)] + out(l) * in(l), out(l)};
  }

  /// V for every column of `inputs`.
  Vector forward(const Matrix& inputs) const {
    Matrix h = inputs;
    for (int l = 0; l < layers(); ++l) {
      Matrix z = weight(l) * h;
      z.colwise() += bias(l);
      h = l + 1 < layers() ? Matrix(z.cwiseMax(0.0)) : z;
    }
    return h.row(0).transpose();
  }

  double value(const Vector& x) const { return forward(Matrix(x))(0); }

  /// Gradient (flat, same layout as params) of sum_k upstream[k] * V(inputs.col(k)).
  Vector backward(const Matrix& inputs, const Vector& upstream) const {
    std::vector<Matrix> acts{inputs};
    for (int l = 0; l < layers(); ++l) {
      Matrix z = weight(l) * acts.back();
      z.colwise() += bias(l);
      acts.push_back(l + 1 < layers() ? Matrix(z.cwiseMax(0.0)) : z);
    }
    Vector grad = Vector::Zero(params_.size());
    Matrix delta = upstream.transpose();  // 1 x batch
    for (int l = layers() - 1; l >= 0; --l) {
      const auto off = static_cast<Eigen::Index>(offsets_[static_cast<std::size_t>(l)]);
      Eigen::Map<Matrix> gw(grad.data() + off, out(l), in(l));
      Eigen::Map<Vector> gb(grad.data() + off + out(l) * in(l), out(l));
      gw = delta * acts[static_cast<std::size_t>(l)].transpose();
      gb = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = weight(l).transpose() * delta;
        const Matrix& a = acts[static_cast<std::size_t>(l)];
        delta = back.cwiseProduct((a.array() > 0.0).cast<double>().matrix());
      }
    }
    return grad;
  }

 private:
  int in(int l) const { return sizes_[static_cast<std::size_t>(l)]; }
  int out(int l) const { return sizes_[static_cast<std::size_t>(l) + 1]; }

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  Vector params_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam on a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index n, AdamConfig cfg) : cfg_(cfg), m_(Vector::Zero(n)), v_(Vector::Zero(n)) {}

  void step(Vector& params, const Vector& grad) {
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    params.array() -= cfg_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
  }

  long steps() const { return t_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  Vector m_;
  Vector v_;
  long t_ = 0;
};

}  // namespace april
