/*
 * Copyright 2026 The facetbandit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "facetbandit/dataset.hpp"
#include "facetbandit/errors.hpp"
#include "facetbandit/random.hpp"

namespace facetbandit {

struct StepLosses {
  double before = 0.0;
  double after = 0.0;
};

/// A trainable model as seen by a curriculum scheduler.
class Learner {
 public:
  virtual ~Learner() = default;

  /// One optimizer step on `batch`. Returns the batch loss measured just
  /// before and just after the parameter update.
  virtual StepLosses train_step(const Batch& batch) = 0;

  /// Mean loss over `batch`. Must not modify parameters.
  virtual double eval(const Batch& batch) const = 0;

  virtual std::uint64_t parameter_hash() const = 0;
};

/// Mean squared error on a single real output.
struct SquaredError {
  std::size_t outputs() const noexcept { return 1; }

  double loss(std::span<const double> z, double target) const {
    const double d = z[0] - target;
    return d * d;
  }

  void gradient(std::span<const double> z, double target, std::span<double> g) const {
    g[0] = 2.0 * (z[0] - target);
  }
};

/// Softmax cross-entropy; the target holds the class id.
struct SoftmaxCrossEntropy {
  std::size_t classes = 2;

  std::size_t outputs() const noexcept { return classes; }

  double loss(std::span<const double> z, double target) const {
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    return top + std::log(sum) - z[label(target)];
  }

  void gradient(std::span<const double> z, double target, std::span<double> g) const {
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      g[k] = std::exp(z[k] - top);
      sum += g[k];
    }
    for (double& v : g) v /= sum;
    g[label(target)] -= 1.0;
  }

 private:
  std::size_t label(double target) const {
    const auto k = static_cast<std::size_t>(target);
    if (target < 0.0 || k >= classes) throw ContractError("class label out of range");
    return k;
  }
};

/// Affine model z = W x + b trained by plain SGD with a fixed step size.
/// Parameters are stored row-major as `outputs` rows of (input_dim + 1),
/// the bias last in each row.
template <class Head>
class LinearLearner final : public Learner {
 public:
  LinearLearner(std::size_t input_dim, Head head, double step_size, double init_scale = 0.0,
                std::uint64_t seed = 0)
      : dim_(input_dim), head_(std::move(head)), step_size_(step_size),
        params_(head_.outputs() * (input_dim + 1), 0.0) {
    if (!(step_size >= 0.0)) throw ConfigError("learner step size must be nonnegative");
    if (init_scale > 0.0) {
      Rng rng(seed);
      for (double& p : params_) p = init_scale * rng.normal();
    }
  }

  StepLosses train_step(const Batch& batch) override {
    std::vector<double> grad(params_.size(), 0.0);
    StepLosses out;
    out.before = loss_and_gradient(batch, &grad);
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= step_size_ * grad[i];
    out.after = loss_and_gradient(batch, nullptr);
    return out;
  }

  double eval(const Batch& batch) const override { return loss_and_gradient(batch, nullptr); }

  std::uint64_t parameter_hash() const override {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (double p : params_) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &p, sizeof(double));
      for (unsigned char b : bytes) h = (h ^ b) * 0x100000001b3ULL;
    }
    return h;
  }

  double loss(const Batch& batch) const { return loss_and_gradient(batch, nullptr); }

  std::vector<double> gradient(const Batch& batch) const {
    std::vector<double> grad(params_.size(), 0.0);
    loss_and_gradient(batch, &grad);
    return grad;
  }

  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  std::size_t input_dim() const noexcept { return dim_; }
  const Head& head() const noexcept { return head_; }

 private:
  // Mean loss over the batch; accumulates the mean gradient into *grad when given.
  double loss_and_gradient(const Batch& batch, std::vector<double>* grad) const {
    if (batch.empty()) throw ContractError("empty batch");
    const std::size_t k_out = head_.outputs();
    const std::size_t row = dim_ + 1;
    std::vector<double> z(k_out), dz(k_out);
    double total = 0.0;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const Example* ex : batch) {
      const auto& x = ex->features;
      if (x.size() != dim_) throw ContractError("feature dimension mismatch");
      for (std::size_t k = 0; k < k_out; ++k) {
        const double* w = params_.data() + k * row;
        double acc = w[dim_];
        for (std::size_t j = 0; j < dim_; ++j) acc += w[j] * x[j];
        z[k] = acc;
      }
      total += head_.loss(z, ex->target);
      if (grad != nullptr) {
        head_.gradient(z, ex->target, dz);
        for (std::size_t k = 0; k < k_out; ++k) {
          const double s = dz[k] * inv_n;
          if (s == 0.0) continue;
          double* g = grad->data() + k * row;
          for (std::size_t j = 0; j < dim_; ++j) g[j] += s * x[j];
          g[dim_] += s;
        }
      }
    }
    return total * inv_n;
  }

  std::size_t dim_;
  Head head_;
  double step_size_;
  std::vector<double> params_;
};

using LinearRegressor = LinearLearner<SquaredError>;
using SoftmaxClassifier = LinearLearner<SoftmaxCrossEntropy>;

}  // namespace facetbandit
