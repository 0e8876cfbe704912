// Copyright 2026 The pegsafe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pegsafe/mlp.hpp"

#include <cmath>

namespace pegsafe::rl {

using ConstMap = Eigen::Map<const Matrix>;
using ConstVecMap = Eigen::Map<const Vector>;

int MlpLayout::num_params() const {
  int n = 0;
  for (int k = 0; k < num_layers(); ++k) n += sizes[k + 1] * sizes[k] + sizes[k + 1];
  return n;
}

const Matrix& mlp_forward(const MlpLayout& layout, const double* params,
                          const Matrix& input, MlpCache& cache) {
  const int layers = layout.num_layers();
  cache.activations.resize(static_cast<std::size_t>(layers + 1));
  cache.activations[0] = input;
  const double* p = params;
  for (int k = 0; k < layers; ++k) {
    const int in = layout.sizes[k];
    const int out = layout.sizes[k + 1];
    ConstMap w(p, out, in);
    ConstVecMap b(p + out * in, out);
    p += out * in + out;
    Matrix z = w * cache.activations[k];
    z.colwise() += b;
    if (k + 1 < layers) z = z.array().tanh();
    cache.activations[k + 1] = std::move(z);
  }
  return cache.activations.back();
}

void mlp_backward(const MlpLayout& layout, const double* params,
                  const MlpCache& cache, const Matrix& grad_output,
                  double* grad_params, Matrix* grad_input) {
  const int layers = layout.num_layers();
  std::vector<int> offsets(static_cast<std::size_t>(layers));
  int off = 0;
  for (int k = 0; k < layers; ++k) {
    offsets[k] = off;
    off += layout.sizes[k + 1] * layout.sizes[k] + layout.sizes[k + 1];
  }
  Matrix delta = grad_output;
  for (int k = layers - 1; k >= 0; --k) {
    const int in = layout.sizes[k];
    const int out = layout.sizes[k + 1];
    if (k + 1 < layers) {
      // tanh' = 1 - a^2
      delta.array() *= 1.0 - cache.activations[k + 1].array().square();
    }
    Eigen::Map<Matrix> gw(grad_params + offsets[k], out, in);
    Eigen::Map<Vector> gb(grad_params + offsets[k] + out * in, out);
    gw.noalias() += delta * cache.activations[k].transpose();
    gb += delta.rowwise().sum();
    if (k > 0 || grad_input != nullptr) {
      ConstMap w(params + offsets[k], out, in);
      Matrix next = w.transpose() * delta;
      if (k == 0) {
        *grad_input = std::move(next);
      } else {
        delta = std::move(next);
      }
    }
  }
}

void mlp_init(const MlpLayout& layout, double* params, std::mt19937_64& rng,
              double output_gain) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double* p = params;
  for (int k = 0; k < layout.num_layers(); ++k) {
    const int in = layout.sizes[k];
    const int out = layout.sizes[k + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    if (k + 1 == layout.num_layers()) scale *= output_gain;
    for (int i = 0; i < out * in; ++i) p[i] = gauss(rng) * scale;
    for (int i = 0; i < out; ++i) p[out * in + i] = 0.0;
    p += out * in + out;
  }
}

}  // namespace pegsafe::rl
