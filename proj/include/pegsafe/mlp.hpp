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

#ifndef PEGSAFE_MLP_HPP_
#define PEGSAFE_MLP_HPP_

#include <Eigen/Core>

#include <random>
#include <vector>

namespace pegsafe::rl {

// Column j of a batch matrix is sample j.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Fully connected net with tanh hidden layers and a linear output. The
// parameters of layer k are stored as W_k (out x in, column-major) followed by
// b_k in one flat array.
struct MlpLayout {
  std::vector<int> sizes;  // {in, hidden..., out}

  int num_layers() const { return static_cast<int>(sizes.size()) - 1; }
  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  int num_params() const;
};

struct MlpCache {
  // activations[0] is the input, activations.back() the output.
  std::vector<Matrix> activations;
};

const Matrix& mlp_forward(const MlpLayout& layout, const double* params,
                          const Matrix& input, MlpCache& cache);

// Adds dLoss/dParams to `grad_params`. `grad_input` receives dLoss/dInput
// when non-null.
void mlp_backward(const MlpLayout& layout, const double* params,
                  const MlpCache& cache, const Matrix& grad_output,
                  double* grad_params, Matrix* grad_input = nullptr);

// Gaussian init scaled by 1/sqrt(fan_in); the last layer is further scaled by
// `output_gain`. Biases start at zero.
void mlp_init(const MlpLayout& layout, double* params, std::mt19937_64& rng,
              double output_gain);

}  // namespace pegsafe::rl

#endif  // PEGSAFE_MLP_HPP_
