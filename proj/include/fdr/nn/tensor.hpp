// Copyright 2026 The fdrpred Authors
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

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

namespace fdr::nn {

/// Row = time step, column = feature. Vectors are 1 x features.
using Tensor = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Shape {
  Index steps = 1;
  Index features = 1;

  Index numel() const { return steps * features; }
  std::string str() const { return "(" + std::to_string(steps) + "," + std::to_string(features) + ")"; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline Shape shape_of(const Tensor& t) { return {t.rows(), t.cols()}; }

/// Throws ShapeError unless `t` has shape `expected`.
void require_shape(const Tensor& t, Shape expected, const char* where);

/// Throws ValidationError on NaN/Inf. Compiled out in release builds.
void check_finite(const Tensor& t, const char* where);

}  // namespace fdr::nn
