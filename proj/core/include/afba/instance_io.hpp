// Copyright 2026 The afba Authors
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

#include <filesystem>
#include <iosfwd>

#include "afba/problem.hpp"

namespace afba {

/// Dense matrix file: 5-byte magic "AFBA1", rows and cols as little-endian
/// uint64, then rows * cols little-endian IEEE-754 doubles in row-major order.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& in);

/// Writes manifest.json plus D_<i>.bin, d_<i>.bin (column vectors) and
/// planted.bin into dir, creating it if needed. See docs/instance_format.md.
void save_lasso_instance(const std::filesystem::path& dir, const LassoInstance& inst);
LassoInstance load_lasso_instance(const std::filesystem::path& dir);

}  // namespace afba
