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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "afba/error.hpp"
#include "afba/instance_io.hpp"

using namespace afba;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("afba_test_io_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("matrix file layout") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, -0.5;
  std::stringstream buf;
  write_matrix(buf, m);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 5 + 8 + 8 + 6 * 8);
  CHECK(bytes.substr(0, 5) == "AFBA1");
  CHECK(static_cast<unsigned char>(bytes[5]) == 2);
  CHECK(static_cast<unsigned char>(bytes[13]) == 3);
  // Row-major: the second stored double is m(0, 1) = 2.0 = 0x4000000000000000.
  CHECK(static_cast<unsigned char>(bytes[21 + 8 + 7]) == 0x40);
  CHECK(read_matrix(buf) == m);
}

TEST_CASE("matrix round trip is bit-exact") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(7, 4);
  m(0, 0) = 1.0 / 3.0;
  m(6, 3) = -0.0;
  std::stringstream buf;
  write_matrix(buf, m);
  Eigen::MatrixXd back = read_matrix(buf);
  CHECK(back == m);
  CHECK(std::signbit(back(6, 3)));
}

TEST_CASE("malformed matrix files") {
  std::istringstream bad_magic(std::string("AFBA2") + std::string(16, '\0'));
  CHECK_THROWS_AS(read_matrix(bad_magic), IoError);
  std::stringstream buf;
  write_matrix(buf, Eigen::MatrixXd::Ones(3, 3));
  std::istringstream truncated(buf.str().substr(0, buf.str().size() - 4));
  CHECK_THROWS_AS(read_matrix(truncated), IoError);
}

TEST_CASE("lasso instance directory round trip") {
  LassoParams p;
  p.agents = 4;
  p.dim = 12;
  p.rows = 5;
  p.noise_std = 0.01;
  p.seed = 21;
  LassoInstance inst = generate_lasso(p);
  const fs::path dir = scratch_dir("roundtrip");
  save_lasso_instance(dir, inst);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "D_0.bin"));
  CHECK(fs::exists(dir / "d_3.bin"));
  CHECK(fs::exists(dir / "planted.bin"));

  LassoInstance back = load_lasso_instance(dir);
  CHECK(back.lambda == inst.lambda);
  CHECK(back.seed == inst.seed);
  CHECK(back.planted == inst.planted);
  REQUIRE(back.num_agents() == inst.num_agents());
  for (std::size_t i = 0; i < inst.num_agents(); ++i) {
    CHECK(back.D[i] == inst.D[i]);
    CHECK(back.d[i] == inst.d[i]);
  }
  fs::remove_all(dir);
}

TEST_CASE("loading a missing or inconsistent instance fails") {
  CHECK_THROWS_AS(load_lasso_instance(scratch_dir("missing")), IoError);

  LassoParams p;
  p.agents = 2;
  p.dim = 6;
  p.rows = 3;
  const fs::path dir = scratch_dir("inconsistent");
  save_lasso_instance(dir, generate_lasso(p));
  {
    std::ofstream out(dir / "D_1.bin", std::ios::binary | std::ios::trunc);
    write_matrix(out, Eigen::MatrixXd::Ones(3, 5));
  }
  CHECK_THROWS(load_lasso_instance(dir));
  fs::remove_all(dir);
}
