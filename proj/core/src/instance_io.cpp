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

#include "afba/instance_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "afba/error.hpp"

namespace afba {

namespace {

constexpr std::array<char, 5> kMagic = {'A', 'F', 'B', 'A', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw IoError("matrix file truncated");
  }
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

std::string matrix_name(const char* prefix, std::size_t i) {
  return std::string(prefix) + "_" + std::to_string(i) + ".bin";
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_matrix(out, m);
  if (!out) throw IoError("write failed for " + path.string());
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      put_u64(out, std::bit_cast<std::uint64_t>(m(r, c)));
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::array<char, 5> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError("not an AFBA1 matrix file");
  }
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (rows > (1u << 30) || cols > (1u << 30)) throw IoError("matrix dims implausible");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = std::bit_cast<double>(get_u64(in));
  return m;
}

void save_lasso_instance(const std::filesystem::path& dir, const LassoInstance& inst) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["format"] = "AFBA1";
  manifest["N"] = inst.num_agents();
  manifest["n"] = inst.dim();
  std::vector<std::size_t> rows;
  for (const auto& Di : inst.D) rows.push_back(static_cast<std::size_t>(Di.rows()));
  manifest["m"] = rows;
  manifest["lambda"] = inst.lambda;
  manifest["seed"] = inst.seed;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';

  for (std::size_t i = 0; i < inst.num_agents(); ++i) {
    save_matrix(dir / matrix_name("D", i), inst.D[i]);
    save_matrix(dir / matrix_name("d", i), inst.d[i]);
  }
  save_matrix(dir / "planted.bin", inst.planted);
}

LassoInstance load_lasso_instance(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "AFBA1") throw IoError("unknown instance format");
  const auto agents = manifest.at("N").get<std::size_t>();
  const auto dim = manifest.at("n").get<std::size_t>();
  const auto rows = manifest.at("m").get<std::vector<std::size_t>>();
  if (rows.size() != agents) throw IoError("manifest: m has wrong length");

  std::vector<Eigen::MatrixXd> D(agents);
  std::vector<Eigen::VectorXd> d(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    D[i] = load_matrix(dir / matrix_name("D", i));
    Eigen::MatrixXd di = load_matrix(dir / matrix_name("d", i));
    if (D[i].rows() != static_cast<Eigen::Index>(rows[i]) ||
        D[i].cols() != static_cast<Eigen::Index>(dim) || di.cols() != 1 ||
        di.rows() != D[i].rows()) {
      throw IoError("agent " + std::to_string(i) + ": matrix shape disagrees with manifest");
    }
    d[i] = di.col(0);
  }
  Eigen::MatrixXd planted = load_matrix(dir / "planted.bin");
  if (planted.cols() != 1 || planted.rows() != static_cast<Eigen::Index>(dim)) {
    throw IoError("planted.bin has wrong shape");
  }
  return make_lasso_instance(std::move(D), std::move(d), manifest.at("lambda").get<double>(),
                             planted.col(0), manifest.at("seed").get<std::uint64_t>(),
                             LambdaCheck::unchecked);
}

}  // namespace afba
