// src/checkpoint.cpp
//
// Copyright 2026  The mvmdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvmdd/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "binary_io.hpp"
#include "mvmdd/error.hpp"

namespace mvmdd {

namespace {

constexpr char kMagic[4] = {'M', 'V', 'C', 'K'};
constexpr std::size_t kPreamble = 12;

nlohmann::ordered_json net_to_json(const NetConfig& n) {
  nlohmann::ordered_json j;
  j["pool_dim"] = n.pool_dim;
  j["kernel_size"] = n.kernel_size;
  j["stride"] = n.stride;
  j["channels"] = n.channels;
  j["emb_dim"] = n.emb_dim;
  j["af_hidden"] = n.af_hidden;
  j["num_phones"] = n.num_phones;
  j["af_classes"] = n.af_classes;
  return j;
}

NetConfig net_from_json(const nlohmann::json& j) {
  NetConfig n;
  n.pool_dim = j.at("pool_dim").get<int>();
  n.kernel_size = j.at("kernel_size").get<int>();
  n.stride = j.at("stride").get<int>();
  n.channels = j.at("channels").get<int>();
  n.emb_dim = j.at("emb_dim").get<int>();
  n.af_hidden = j.at("af_hidden").get<int>();
  n.num_phones = j.at("num_phones").get<int>();
  n.af_classes = j.at("af_classes").get<std::array<int, kNumAfStreams>>();
  return n;
}

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  ckpt.params.check_shapes(ckpt.net);
  nlohmann::ordered_json header;
  header["net"] = net_to_json(ckpt.net);
  header["config"] = ckpt.config_echo;
  header["step"] = ckpt.step;
  header["dev_per"] = ckpt.dev_per && std::isfinite(*ckpt.dev_per) ? nlohmann::json(*ckpt.dev_per)
                                                                   : nlohmann::json(nullptr);
  header["tensors"] = nlohmann::json::array();
  ckpt.params.visit([&header](const std::string& name, const Matrix& m) {
    header["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  });
  const std::string text = header.dump();

  std::string buf(kMagic, 4);
  binary::put_le<std::uint16_t>(buf, kCheckpointVersion);
  binary::put_le<std::uint16_t>(buf, 0);
  binary::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(text.size()));
  buf += text;
  ckpt.params.visit([&buf](const std::string&, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) binary::put_le<double>(buf, m.data()[i]);
  });
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed to write checkpoint");
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  write_checkpoint(ckpt, out);
}

Checkpoint read_checkpoint(std::istream& in) {
  const std::string buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (buf.size() < kPreamble) throw FormatError("checkpoint shorter than its preamble");
  if (buf.compare(0, 4, kMagic, 4) != 0) throw FormatError("bad checkpoint magic");
  const auto version = binary::get_le<std::uint16_t>(buf.data() + 4);
  if (version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = binary::get_le<std::uint32_t>(buf.data() + 8);
  if (buf.size() - kPreamble < header_len) throw FormatError("truncated checkpoint header");

  Checkpoint ckpt;
  std::size_t offset = kPreamble + header_len;
  try {
    const auto header = nlohmann::json::parse(buf.substr(kPreamble, header_len));
    ckpt.net = net_from_json(header.at("net"));
    ckpt.net.validate();
    ckpt.config_echo = header.at("config").get<std::string>();
    ckpt.step = header.at("step").get<std::int64_t>();
    if (!header.at("dev_per").is_null()) ckpt.dev_per = header.at("dev_per").get<double>();
    ckpt.params = ModelParams::zeros(ckpt.net);

    const auto& tensors = header.at("tensors");
    std::size_t i = 0;
    ckpt.params.for_each([&](const std::string& name, Matrix& m) {
      if (i >= tensors.size()) throw FormatError("checkpoint lacks tensor " + name);
      const auto& t = tensors[i++];
      if (t.at("name").get<std::string>() != name || t.at("rows").get<Eigen::Index>() != m.rows() ||
          t.at("cols").get<Eigen::Index>() != m.cols())
        throw FormatError("checkpoint tensor " + t.at("name").get<std::string>() +
                          " does not match the network shape at " + name);
      const std::size_t bytes = static_cast<std::size_t>(m.size()) * 8;
      if (buf.size() - offset < bytes) throw FormatError("truncated checkpoint tensor " + name);
      for (Eigen::Index k = 0; k < m.size(); ++k, offset += 8)
        m.data()[k] = binary::get_le<double>(buf.data() + offset);
    });
    if (i != tensors.size()) throw FormatError("checkpoint has unexpected extra tensors");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("bad checkpoint network: ") + e.what());
  }
  if (offset != buf.size()) throw FormatError("trailing bytes after checkpoint tensors");
  return ckpt;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  try {
    return read_checkpoint(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace mvmdd
