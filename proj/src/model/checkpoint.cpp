// Copyright 2026 The DGN Authors.
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

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "dgn/error.hpp"
#include "dgn/model.hpp"

namespace dgn::model {

namespace {

constexpr char kMagic[8] = {'D', 'G', 'N', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoints assume little-endian hosts");

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}
  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw FormatError(source_ + ": truncated checkpoint");
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    if (n > (1u << 20)) throw FormatError(source_ + ": implausible string length in checkpoint");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw FormatError(source_ + ": truncated checkpoint");
    return s;
  }

 private:
  std::istream& in_;
  std::string source_;
};

void write_config(Writer& w, const DgnConfig& c) {
  w.put<std::uint64_t>(c.vocab_size);
  w.put<std::uint64_t>(c.charge_count);
  w.put<std::uint64_t>(c.embed_dim);
  w.put<std::uint64_t>(c.charge_dim);
  w.put<std::uint64_t>(c.hidden_dim);
  w.put<std::uint64_t>(c.depth);
  w.put<std::uint64_t>(c.filter_widths.size());
  for (std::size_t width : c.filter_widths) w.put<std::uint64_t>(width);
  w.put<std::uint64_t>(c.filters);
  w.put<std::uint64_t>(c.seed);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.encoder));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.target));
  w.put<std::uint8_t>(c.charge_blind ? 1 : 0);
}

DgnConfig read_config(Reader& r) {
  DgnConfig c;
  c.vocab_size = r.get<std::uint64_t>();
  c.charge_count = r.get<std::uint64_t>();
  c.embed_dim = r.get<std::uint64_t>();
  c.charge_dim = r.get<std::uint64_t>();
  c.hidden_dim = r.get<std::uint64_t>();
  c.depth = r.get<std::uint64_t>();
  const auto widths = r.get<std::uint64_t>();
  if (widths > 64) throw FormatError("implausible filter width count in checkpoint");
  c.filter_widths.resize(widths);
  for (auto& width : c.filter_widths) width = r.get<std::uint64_t>();
  c.filters = r.get<std::uint64_t>();
  c.seed = r.get<std::uint64_t>();
  const auto encoder = r.get<std::uint32_t>();
  const auto target = r.get<std::uint32_t>();
  if (encoder > 3 || target > 1) throw FormatError("unknown encoder or target in checkpoint");
  c.encoder = static_cast<EncoderKind>(encoder);
  c.target = static_cast<data::Target>(target);
  c.charge_blind = r.get<std::uint8_t>() != 0;
  return c;
}

std::ifstream open_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw FormatError(path.string() + " is not a checkpoint");
  return in;
}

void read_parameters(Reader& r, Model& model, const std::string& source) {
  const auto count = r.get<std::uint64_t>();
  auto params = model.parameters();
  if (count != params.size())
    throw ConfigError(source + ": checkpoint holds " + std::to_string(count) +
                      " parameters, model expects " + std::to_string(params.size()));
  for (Parameter* p : params) {
    const std::string name = r.get_string();
    if (name != p->name)
      throw ConfigError(source + ": parameter '" + name + "' where '" + p->name + "' expected");
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    if (rows != p->value.rows() || cols != p->value.cols())
      throw ConfigError(source + ": parameter '" + name + "' is " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", model expects " +
                        shape_string(p->value.shape()));
    for (double& v : p->value.values()) v = r.get<double>();
  }
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  Writer w(out);
  w.put<std::uint32_t>(kVersion);
  write_config(w, model.config());
  const auto params = model.parameters();
  w.put<std::uint64_t>(params.size());
  for (const Parameter* p : params) {
    w.put_string(p->name);
    w.put<std::uint64_t>(p->value.rows());
    w.put<std::uint64_t>(p->value.cols());
    for (double v : p->value.values()) w.put<double>(v);
  }
  out.flush();
  if (!out) throw FormatError("failed writing checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in = open_checkpoint(path);
  Reader r(in, path.string());
  if (r.get<std::uint32_t>() != kVersion)
    throw FormatError(path.string() + ": unsupported checkpoint version");
  Model model(read_config(r));
  read_parameters(r, model, path.string());
  return model;
}

void load_checkpoint_into(Model& model, const std::filesystem::path& path) {
  std::ifstream in = open_checkpoint(path);
  Reader r(in, path.string());
  if (r.get<std::uint32_t>() != kVersion)
    throw FormatError(path.string() + ": unsupported checkpoint version");
  const DgnConfig stored = read_config(r);
  if (!(stored == model.config()))
    throw ConfigError(path.string() + ": checkpoint configuration does not match the model");
  read_parameters(r, model, path.string());
}

}  // namespace dgn::model
