// SPDX-License-Identifier: Apache-2.0
#include "model/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "common/error.hpp"

namespace bgcnn {

namespace {

using Kind = ModelFormatError::Kind;

constexpr std::size_t kHeaderSize = 16;  // magic, version, total length
constexpr std::size_t kCrcSize = 4;
constexpr std::uint8_t kTypeU64 = 0;
constexpr std::uint8_t kTypeF64 = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void name(const std::string& s) {
    require(s.size() <= 0xFFFF, "name too long to serialize");
    uint<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size, std::size_t pos) : data_(data), size_(size), pos_(pos) {}

  template <typename U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }
  std::string name() {
    const auto n = uint<std::uint16_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  const std::uint8_t* take(std::size_t n) {
    need(n);
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (n > size_ - pos_) throw ModelFormatError(Kind::Malformed, "model file: record runs past the end of the data");
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_;
};

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large files.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

struct ConfigField {
  const char* name;
  std::size_t ModelConfig::*u64 = nullptr;
  double ModelConfig::*f64 = nullptr;
};

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      {"vocab_size", &ModelConfig::vocab_size},
      {"max_len", &ModelConfig::max_len},
      {"embed_dim", &ModelConfig::embed_dim},
      {"conv_filters", &ModelConfig::conv_filters},
      {"kernel_size", &ModelConfig::kernel_size},
      {"pool", &ModelConfig::pool},
      {"gru1_hidden", &ModelConfig::gru1_hidden},
      {"gru2_hidden", &ModelConfig::gru2_hidden},
      {"dense_hidden", &ModelConfig::dense_hidden},
      {"dropout_rate", nullptr, &ModelConfig::dropout_rate},
      {"learning_rate", nullptr, &ModelConfig::learning_rate},
      {"batch_size", &ModelConfig::batch_size},
      {"epochs", &ModelConfig::epochs},
      {"seed", nullptr, nullptr},
      {"pos_weight", nullptr, &ModelConfig::pos_weight},
  };
  return fields;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(ModelParams<float>& params) {
  Writer w;
  w.bytes(kModelMagic, 4);
  w.uint<std::uint32_t>(kModelFormatVersion);
  w.uint<std::uint64_t>(0);  // total length, patched below

  const auto& fields = config_fields();
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(fields.size()));
  for (const auto& f : fields) {
    w.name(f.name);
    if (f.f64) {
      w.uint<std::uint8_t>(kTypeF64);
      w.uint<std::uint64_t>(std::bit_cast<std::uint64_t>(params.config.*f.f64));
    } else {
      w.uint<std::uint8_t>(kTypeU64);
      w.uint<std::uint64_t>(f.u64 ? static_cast<std::uint64_t>(params.config.*f.u64) : params.config.seed);
    }
  }

  const auto tensors = params.tensors();
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.name(t.name);
    const auto& shape = t.tensor->shape();
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) {
      require(d <= 0xFFFFFFFFu, "tensor dimension too large to serialize");
      w.uint<std::uint32_t>(static_cast<std::uint32_t>(d));
    }
    for (float v : t.tensor->data()) w.uint<std::uint32_t>(std::bit_cast<std::uint32_t>(v));
  }

  auto& buf = w.buffer();
  const std::uint64_t total = buf.size() + kCrcSize;
  for (std::size_t i = 0; i < 8; ++i) buf[8 + i] = static_cast<std::uint8_t>(total >> (8 * i));
  const std::uint32_t crc = crc32_of(buf.data(), buf.size());
  w.uint<std::uint32_t>(crc);
  return std::move(buf);
}

ModelParams<float> deserialize_model(const std::vector<std::uint8_t>& bytes) {
  const std::size_t size = bytes.size();
  const std::size_t magic_avail = std::min<std::size_t>(size, 4);
  if (std::memcmp(bytes.data(), kModelMagic, magic_avail) != 0)
    throw ModelFormatError(Kind::BadMagic, "not a model file (bad magic)");
  if (size < kHeaderSize + kCrcSize) throw ModelFormatError(Kind::Truncated, "model file is truncated");

  Reader header(bytes.data(), size, 4);
  const auto version = header.uint<std::uint32_t>();
  if (version != kModelFormatVersion)
    throw ModelFormatError(Kind::BadVersion, "unsupported model format version " + std::to_string(version) +
                                                 " (expected " + std::to_string(kModelFormatVersion) + ")");
  const auto declared = header.uint<std::uint64_t>();
  if (declared > size)
    throw ModelFormatError(Kind::Truncated, "model file is truncated: " + std::to_string(size) + " of " +
                                                std::to_string(declared) + " bytes");
  if (declared < size) throw ModelFormatError(Kind::Malformed, "model file has trailing bytes");

  const std::size_t body_end = size - kCrcSize;
  Reader trailer(bytes.data(), size, body_end);
  const auto stored_crc = trailer.uint<std::uint32_t>();
  if (crc32_of(bytes.data(), body_end) != stored_crc)
    throw ModelFormatError(Kind::Checksum, "model file checksum mismatch (file is corrupt)");

  Reader r(bytes.data(), body_end, kHeaderSize);
  ModelConfig config;
  std::map<std::string, bool> seen;
  const auto n_fields = r.uint<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_fields; ++i) {
    const std::string name = r.name();
    const auto type = r.uint<std::uint8_t>();
    const auto raw = r.uint<std::uint64_t>();
    const ConfigField* field = nullptr;
    for (const auto& f : config_fields())
      if (name == f.name) field = &f;
    if (!field) throw ModelFormatError(Kind::Malformed, "unknown config field '" + name + "'");
    if (seen[name]) throw ModelFormatError(Kind::Malformed, "duplicate config field '" + name + "'");
    seen[name] = true;
    const std::uint8_t expected = field->f64 ? kTypeF64 : kTypeU64;
    if (type != expected) throw ModelFormatError(Kind::Malformed, "config field '" + name + "' has the wrong type");
    if (field->f64)
      config.*field->f64 = std::bit_cast<double>(raw);
    else if (field->u64)
      config.*field->u64 = static_cast<std::size_t>(raw);
    else
      config.seed = raw;
  }
  for (const auto& f : config_fields())
    if (!seen[f.name]) throw ModelFormatError(Kind::Malformed, std::string("missing config field '") + f.name + "'");
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ModelFormatError(Kind::Malformed, std::string("stored config is invalid: ") + e.what());
  }

  // Shapes come from the config; the file must match them tensor by tensor.
  Rng scratch(0);
  ModelParams<float> params = build_model<float>(config, scratch);
  auto tensors = params.tensors();
  const auto n_tensors = r.uint<std::uint32_t>();
  if (n_tensors != tensors.size())
    throw ModelFormatError(Kind::Malformed, "model file holds " + std::to_string(n_tensors) + " tensors, expected " +
                                                std::to_string(tensors.size()));
  for (auto& t : tensors) {
    const std::string name = r.name();
    if (name != t.name) throw ModelFormatError(Kind::Malformed, "expected tensor '" + t.name + "', found '" + name + "'");
    const auto rank = r.uint<std::uint32_t>();
    Shape shape;
    for (std::uint32_t d = 0; d < rank && d < 8; ++d) shape.push_back(r.uint<std::uint32_t>());
    if (shape != t.tensor->shape())
      throw ModelFormatError(Kind::Malformed, "tensor '" + name + "' has shape " + shape_string(shape) + ", expected " +
                                                  shape_string(t.tensor->shape()));
    auto data = t.tensor->data();
    const std::uint8_t* payload = r.take(data.size() * 4);
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::uint32_t u = 0;
      for (std::size_t b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(payload[4 * i + b]) << (8 * b);
      data[i] = std::bit_cast<float>(u);
    }
  }
  if (r.pos() != body_end) throw ModelFormatError(Kind::Malformed, "unexpected bytes after the last tensor");
  return params;
}

void save_model(ModelParams<float>& params, const std::string& path) {
  const auto bytes = serialize_model(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing model file: " + path);
}

ModelParams<float> load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open model file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace bgcnn
