#ifndef PROSODY_MODEL_IO_HPP
#define PROSODY_MODEL_IO_HPP

// Model file layout (all integers and doubles little-endian):
//
//   magic      8 bytes  "PRSDMLP\0"
//   version    u32
//   length     u64      payload byte count
//   payload    length bytes
//   crc32      u32      over everything above
//
// Doubles are stored as their IEEE-754 bit patterns, so a save/load round
// trip is lossless.

#include <zlib.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "prosody/error.hpp"
#include "prosody/mlp.hpp"

namespace prosody {

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::array<char, 8> kModelMagic = {'P', 'R', 'S', 'D', 'M', 'L', 'P', '\0'};

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void raw(const std::vector<std::uint8_t>& b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    auto n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> f64s() {
    auto n = u64();
    if (n > (size_ - pos_) / 8) throw ModelFileError("model file payload is truncated");
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  bool done() const { return pos_ == size_; }

 private:
  void need(std::uint64_t n) const {
    if (n > size_ - pos_) throw ModelFileError("model file payload is truncated");
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

inline std::vector<std::uint8_t> encode_payload(const MlpModel& m) {
  ByteWriter w;
  w.str(std::string(to_string(m.task)));
  w.u32(static_cast<std::uint32_t>(m.class_names.size()));
  for (const auto& c : m.class_names) w.str(c);
  w.u32(m.vote_threshold);
  w.u64(m.input.window);
  w.u32(static_cast<std::uint32_t>(m.input.features.size()));
  for (auto f : m.input.features) w.str(std::string(to_string(f)));
  w.u8(m.input.semitones ? 1 : 0);

  w.u64(m.params.input);
  w.u64(m.params.hidden);
  w.u64(m.params.output);
  w.f64s(m.params.w1);
  w.f64s(m.params.b1);
  w.f64s(m.params.w2);
  w.f64s(m.params.b2);
  w.f64s(m.priors);

  w.u32(static_cast<std::uint32_t>(m.norm.features.size()));
  for (auto f : m.norm.features) w.str(std::string(to_string(f)));
  w.f64s(m.norm.mean);
  w.f64s(m.norm.stddev);
  for (bool k : m.norm.kept) w.u8(k ? 1 : 0);

  w.u64(m.seed);
  w.u64(m.best_epoch);
  w.u64(m.train_log.size());
  for (const auto& e : m.train_log) {
    w.u64(e.epoch);
    w.f64(e.train_loss);
    w.f64(e.validation_loss);
  }
  return std::move(w.bytes());
}

inline MlpModel decode_payload(ByteReader& r) {
  MlpModel m;
  try {
    m.task = task_from_string(r.str());
  } catch (const ConfigError& e) {
    throw ModelFileError(std::string("model file: ") + e.what());
  }
  auto nc = r.u32();
  for (std::uint32_t i = 0; i < nc; ++i) m.class_names.push_back(r.str());
  m.vote_threshold = r.u32();
  m.input.window = r.u64();
  auto nf = r.u32();
  m.input.features.clear();
  try {
    for (std::uint32_t i = 0; i < nf; ++i) m.input.features.push_back(feature_from_string(r.str()));
  } catch (const ConfigError& e) {
    throw ModelFileError(std::string("model file: ") + e.what());
  }
  m.input.semitones = r.u8() != 0;

  m.params.input = r.u64();
  m.params.hidden = r.u64();
  m.params.output = r.u64();
  m.params.w1 = r.f64s();
  m.params.b1 = r.f64s();
  m.params.w2 = r.f64s();
  m.params.b2 = r.f64s();
  m.priors = r.f64s();

  auto nn = r.u32();
  try {
    for (std::uint32_t i = 0; i < nn; ++i) m.norm.features.push_back(feature_from_string(r.str()));
  } catch (const ConfigError& e) {
    throw ModelFileError(std::string("model file: ") + e.what());
  }
  m.norm.mean = r.f64s();
  m.norm.stddev = r.f64s();
  for (std::uint32_t i = 0; i < nn; ++i) m.norm.kept.push_back(r.u8() != 0);

  m.seed = r.u64();
  m.best_epoch = r.u64();
  auto nl = r.u64();
  for (std::uint64_t i = 0; i < nl; ++i) {
    EpochLog e;
    e.epoch = r.u64();
    e.train_loss = r.f64();
    e.validation_loss = r.f64();
    m.train_log.push_back(e);
  }
  if (!r.done()) throw ModelFileError("model file has trailing payload bytes");
  return m;
}

inline void check_model(const MlpModel& m) {
  const auto& p = m.params;
  if (p.w1.size() != p.hidden * p.input || p.b1.size() != p.hidden || p.w2.size() != p.output * p.hidden ||
      p.b2.size() != p.output)
    throw ModelFileError("model file: weight shapes are inconsistent");
  if (m.priors.size() != p.output || m.class_names.size() != p.output)
    throw ModelFileError("model file: class count is inconsistent");
  if (m.norm.mean.size() != m.norm.features.size() || m.norm.stddev.size() != m.norm.features.size())
    throw ModelFileError("model file: normalization statistics are inconsistent");
  if (p.input != m.input.window * m.norm.kept_count())
    throw ModelFileError("model file: input size does not match window x features");
  if (!p.all_finite()) throw ModelFileError("model file: non-finite weights");
  for (double q : m.priors)
    if (!(q > 0.0)) throw ModelFileError("model file: priors must be strictly positive");
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_model(const MlpModel& model) {
  auto payload = detail::encode_payload(model);
  detail::ByteWriter w;
  for (char c : kModelMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kModelFormatVersion);
  w.u64(payload.size());
  w.raw(payload);
  auto crc = detail::crc32_of(w.bytes().data(), w.bytes().size());
  w.u32(crc);
  return std::move(w.bytes());
}

inline MlpModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t header = 8 + 4 + 8;
  if (bytes.size() < header + 4) throw ModelFileError("model file checksum error: file truncated");
  if (std::memcmp(bytes.data(), kModelMagic.data(), kModelMagic.size()) != 0)
    throw ModelFileError("not a model file (bad magic)");
  const std::size_t body = bytes.size() - 4;
  detail::ByteReader trailer(bytes.data() + body, 4);
  if (trailer.u32() != detail::crc32_of(bytes.data(), body))
    throw ModelFileError("model file checksum error: file corrupt or truncated");
  detail::ByteReader head(bytes.data() + 8, 12);
  auto version = head.u32();
  if (version != kModelFormatVersion)
    throw ModelFileError("model file version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kModelFormatVersion) + ")");
  auto length = head.u64();
  if (length != body - header) throw ModelFileError("model file length field does not match file size");
  detail::ByteReader r(bytes.data() + header, length);
  auto model = detail::decode_payload(r);
  detail::check_model(model);
  return model;
}

inline void save_model(const MlpModel& model, const std::filesystem::path& path) {
  auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

inline MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace prosody

#endif  // PROSODY_MODEL_IO_HPP
