#include "dubf/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "dubf/errors.hpp"

namespace dubf {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

[[noreturn]] void fail(std::size_t offset, const std::string& what) {
  std::ostringstream msg;
  msg << "WAV parse error at byte " << offset << ": " << what;
  throw DataError(msg.str());
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  std::uint32_t u32() {
    need(4, "truncated 32-bit field");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + k])) << (8 * k);
    pos_ += 4;
    return v;
  }

  std::uint16_t u16() {
    need(2, "truncated 16-bit field");
    const auto v = static_cast<std::uint16_t>(
        static_cast<unsigned char>(bytes_[pos_]) |
        (static_cast<unsigned char>(bytes_[pos_ + 1]) << 8));
    pos_ += 2;
    return v;
  }

  std::string_view tag() {
    need(4, "truncated chunk tag");
    auto t = bytes_.substr(pos_, 4);
    pos_ += 4;
    return t;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) fail(pos_, what);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_wav(const MultichannelSignal& signal) {
  const auto channels = static_cast<std::uint16_t>(signal.channels());
  const auto rate = static_cast<std::uint32_t>(std::lround(signal.sample_rate()));
  const std::uint64_t data_bytes64 = static_cast<std::uint64_t>(signal.length()) * channels * 4;
  if (data_bytes64 > 0xFFFFFFF0ULL) throw InvalidArgument("encode_wav: signal too long for RIFF");
  const auto data_bytes = static_cast<std::uint32_t>(data_bytes64);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, kFormatFloat);
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * channels * 4);
  put_u16(out, static_cast<std::uint16_t>(channels * 4));
  put_u16(out, 32);
  out += "data";
  put_u32(out, data_bytes);
  for (std::size_t t = 0; t < signal.length(); ++t)
    for (std::size_t ch = 0; ch < signal.channels(); ++ch)
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(signal.channel(ch)[t])));
  return out;
}

MultichannelSignal decode_wav(std::string_view bytes) {
  Reader r(bytes);
  if (r.tag() != "RIFF") fail(0, "missing RIFF tag");
  r.u32();  // riff size; not trusted
  if (r.tag() != "WAVE") fail(8, "missing WAVE tag");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (r.remaining() > 0) {
    const std::size_t chunk_pos = r.pos();
    const std::string_view id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) fail(chunk_pos, "fmt chunk shorter than 16 bytes");
      const std::string_view body = r.take(size, "truncated fmt chunk");
      Reader f(body);
      format = f.u16();
      channels = f.u16();
      rate = f.u32();
      f.u32();  // byte rate
      f.u16();  // block align
      bits = f.u16();
      if (format == kFormatExtensible) {
        if (size < 40) fail(chunk_pos, "extensible fmt chunk shorter than 40 bytes");
        f.u16();  // cbSize
        f.u16();  // valid bits
        f.u32();  // channel mask
        format = f.u16();  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(chunk_pos, "data chunk before fmt chunk");
      if (channels == 0) fail(chunk_pos, "zero channels");
      if (rate == 0) fail(chunk_pos, "zero sample rate");
      std::size_t width = 0;
      if (format == kFormatFloat && bits == 32)
        width = 4;
      else if (format == kFormatPcm && bits == 16)
        width = 2;
      else
        fail(chunk_pos, "unsupported format tag " + std::to_string(format) + " with " +
                            std::to_string(bits) + " bits");
      const std::size_t frame = width * channels;
      if (size % frame != 0) fail(chunk_pos, "data size is not a whole number of frames");
      const std::string_view body = r.take(size, "truncated data chunk");
      const std::size_t frames = size / frame;
      std::vector<std::vector<double>> out(channels, std::vector<double>(frames));
      Reader d(body);
      for (std::size_t t = 0; t < frames; ++t)
        for (std::size_t ch = 0; ch < channels; ++ch) {
          if (width == 4)
            out[ch][t] = static_cast<double>(std::bit_cast<float>(d.u32()));
          else
            out[ch][t] = static_cast<double>(static_cast<std::int16_t>(d.u16())) / 32768.0;
        }
      return MultichannelSignal(std::move(out), static_cast<double>(rate));
    } else {
      r.take(size, "truncated chunk");
    }
    if (size % 2 == 1 && r.remaining() > 0) r.take(1, "missing pad byte");
  }
  fail(r.pos(), "no data chunk");
}

void write_wav(const std::filesystem::path& path, const MultichannelSignal& signal) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
  const std::string bytes = encode_wav(signal);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

MultichannelSignal read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

}  // namespace dubf
