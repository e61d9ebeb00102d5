#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "hapticaffect/error.hpp"
#include "hapticaffect/synth.hpp"

namespace hapticaffect {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_at(std::span<const std::uint8_t> b, std::size_t at, const char (&tag)[5]) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

std::vector<std::uint8_t> encode_wav(const WaveBuffer& buf) {
  constexpr std::uint16_t kChannels = 1;
  constexpr std::uint16_t kBits = 16;
  const auto rate = static_cast<std::uint32_t>(buf.sample_rate);
  const auto data_bytes = static_cast<std::uint32_t>(buf.samples.size() * 2);

  std::vector<std::uint8_t> out;
  out.reserve(kWavHeaderSize + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, kChannels);
  put_u32(out, rate);
  put_u32(out, rate * kChannels * kBits / 8);
  put_u16(out, kChannels * kBits / 8);
  put_u16(out, kBits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (const std::int16_t s : buf.samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

WaveBuffer decode_wav(std::span<const std::uint8_t> b) {
  if (b.size() < kWavHeaderSize || !tag_at(b, 0, "RIFF") || !tag_at(b, 8, "WAVE"))
    throw InputError("not a RIFF/WAVE stream");

  std::optional<int> rate;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const std::uint32_t size = get_u32(b, at + 4);
    const std::size_t body = at + 8;
    if (body + size > b.size()) throw InputError("truncated WAV chunk");
    if (tag_at(b, at, "fmt ")) {
      if (size < 16) throw InputError("short fmt chunk");
      if (get_u16(b, body) != 1 || get_u16(b, body + 2) != 1 || get_u16(b, body + 14) != 16)
        throw InputError("only PCM 16-bit mono WAV is supported");
      rate = static_cast<int>(get_u32(b, body + 4));
    } else if (tag_at(b, at, "data")) {
      if (!rate) throw InputError("data chunk precedes fmt chunk");
      if (size % 2 != 0) throw InputError("odd-sized PCM data chunk");
      WaveBuffer buf;
      buf.sample_rate = *rate;
      buf.samples.resize(size / 2);
      for (std::size_t i = 0; i < buf.samples.size(); ++i)
        buf.samples[i] = static_cast<std::int16_t>(get_u16(b, body + 2 * i));
      return buf;
    }
    at = body + size + (size & 1);
  }
  throw InputError("WAV stream has no data chunk");
}

void write_wav(const WaveBuffer& buf, const std::filesystem::path& path) {
  const auto bytes = encode_wav(buf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed", path.string());
}

WaveBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

}  // namespace hapticaffect
