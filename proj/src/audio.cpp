#include "maskmix/audio.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace maskmix::audio {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

}  // namespace

double peak_abs(const AudioClip& clip) {
  double peak = 0.0;
  for (double s : clip.samples) peak = std::max(peak, std::fabs(s));
  return peak;
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();

  require(size >= 12 && std::memcmp(p, "RIFF", 4) == 0 && std::memcmp(p + 8, "WAVE", 4) == 0,
          "not a RIFF/WAVE file: " + path.string());

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = p + pos;
    std::uint32_t chunk_size = get_u32(chunk + 4);
    require(pos + 8 + chunk_size <= size, "malformed chunk in " + path.string());
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      require(chunk_size >= 16, "malformed fmt chunk in " + path.string());
      format = get_u16(chunk + 8);
      channels = get_u16(chunk + 10);
      rate = get_u32(chunk + 12);
      bits = get_u16(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  require(have_fmt && data != nullptr, "missing fmt or data chunk in " + path.string());
  require(channels == 1, "unsupported channel count (" + std::to_string(channels) +
                             ") in " + path.string());
  require(rate > 0, "invalid sample rate in " + path.string());

  AudioClip clip;
  clip.rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    std::size_t n = data_size / 2;
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto raw = static_cast<std::int16_t>(get_u16(data + 2 * i));
      clip.samples[i] = static_cast<double>(raw) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    std::size_t n = data_size / 4;
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t u = get_u32(data + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      clip.samples[i] = static_cast<double>(f);
    }
  } else {
    throw std::runtime_error("unsupported encoding (format " + std::to_string(format) +
                             ", " + std::to_string(bits) + " bits) in " + path.string());
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding) {
  if (clip.rate <= 0) throw std::invalid_argument("write_wav: rate must be positive");
  for (double s : clip.samples)
    if (!std::isfinite(s)) throw std::invalid_argument("write_wav: non-finite sample");

  const bool pcm = encoding == WavEncoding::pcm16;
  const std::uint16_t bytes_per = pcm ? 2 : 4;
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_size = n * bytes_per;

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  put_u32(out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.rate));
  put_u32(out, static_cast<std::uint32_t>(clip.rate) * bytes_per);
  put_u16(out, bytes_per);
  put_u16(out, pcm ? 16 : 32);
  out.append("data");
  put_u32(out, data_size);

  if (pcm) {
    for (double s : clip.samples) {
      double clamped = std::min(1.0, std::max(-1.0, s));
      auto q = static_cast<long>(std::llround(clamped * 32768.0));
      q = std::min(32767L, std::max(-32768L, q));
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
  } else {
    for (double s : clip.samples) {
      auto f = static_cast<float>(s);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      put_u32(out, u);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(os.good(), "cannot write file: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  require(os.good(), "write failed: " + path.string());
}

AudioClip peak_normalize(const AudioClip& clip) {
  double peak = peak_abs(clip);
  if (peak == 0.0) throw std::runtime_error("degenerate silent signal");
  AudioClip out;
  out.rate = clip.rate;
  out.samples.resize(clip.samples.size());
  // Division (not multiplication by the reciprocal) so the peak sample maps
  // to exactly +-1.0 and normalization is idempotent.
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    out.samples[i] = clip.samples[i] / peak;
  return out;
}

MixBundle mix_stems(const StemSet& stems) {
  if (stems.vocal_stems.empty() || stems.accomp_stems.empty())
    throw std::invalid_argument("mix_stems: need at least one stem per group");
  const std::size_t len = stems.vocal_stems.front().samples.size();
  const int rate = stems.vocal_stems.front().rate;
  auto check = [&](const AudioClip& c) {
    if (c.samples.size() != len || c.rate != rate)
      throw std::invalid_argument("mix_stems: stems must share length and rate");
  };
  for (const auto& c : stems.vocal_stems) check(c);
  for (const auto& c : stems.accomp_stems) check(c);

  auto sum_normalized = [&](const std::vector<AudioClip>& group) {
    AudioClip acc;
    acc.rate = rate;
    acc.samples.assign(len, 0.0);
    for (const auto& stem : group) {
      AudioClip ns = peak_normalize(stem);
      for (std::size_t i = 0; i < len; ++i) acc.samples[i] += ns.samples[i];
    }
    return peak_normalize(acc);
  };

  MixBundle bundle;
  bundle.vocal_mix = sum_normalized(stems.vocal_stems);
  bundle.accomp_mix = sum_normalized(stems.accomp_stems);
  bundle.mixture.rate = rate;
  bundle.mixture.samples.resize(len);
  for (std::size_t i = 0; i < len; ++i)
    bundle.mixture.samples[i] = bundle.vocal_mix.samples[i] + bundle.accomp_mix.samples[i];
  return bundle;
}

}  // namespace maskmix::audio
