#include "holo/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "holo/error.hpp"

namespace holo {
namespace {

static_assert(std::endian::native == std::endian::little,
              "HOLO1 encoding assumes a little-endian host");

constexpr char kMagic[5] = {'H', 'O', 'L', 'O', '1'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

std::uint16_t to_u16(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 65535.0) return 65535;
  return static_cast<std::uint16_t>(std::lround(v));
}

std::vector<std::uint8_t> encode_grid(const RealGrid& grid, double pitch, HologramKind kind,
                                      PixelType dtype) {
  if (grid.width() > UINT32_MAX || grid.height() > UINT32_MAX)
    throw ConfigError("holo: grid too large for HOLO1");
  const std::size_t bpp = dtype == PixelType::f32 ? 4 : 2;
  std::vector<std::uint8_t> out;
  out.reserve(kHoloHeaderSize + grid.size() * bpp);
  out.insert(out.end(), kMagic, kMagic + 5);
  put(out, static_cast<std::uint32_t>(grid.width()));
  put(out, static_cast<std::uint32_t>(grid.height()));
  put(out, pitch);
  put(out, static_cast<std::uint8_t>(kind));
  put(out, static_cast<std::uint8_t>(dtype));
  for (double v : grid) {
    if (dtype == PixelType::f32)
      put(out, static_cast<float>(v));
    else
      put(out, to_u16(v));
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string_view header,
                                           std::size_t columns) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw IoError("csv: expected header '" + std::string(header) + "'");
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || !std::isfinite(v))
        throw IoError("csv: bad number on line " + std::to_string(lineno));
      row.push_back(v);
      p = next;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') throw IoError("csv: bad separator on line " + std::to_string(lineno));
      ++p;
    }
    if (row.size() != columns)
      throw IoError("csv: expected " + std::to_string(columns) + " fields on line " +
                    std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

constexpr std::string_view kLabelHeader = "x_um,y_um,z_mm,d_um";
constexpr std::string_view kDetectionHeader = "x_um,y_um,z_mm,d_um,score";

}  // namespace

std::vector<std::uint8_t> encode_hologram(const Hologram& h, PixelType dtype) {
  return encode_grid(h.values, h.pitch, h.kind, dtype);
}

Hologram decode_hologram(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHoloHeaderSize || std::memcmp(bytes.data(), kMagic, 5) != 0)
    throw IoError("holo: not a HOLO1 file");
  const auto width = get<std::uint32_t>(bytes, 5);
  const auto height = get<std::uint32_t>(bytes, 9);
  const auto pitch = get<double>(bytes, 13);
  const auto kind = get<std::uint8_t>(bytes, 21);
  const auto dtype = get<std::uint8_t>(bytes, 22);
  if (kind > static_cast<std::uint8_t>(HologramKind::power_spectrum))
    throw IoError("holo: unknown kind " + std::to_string(kind));
  if (dtype > 1) throw IoError("holo: unknown dtype " + std::to_string(dtype));
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw IoError("holo: invalid pitch");
  const std::size_t bpp = dtype == 0 ? 4 : 2;
  const std::size_t n = std::size_t(width) * height;
  if (bytes.size() != kHoloHeaderSize + n * bpp) throw IoError("holo: truncated or oversized data");

  Hologram h{RealGrid(height, width), pitch, static_cast<HologramKind>(kind)};
  auto dst = h.values.values();
  const std::uint8_t* src = bytes.data() + kHoloHeaderSize;
  for (std::size_t i = 0; i < n; ++i) {
    if (dtype == 0) {
      float f;
      std::memcpy(&f, src + 4 * i, 4);
      dst[i] = f;
    } else {
      std::uint16_t u;
      std::memcpy(&u, src + 2 * i, 2);
      dst[i] = u;
    }
  }
  return h;
}

void write_hologram(const std::filesystem::path& path, const Hologram& h, PixelType dtype) {
  write_bytes(path, encode_hologram(h, dtype));
}

Hologram read_hologram(const std::filesystem::path& path) {
  try {
    return decode_hologram(read_bytes(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_grid(const std::filesystem::path& path, const RealGrid& grid, double pitch,
                HologramKind kind) {
  write_bytes(path, encode_grid(grid, pitch, kind, PixelType::f32));
}

std::string encode_labels(std::span<const Particle> particles) {
  std::string out(kLabelHeader);
  out += '\n';
  for (const auto& p : particles) {
    out += format_number(p.x * 1e6) + ',' + format_number(p.y * 1e6) + ',' +
           format_number(p.z * 1e3) + ',' + format_number(p.d * 1e6) + '\n';
  }
  return out;
}

std::vector<Particle> decode_labels(const std::string& text) {
  std::vector<Particle> out;
  for (const auto& r : parse_csv(text, kLabelHeader, 4))
    out.push_back({r[0] * 1e-6, r[1] * 1e-6, r[2] * 1e-3, r[3] * 1e-6});
  return out;
}

void write_labels(const std::filesystem::path& path, std::span<const Particle> particles) {
  write_text(path, encode_labels(particles));
}

std::vector<Particle> read_labels(const std::filesystem::path& path) {
  try {
    return decode_labels(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string encode_detections(std::span<const Detection> detections) {
  std::string out(kDetectionHeader);
  out += '\n';
  for (const auto& d : detections) {
    out += format_number(d.x * 1e6) + ',' + format_number(d.y * 1e6) + ',' +
           format_number(d.z * 1e3) + ',' + format_number(d.d * 1e6) + ',' +
           format_number(d.score) + '\n';
  }
  return out;
}

std::vector<Detection> decode_detections(const std::string& text) {
  std::vector<Detection> out;
  for (const auto& r : parse_csv(text, kDetectionHeader, 5))
    out.push_back({r[0] * 1e-6, r[1] * 1e-6, r[2] * 1e-3, r[3] * 1e-6, r[4]});
  return out;
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> detections) {
  write_text(path, encode_detections(detections));
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  try {
    return decode_detections(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace holo
