#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "holo/types.hpp"

namespace holo {

/// Pixel storage of a HOLO1 file.
enum class PixelType : std::uint8_t { f32 = 0, u16 = 1 };

/// HOLO1 layout (little-endian):
///   "HOLO1" | u32 width | u32 height | f64 pitch_m | u8 kind | u8 dtype | pixels
/// Pixels are row-major. u16 pixels are rounded to nearest and saturated to
/// [0, 65535]; f32 pixels are the nearest float.
inline constexpr std::size_t kHoloHeaderSize = 5 + 4 + 4 + 8 + 1 + 1;

std::vector<std::uint8_t> encode_hologram(const Hologram& h, PixelType dtype = PixelType::f32);
/// Throws IoError on malformed input.
Hologram decode_hologram(std::span<const std::uint8_t> bytes);

void write_hologram(const std::filesystem::path& path, const Hologram& h,
                    PixelType dtype = PixelType::f32);
Hologram read_hologram(const std::filesystem::path& path);

/// Raw grid in the same container; kind is written as given.
void write_grid(const std::filesystem::path& path, const RealGrid& grid, double pitch,
                HologramKind kind);

/// Labels: header `x_um,y_um,z_mm,d_um`, 6 significant digits.
std::string encode_labels(std::span<const Particle> particles);
std::vector<Particle> decode_labels(const std::string& text);
void write_labels(const std::filesystem::path& path, std::span<const Particle> particles);
std::vector<Particle> read_labels(const std::filesystem::path& path);

/// Detections: header `x_um,y_um,z_mm,d_um,score`, 6 significant digits.
std::string encode_detections(std::span<const Detection> detections);
std::vector<Detection> decode_detections(const std::string& text);
void write_detections(const std::filesystem::path& path, std::span<const Detection> detections);
std::vector<Detection> read_detections(const std::filesystem::path& path);

/// Whole-file helpers; throw IoError.
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace holo
