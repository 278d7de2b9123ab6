#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "anderson_lab/spectral/spectral_field.hpp"

namespace anderson_lab::spectral {

// Binary field container, little-endian:
//   char[4]  magic "ALFD"
//   uint32   format version (1)
//   uint32   grid points per dimension n
//   uint8    real flag
//   uint8    role tag (FieldRole)
//   uint16   reserved (0)
//   uint64   coefficient count (n * n)
//   complex64[count]  (float32 re, float32 im) in storage order
// Coefficients are stored row-major in (k1 mod n, k2 mod n).

void write_field(std::ostream& os, const SpectralField& f);
[[nodiscard]] SpectralField read_field(std::istream& is);

void write_field_file(const std::filesystem::path& path, const SpectralField& f);
[[nodiscard]] SpectralField read_field_file(const std::filesystem::path& path);

/// CSV with header k1,k2,re,im, one row per stored coefficient.
void write_field_csv(std::ostream& os, const SpectralField& f);

namespace le {
// Little-endian primitives shared by the binary formats.
void put_u8(std::ostream& os, std::uint8_t v);
void put_u16(std::ostream& os, std::uint16_t v);
void put_u32(std::ostream& os, std::uint32_t v);
void put_u64(std::ostream& os, std::uint64_t v);
void put_i32(std::ostream& os, std::int32_t v);
void put_f32(std::ostream& os, float v);
void put_f64(std::ostream& os, double v);
std::uint8_t get_u8(std::istream& is);
std::uint16_t get_u16(std::istream& is);
std::uint32_t get_u32(std::istream& is);
std::uint64_t get_u64(std::istream& is);
std::int32_t get_i32(std::istream& is);
float get_f32(std::istream& is);
double get_f64(std::istream& is);
}  // namespace le

}  // namespace anderson_lab::spectral
