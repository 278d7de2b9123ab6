#include "anderson_lab/spectral/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace anderson_lab::spectral {
namespace le {
namespace {

template <typename T>
void put(std::ostream& os, T v) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("binary container: unexpected end of stream");
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void put_u8(std::ostream& os, std::uint8_t v) { put(os, v); }
void put_u16(std::ostream& os, std::uint16_t v) { put(os, v); }
void put_u32(std::ostream& os, std::uint32_t v) { put(os, v); }
void put_u64(std::ostream& os, std::uint64_t v) { put(os, v); }
void put_i32(std::ostream& os, std::int32_t v) { put(os, static_cast<std::uint32_t>(v)); }
void put_f32(std::ostream& os, float v) { put(os, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::ostream& os, double v) { put(os, std::bit_cast<std::uint64_t>(v)); }
std::uint8_t get_u8(std::istream& is) { return get<std::uint8_t>(is); }
std::uint16_t get_u16(std::istream& is) { return get<std::uint16_t>(is); }
std::uint32_t get_u32(std::istream& is) { return get<std::uint32_t>(is); }
std::uint64_t get_u64(std::istream& is) { return get<std::uint64_t>(is); }
std::int32_t get_i32(std::istream& is) { return static_cast<std::int32_t>(get<std::uint32_t>(is)); }
float get_f32(std::istream& is) { return std::bit_cast<float>(get<std::uint32_t>(is)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get<std::uint64_t>(is)); }

}  // namespace le

namespace {
constexpr char kMagic[4] = {'A', 'L', 'F', 'D'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_field(std::ostream& os, const SpectralField& f) {
  os.write(kMagic, 4);
  le::put_u32(os, kVersion);
  le::put_u32(os, static_cast<std::uint32_t>(f.grid().n()));
  le::put_u8(os, f.is_real() ? 1 : 0);
  le::put_u8(os, static_cast<std::uint8_t>(f.role()));
  le::put_u16(os, 0);
  le::put_u64(os, f.coeffs().size());
  for (const Complex& c : f.coeffs()) {
    le::put_f32(os, static_cast<float>(c.real()));
    le::put_f32(os, static_cast<float>(c.imag()));
  }
}

SpectralField read_field(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("field container: bad magic");
  }
  if (le::get_u32(is) != kVersion) throw std::runtime_error("field container: unsupported version");
  const TorusGrid grid(static_cast<int>(le::get_u32(is)));
  const bool real = le::get_u8(is) != 0;
  const auto role = static_cast<FieldRole>(le::get_u8(is));
  (void)le::get_u16(is);
  if (le::get_u64(is) != grid.size()) throw std::runtime_error("field container: bad count");
  std::vector<Complex> coeffs(grid.size());
  for (auto& c : coeffs) {
    const float re = le::get_f32(is);
    const float im = le::get_f32(is);
    c = Complex(re, im);
  }
  return SpectralField(grid, std::move(coeffs), real, role);
}

void write_field_file(const std::filesystem::path& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_field(os, f);
}

SpectralField read_field_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_field(is);
}

void write_field_csv(std::ostream& os, const SpectralField& f) {
  os << "k1,k2,re,im\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    const Wavevector k = f.grid().wavevector(i);
    os << k.k1 << ',' << k.k2 << ',' << f.coeffs()[i].real() << ',' << f.coeffs()[i].imag() << '\n';
  }
}

}  // namespace anderson_lab::spectral
