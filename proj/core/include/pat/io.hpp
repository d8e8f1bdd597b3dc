#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace pat::io {

/// Little-endian binary writer over a std::ostream. The on-disk formats
/// (PATI grids, PATK matrices, PATS sinograms, LPDW weights) are all
/// little-endian regardless of host order.
class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void magic(const char tag[4]);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void f32_array(const std::vector<double>& v);  // narrows to float
  void f64_array(const double* v, std::size_t n);

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  void expect_magic(const char tag[4]);
  std::string magic();  // reads 4 bytes
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::vector<double> f32_array(std::size_t n);  // widens to double
  void f64_array(double* v, std::size_t n);

 private:
  std::istream& is_;
};

std::ofstream open_out(const std::filesystem::path& p);
std::ifstream open_in(const std::filesystem::path& p);

/// Writes a whole text file; parent directories are created.
void write_text(const std::filesystem::path& p, const std::string& text);
std::string read_text(const std::filesystem::path& p);

/// FNV-1a 64-bit; stable content hash used to stamp artifacts with the
/// configuration that produced them.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace pat::io
