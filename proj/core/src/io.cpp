#include "pat/io.hpp"

#include <bit>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace pat::io {

static_assert(std::endian::native == std::endian::little,
              "big-endian hosts need byte swapping in pat::io");

void Writer::magic(const char tag[4]) { os_.write(tag, 4); }

void Writer::u32(std::uint32_t v) { os_.write(reinterpret_cast<const char*>(&v), 4); }

void Writer::u64(std::uint64_t v) { os_.write(reinterpret_cast<const char*>(&v), 8); }

void Writer::f32(float v) { os_.write(reinterpret_cast<const char*>(&v), 4); }

void Writer::f64(double v) { os_.write(reinterpret_cast<const char*>(&v), 8); }

void Writer::f32_array(const std::vector<double>& v) {
  std::vector<float> tmp(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = static_cast<float>(v[i]);
  os_.write(reinterpret_cast<const char*>(tmp.data()),
            static_cast<std::streamsize>(tmp.size() * sizeof(float)));
}

void Writer::f64_array(const double* v, std::size_t n) {
  os_.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(n * sizeof(double)));
}

void Reader::expect_magic(const char tag[4]) {
  char got[4];
  is_.read(got, 4);
  if (!is_ || std::memcmp(got, tag, 4) != 0)
    throw std::runtime_error(std::string("bad magic, expected ") + std::string(tag, 4));
}

std::string Reader::magic() {
  char got[4];
  is_.read(got, 4);
  if (!is_) throw std::runtime_error("truncated file reading magic");
  return std::string(got, 4);
}

std::uint32_t Reader::u32() {
  std::uint32_t v;
  is_.read(reinterpret_cast<char*>(&v), 4);
  if (!is_) throw std::runtime_error("truncated file reading u32");
  return v;
}

std::uint64_t Reader::u64() {
  std::uint64_t v;
  is_.read(reinterpret_cast<char*>(&v), 8);
  if (!is_) throw std::runtime_error("truncated file reading u64");
  return v;
}

float Reader::f32() {
  float v;
  is_.read(reinterpret_cast<char*>(&v), 4);
  if (!is_) throw std::runtime_error("truncated file reading f32");
  return v;
}

double Reader::f64() {
  double v;
  is_.read(reinterpret_cast<char*>(&v), 8);
  if (!is_) throw std::runtime_error("truncated file reading f64");
  return v;
}

std::vector<double> Reader::f32_array(std::size_t n) {
  std::vector<float> tmp(n);
  is_.read(reinterpret_cast<char*>(tmp.data()), static_cast<std::streamsize>(n * sizeof(float)));
  if (!is_) throw std::runtime_error("truncated file reading f32 array");
  return {tmp.begin(), tmp.end()};
}

void Reader::f64_array(double* v, std::size_t n) {
  is_.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is_) throw std::runtime_error("truncated file reading f64 array");
}

std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + p.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + p.string());
  return is;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  auto os = open_out(p);
  os << text;
}

std::string read_text(const std::filesystem::path& p) {
  auto is = open_in(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace pat::io
