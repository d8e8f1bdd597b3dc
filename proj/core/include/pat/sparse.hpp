#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace pat {

/// Compressed-sparse-row matrix with non-negative real entries as produced
/// by the forward-operator assembly. Column indices are ascending within
/// each row; products run in fixed order so results are deterministic.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // rows + 1
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }

  /// y = A x  (y resized)
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  /// y += A x
  void multiply_add(const double* x, double* y) const;

  SparseMatrix transposed() const;

  double frobenius_norm() const;

  /// Keeps row blocks [b * block_rows, (b+1) * block_rows) for the listed
  /// block indices, in the given order.
  SparseMatrix select_row_blocks(std::size_t block_rows, const std::vector<int>& blocks) const;

  struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double val;
  };
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);

  /// PATK triplet container: magic "PATK", u32 rows, u32 cols, u64 nnz,
  /// then (u32 row, u32 col, f64 val) little-endian triplets in row-major
  /// order.
  void save(const std::filesystem::path& path) const;
  static SparseMatrix load(const std::filesystem::path& path);
};

/// Largest singular value of A via power iteration on A^T A with a
/// deterministic start vector.
double power_iteration_norm(const SparseMatrix& a, const SparseMatrix& at, int iterations,
                            std::uint64_t seed = 0x9e3779b9ULL);

}  // namespace pat
