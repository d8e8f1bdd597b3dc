#include "pat/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pat/io.hpp"
#include "pat/rng.hpp"

namespace pat {

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  if (x.size() != cols) throw std::invalid_argument("sparse multiply: size mismatch");
  y.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
    y[r] = acc;
  }
}

void SparseMatrix::multiply_add(const double* x, double* y) const {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
    y[r] += acc;
  }
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row_ptr.assign(cols + 1, 0);
  for (std::uint32_t c : col) ++t.row_ptr[c + 1];
  for (std::size_t i = 1; i <= cols; ++i) t.row_ptr[i] += t.row_ptr[i - 1];
  t.col.resize(nnz());
  t.val.resize(nnz());
  std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      std::size_t dst = cursor[col[k]]++;
      t.col[dst] = static_cast<std::uint32_t>(r);
      t.val[dst] = val[k];
    }
  }
  return t;
}

double SparseMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (double v : val) acc += v * v;
  return std::sqrt(acc);
}

SparseMatrix SparseMatrix::select_row_blocks(std::size_t block_rows,
                                             const std::vector<int>& blocks) const {
  if (block_rows == 0 || rows % block_rows != 0)
    throw std::invalid_argument("select_row_blocks: rows not divisible by block size");
  const std::size_t n_blocks = rows / block_rows;
  SparseMatrix out;
  out.rows = blocks.size() * block_rows;
  out.cols = cols;
  out.row_ptr.reserve(out.rows + 1);
  out.row_ptr.push_back(0);
  for (int b : blocks) {
    if (b < 0 || static_cast<std::size_t>(b) >= n_blocks)
      throw std::out_of_range("select_row_blocks: block index out of range");
    const std::size_t r0 = static_cast<std::size_t>(b) * block_rows;
    for (std::size_t r = r0; r < r0 + block_rows; ++r) {
      out.col.insert(out.col.end(), col.begin() + row_ptr[r], col.begin() + row_ptr[r + 1]);
      out.val.insert(out.val.end(), val.begin() + row_ptr[r], val.begin() + row_ptr[r + 1]);
      out.row_ptr.push_back(out.col.size());
    }
  }
  return out;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets)
    if (t.row >= rows || t.col >= cols) throw std::out_of_range("triplet index out of range");
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  m.col.reserve(triplets.size());
  m.val.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size();) {
    // duplicates collapse by summation
    std::size_t j = i + 1;
    double acc = triplets[i].val;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col) {
      acc += triplets[j].val;
      ++j;
    }
    if (acc != 0.0) {
      m.col.push_back(triplets[i].col);
      m.val.push_back(acc);
      ++m.row_ptr[triplets[i].row + 1];
    }
    i = j;
  }
  for (std::size_t r = 1; r <= rows; ++r) m.row_ptr[r] += m.row_ptr[r - 1];
  return m;
}

void SparseMatrix::save(const std::filesystem::path& path) const {
  auto stream = io::open_out(path);
  io::Writer w(stream);
  w.magic("PATK");
  w.u32(static_cast<std::uint32_t>(rows));
  w.u32(static_cast<std::uint32_t>(cols));
  w.u64(nnz());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      w.u32(static_cast<std::uint32_t>(r));
      w.u32(col[k]);
      w.f64(val[k]);
    }
  }
  if (!stream) throw std::runtime_error("failed writing " + path.string());
}

SparseMatrix SparseMatrix::load(const std::filesystem::path& path) {
  auto stream = io::open_in(path);
  io::Reader r(stream);
  r.expect_magic("PATK");
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  const std::uint64_t nnz = r.u64();
  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  for (std::uint64_t i = 0; i < nnz; ++i) {
    Triplet t;
    t.row = r.u32();
    t.col = r.u32();
    t.val = r.f64();
    triplets.push_back(t);
  }
  if (!stream) throw std::runtime_error("truncated matrix file " + path.string());
  return from_triplets(rows, cols, std::move(triplets));
}

double power_iteration_norm(const SparseMatrix& a, const SparseMatrix& at, int iterations,
                            std::uint64_t seed) {
  if (a.cols == 0 || a.rows == 0) return 0.0;
  Rng rng(seed);
  std::vector<double> x(a.cols);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  std::vector<double> y;
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    a.multiply(x, y);
    at.multiply(y, x);
    double n2 = 0.0;
    for (double v : x) n2 += v * v;
    const double n = std::sqrt(n2);
    if (n == 0.0) return 0.0;
    for (double& v : x) v /= n;
    sigma = std::sqrt(n);
  }
  return sigma;
}

}  // namespace pat
