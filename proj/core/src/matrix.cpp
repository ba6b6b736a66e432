#include "derivkit/matrix.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "derivkit/error.hpp"

namespace derivkit {

namespace {

inline std::uint32_t add_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  const std::uint32_t s = a + b;  // both < 2^31
  return s >= p ? s - p : s;
}
inline std::uint32_t sub_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return a >= b ? a - b : a + (p - b);
}
inline std::uint32_t mul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p);
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = a;
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (t < 0) t += p;
  return static_cast<std::uint32_t>(t);
}

std::uint32_t to_residue(const Field& f, const mpq_class& v) {
  return static_cast<std::uint32_t>(f.reduce(v).get_num().get_ui());
}

std::uint32_t to_residue(const Field& f, long v) {
  const long p = static_cast<long>(f.characteristic());
  long r = v % p;
  if (r < 0) r += p;
  return static_cast<std::uint32_t>(r);
}

void require_same_field(const Matrix& a, const Matrix& b, const char* what) {
  if (!(a.field() == b.field()))
    throw InvalidInput(std::string(what) + ": field mismatch (" + a.field().name() +
                       " vs " + b.field().name() + ")");
}

}  // namespace

struct MatrixAccess {
  static std::vector<std::uint32_t>& mod(Matrix& m) { return m.mod_; }
  static const std::vector<std::uint32_t>& mod(const Matrix& m) { return m.mod_; }
  static std::vector<mpq_class>& rat(Matrix& m) { return m.rat_; }
  static const std::vector<mpq_class>& rat(const Matrix& m) { return m.rat_; }
};

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols) {
  if (field_.is_prime())
    mod_.assign(rows * cols, 0);
  else
    rat_.assign(rows * cols, mpq_class(0));
}

Matrix Matrix::identity(Field field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1L);
  return m;
}

Matrix Matrix::from_rows(Field field,
                         std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<std::vector<long>> v;
  for (const auto& r : rows) v.emplace_back(r);
  return from_rows(field, v);
}

Matrix Matrix::from_rows(Field field, const std::vector<std::vector<long>>& rows,
                         std::size_t cols_if_empty) {
  const std::size_t cols = rows.empty() ? cols_if_empty : rows.front().size();
  Matrix m(field, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw InvalidInput("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

Matrix Matrix::column(Field field, const std::vector<long>& entries) {
  Matrix m(field, entries.size(), 1);
  for (std::size_t r = 0; r < entries.size(); ++r) m.set(r, 0, entries[r]);
  return m;
}

mpq_class Matrix::at(std::size_t r, std::size_t c) const {
  if (field_.is_prime()) return mpq_class(static_cast<unsigned long>(mod_[r * cols_ + c]));
  return rat_[r * cols_ + c];
}

void Matrix::set(std::size_t r, std::size_t c, const mpq_class& value) {
  if (field_.is_prime())
    mod_[r * cols_ + c] = to_residue(field_, value);
  else
    rat_[r * cols_ + c] = field_.reduce(value);
}

void Matrix::set(std::size_t r, std::size_t c, long value) {
  if (field_.is_prime())
    mod_[r * cols_ + c] = to_residue(field_, value);
  else
    rat_[r * cols_ + c] = mpq_class(value);
}

bool Matrix::is_nonzero_at(std::size_t r, std::size_t c) const {
  if (field_.is_prime()) return mod_[r * cols_ + c] != 0;
  return sgn(rat_[r * cols_ + c]) != 0;
}

std::string Matrix::entry_string(std::size_t r, std::size_t c) const {
  return field_.format_scalar(at(r, c));
}

bool Matrix::is_zero() const {
  if (field_.is_prime())
    return std::all_of(mod_.begin(), mod_.end(), [](std::uint32_t v) { return v == 0; });
  return std::all_of(rat_.begin(), rat_.end(), [](const mpq_class& v) { return sgn(v) == 0; });
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  return *this == identity(field_, rows_);
}

Matrix Matrix::transpose() const {
  Matrix t(field_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) {
      if (field_.is_prime())
        t.mod_[c * rows_ + r] = mod_[r * cols_ + c];
      else
        t.rat_[c * rows_ + r] = rat_[r * cols_ + c];
    }
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  require_same_field(*this, rhs, "matrix product");
  if (cols_ != rhs.rows_)
    throw InvalidInput("matrix product: shape mismatch " + std::to_string(rows_) + "x" +
                       std::to_string(cols_) + " * " + std::to_string(rhs.rows_) + "x" +
                       std::to_string(rhs.cols_));
  Matrix out(field_, rows_, rhs.cols_);
  const std::size_t n = rhs.cols_;
  if (field_.is_prime()) {
    const std::uint32_t p = field_.characteristic();
    if (p == 2) {
      for (std::size_t i = 0; i < rows_; ++i) {
        std::uint32_t* orow = out.mod_.data() + i * n;
        for (std::size_t k = 0; k < cols_; ++k) {
          if (!mod_[i * cols_ + k]) continue;
          const std::uint32_t* brow = rhs.mod_.data() + k * n;
          for (std::size_t j = 0; j < n; ++j) orow[j] ^= brow[j];
        }
      }
      return out;
    }
    std::vector<std::uint64_t> acc(n);
    // Each product is < 2^62; reduce before the sum can overflow.
    for (std::size_t i = 0; i < rows_; ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      int pending = 0;
      for (std::size_t k = 0; k < cols_; ++k) {
        const std::uint64_t a = mod_[i * cols_ + k];
        if (!a) continue;
        const std::uint32_t* brow = rhs.mod_.data() + k * n;
        for (std::size_t j = 0; j < n; ++j) acc[j] += a * brow[j];
        if (++pending == 3) {
          for (auto& v : acc) v %= p;
          pending = 0;
        }
      }
      for (std::size_t j = 0; j < n; ++j) out.mod_[i * n + j] = static_cast<std::uint32_t>(acc[j] % p);
    }
    return out;
  }
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const mpq_class& a = rat_[i * cols_ + k];
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const mpq_class& b = rhs.rat_[k * n + j];
        if (sgn(b) != 0) out.rat_[i * n + j] += a * b;
      }
    }
  return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_field(*this, rhs, "matrix sum");
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw InvalidInput("matrix sum: shape mismatch");
  if (field_.is_prime()) {
    const std::uint32_t p = field_.characteristic();
    for (std::size_t i = 0; i < mod_.size(); ++i) mod_[i] = add_mod(mod_[i], rhs.mod_[i], p);
  } else {
    for (std::size_t i = 0; i < rat_.size(); ++i) rat_[i] += rhs.rat_[i];
  }
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_field(*this, rhs, "matrix difference");
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw InvalidInput("matrix difference: shape mismatch");
  if (field_.is_prime()) {
    const std::uint32_t p = field_.characteristic();
    for (std::size_t i = 0; i < mod_.size(); ++i) mod_[i] = sub_mod(mod_[i], rhs.mod_[i], p);
  } else {
    for (std::size_t i = 0; i < rat_.size(); ++i) rat_[i] -= rhs.rat_[i];
  }
  return *this;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  Matrix out = *this;
  out += rhs;
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  Matrix out = *this;
  out -= rhs;
  return out;
}

Matrix Matrix::operator-() const {
  Matrix out(field_, rows_, cols_);
  out -= *this;
  return out;
}

Matrix Matrix::scaled(const mpq_class& factor) const {
  Matrix out = *this;
  if (field_.is_prime()) {
    const std::uint32_t p = field_.characteristic();
    const std::uint32_t f = to_residue(field_, factor);
    for (auto& v : out.mod_) v = mul_mod(v, f, p);
  } else {
    for (auto& v : out.rat_) v *= factor;
  }
  return out;
}

Matrix Matrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                     std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_) throw InvalidInput("block out of range");
  Matrix out(field_, nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r)
    for (std::size_t c = 0; c < ncols; ++c) {
      if (field_.is_prime())
        out.mod_[r * ncols + c] = mod_[(row0 + r) * cols_ + col0 + c];
      else
        out.rat_[r * ncols + c] = rat_[(row0 + r) * cols_ + col0 + c];
    }
  return out;
}

void Matrix::set_block(std::size_t row0, std::size_t col0, const Matrix& value) {
  require_same_field(*this, value, "set_block");
  if (row0 + value.rows_ > rows_ || col0 + value.cols_ > cols_)
    throw InvalidInput("set_block out of range");
  for (std::size_t r = 0; r < value.rows_; ++r)
    for (std::size_t c = 0; c < value.cols_; ++c) {
      if (field_.is_prime())
        mod_[(row0 + r) * cols_ + col0 + c] = value.mod_[r * value.cols_ + c];
      else
        rat_[(row0 + r) * cols_ + col0 + c] = value.rat_[r * value.cols_ + c];
    }
}

void Matrix::add_block(std::size_t row0, std::size_t col0, const Matrix& value) {
  require_same_field(*this, value, "add_block");
  if (row0 + value.rows_ > rows_ || col0 + value.cols_ > cols_)
    throw InvalidInput("add_block out of range");
  const std::uint32_t p = field_.characteristic();
  for (std::size_t r = 0; r < value.rows_; ++r)
    for (std::size_t c = 0; c < value.cols_; ++c) {
      if (field_.is_prime()) {
        auto& dst = mod_[(row0 + r) * cols_ + col0 + c];
        dst = add_mod(dst, value.mod_[r * value.cols_ + c], p);
      } else {
        rat_[(row0 + r) * cols_ + col0 + c] += value.rat_[r * value.cols_ + c];
      }
    }
}

Matrix Matrix::select_columns(const std::vector<std::size_t>& columns) const {
  Matrix out(field_, rows_, columns.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (field_.is_prime())
        out.mod_[r * columns.size() + j] = mod_[r * cols_ + columns[j]];
      else
        out.rat_[r * columns.size() + j] = rat_[r * cols_ + columns[j]];
    }
  return out;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& rows) const {
  Matrix out(field_, rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < cols_; ++c) {
      if (field_.is_prime())
        out.mod_[i * cols_ + c] = mod_[rows[i] * cols_ + c];
      else
        out.rat_[i * cols_ + c] = rat_[rows[i] * cols_ + c];
    }
  return out;
}

Matrix Matrix::hstack(const std::vector<Matrix>& parts, Field field, std::size_t rows) {
  std::size_t cols = 0;
  for (const auto& m : parts) {
    if (m.rows_ != rows) throw InvalidInput("hstack: row count mismatch");
    cols += m.cols_;
  }
  Matrix out(field, rows, cols);
  std::size_t c0 = 0;
  for (const auto& m : parts) {
    out.set_block(0, c0, m);
    c0 += m.cols_;
  }
  return out;
}

Matrix Matrix::vstack(const std::vector<Matrix>& parts, Field field, std::size_t cols) {
  std::size_t rows = 0;
  for (const auto& m : parts) {
    if (m.cols_ != cols) throw InvalidInput("vstack: column count mismatch");
    rows += m.rows_;
  }
  Matrix out(field, rows, cols);
  std::size_t r0 = 0;
  for (const auto& m : parts) {
    out.set_block(r0, 0, m);
    r0 += m.rows_;
  }
  return out;
}

Matrix Matrix::direct_sum(const Matrix& a, const Matrix& b) {
  require_same_field(a, b, "direct_sum");
  Matrix out(a.field_, a.rows_ + b.rows_, a.cols_ + b.cols_);
  out.set_block(0, 0, a);
  out.set_block(a.rows_, a.cols_, b);
  return out;
}

Matrix Matrix::kronecker(const Matrix& a, const Matrix& b) {
  require_same_field(a, b, "kronecker");
  Matrix out(a.field_, a.rows_ * b.rows_, a.cols_ * b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < a.cols_; ++j) {
      if (!a.is_nonzero_at(i, j)) continue;
      out.set_block(i * b.rows_, j * b.cols_, b.scaled(a.at(i, j)));
    }
  return out;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
         a.mod_ == b.mod_ && a.rat_ == b.rat_;
}

// ---------------------------------------------------------------------------
// Elimination

namespace {

RowEchelon rref_f2(const Matrix& m, std::size_t limit) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::size_t words = (cols + 63) / 64;
  std::vector<std::uint64_t> bits(rows * words, 0);
  const auto& src = MatrixAccess::mod(m);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (src[r * cols + c]) bits[r * words + c / 64] |= std::uint64_t{1} << (c % 64);

  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < std::min(limit, cols) && rank < rows; ++c) {
    const std::size_t w = c / 64;
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    std::size_t pr = rank;
    while (pr < rows && !(bits[pr * words + w] & bit)) ++pr;
    if (pr == rows) continue;
    if (pr != rank)
      std::swap_ranges(bits.begin() + pr * words, bits.begin() + (pr + 1) * words,
                       bits.begin() + rank * words);
    const std::uint64_t* prow = bits.data() + rank * words;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      std::uint64_t* row = bits.data() + r * words;
      if (row[w] & bit)
        for (std::size_t k = w; k < words; ++k) row[k] ^= prow[k];
    }
    pivots.push_back(c);
    ++rank;
  }
  Matrix reduced(m.field(), rows, cols);
  auto& dst = MatrixAccess::mod(reduced);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (bits[r * words + c / 64] >> (c % 64) & 1) dst[r * cols + c] = 1;
  return {std::move(reduced), std::move(pivots)};
}

RowEchelon rref_fp(const Matrix& m, std::size_t limit) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::uint32_t p = m.field().characteristic();
  Matrix reduced = m;
  auto& a = MatrixAccess::mod(reduced);
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < std::min(limit, cols) && rank < rows; ++c) {
    std::size_t pr = rank;
    while (pr < rows && a[pr * cols + c] == 0) ++pr;
    if (pr == rows) continue;
    if (pr != rank)
      std::swap_ranges(a.begin() + pr * cols, a.begin() + (pr + 1) * cols, a.begin() + rank * cols);
    std::uint32_t* prow = a.data() + rank * cols;
    const std::uint32_t inv = inv_mod(prow[c], p);
    for (std::size_t k = c; k < cols; ++k) prow[k] = mul_mod(prow[k], inv, p);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      std::uint32_t* row = a.data() + r * cols;
      const std::uint32_t f = row[c];
      if (!f) continue;
      for (std::size_t k = c; k < cols; ++k)
        if (prow[k]) row[k] = sub_mod(row[k], mul_mod(f, prow[k], p), p);
    }
    pivots.push_back(c);
    ++rank;
  }
  return {std::move(reduced), std::move(pivots)};
}

RowEchelon rref_q(const Matrix& m, std::size_t limit) {
  const std::size_t rows = m.rows(), cols = m.cols();
  Matrix reduced = m;
  auto& a = MatrixAccess::rat(reduced);
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < std::min(limit, cols) && rank < rows; ++c) {
    std::size_t pr = rank;
    while (pr < rows && sgn(a[pr * cols + c]) == 0) ++pr;
    if (pr == rows) continue;
    if (pr != rank)
      for (std::size_t k = 0; k < cols; ++k) swap(a[pr * cols + k], a[rank * cols + k]);
    mpq_class* prow = a.data() + rank * cols;
    const mpq_class inv = 1 / prow[c];
    for (std::size_t k = c; k < cols; ++k)
      if (sgn(prow[k]) != 0) prow[k] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      mpq_class* row = a.data() + r * cols;
      if (sgn(row[c]) == 0) continue;
      const mpq_class f = row[c];
      for (std::size_t k = c; k < cols; ++k)
        if (sgn(prow[k]) != 0) row[k] -= f * prow[k];
    }
    pivots.push_back(c);
    ++rank;
  }
  return {std::move(reduced), std::move(pivots)};
}

}  // namespace

RowEchelon rref(const Matrix& m, std::size_t pivot_limit) {
  if (m.field().is_rational()) return rref_q(m, pivot_limit);
  if (m.field().characteristic() == 2) return rref_f2(m, pivot_limit);
  return rref_fp(m, pivot_limit);
}

std::size_t rank(const Matrix& m) {
  if (m.empty()) return 0;
  return rref(m).pivots.size();
}

Matrix kernel_basis(const Matrix& m) {
  const RowEchelon e = rref(m);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  Matrix out(m.field(), n, n - e.pivots.size());
  std::size_t j = 0;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    out.set(f, j, 1L);
    for (std::size_t k = 0; k < e.pivots.size(); ++k)
      if (e.reduced.is_nonzero_at(k, f)) out.set(e.pivots[k], j, -e.reduced.at(k, f));
    ++j;
  }
  return out;
}

Matrix image_basis(const Matrix& m) { return m.select_columns(rref(m).pivots); }

Matrix cokernel_projection(const Matrix& m) { return kernel_basis(m.transpose()).transpose(); }

std::optional<Matrix> solve(const Matrix& a, const Matrix& b) {
  if (!(a.field() == b.field())) throw InvalidInput("solve: field mismatch");
  if (a.rows() != b.rows()) throw InvalidInput("solve: row count mismatch");
  const std::size_t n = a.cols();
  const Matrix aug = Matrix::hstack({a, b}, a.field(), a.rows());
  const RowEchelon e = rref(aug, n);
  const std::size_t r = e.pivots.size();
  for (std::size_t i = r; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (e.reduced.is_nonzero_at(i, n + j)) return std::nullopt;
  Matrix x(a.field(), n, b.cols());
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (e.reduced.is_nonzero_at(k, n + j)) x.set(e.pivots[k], j, e.reduced.at(k, n + j));
  return x;
}

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("inverse: matrix is not square");
  const Matrix aug = Matrix::hstack({m, Matrix::identity(m.field(), m.rows())}, m.field(), m.rows());
  const RowEchelon e = rref(aug, m.cols());
  if (e.pivots.size() != m.rows()) throw InvalidInput("inverse: matrix is singular");
  return e.reduced.block(0, m.cols(), m.rows(), m.rows());
}

std::vector<std::size_t> complement_columns(const Matrix& base, const Matrix& extra) {
  const Matrix aug = Matrix::hstack({base, extra}, base.field(), base.rows());
  std::vector<std::size_t> out;
  for (auto c : rref(aug).pivots)
    if (c >= base.cols()) out.push_back(c - base.cols());
  return out;
}

std::string to_string(const Matrix& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << (r ? ", [" : "[");
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << m.entry_string(r, c);
    os << "]";
  }
  os << "]";
  if (m.rows() == 0) os << " (0x" << m.cols() << ")";
  return os.str();
}

}  // namespace derivkit
