#pragma once

// Dense alternating p-forms and simple p-vectors on R^n, n <= 8.
// Coefficients are indexed by the bitmask of the basis p-tuple; ranks are
// precomputed per (n, p). Scalar is real or complex.

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace slcone {

using Complex = std::complex<double>;

namespace detail {

// Tuple table for p-subsets of {0..n-1}, lexicographic by bitmask value.
struct TupleTable {
  int n = 0, p = 0;
  std::vector<std::uint32_t> masks;
  std::array<int, 256> rank{};

  TupleTable() = default;
  TupleTable(int n_, int p_) : n(n_), p(p_) {
    rank.fill(-1);
    for (std::uint32_t m = 0; m < (1u << n); ++m)
      if (std::popcount(m) == p) {
        rank[m] = static_cast<int>(masks.size());
        masks.push_back(m);
      }
  }
};

inline const TupleTable& tuple_table(int n, int p) {
  static std::vector<TupleTable> cache = [] {
    std::vector<TupleTable> t;
    for (int n = 0; n <= 8; ++n)
      for (int p = 0; p <= 8; ++p) t.emplace_back(n, p);
    return t;
  }();
  return cache[static_cast<std::size_t>(n) * 9 + p];
}

// Sign of sorting the concatenation (ascending a, ascending b) for disjoint
// masks a, b.
inline int merge_sign(std::uint32_t a, std::uint32_t b) {
  int inv = 0;
  for (std::uint32_t m = b; m; m &= m - 1) {
    int i = std::countr_zero(m);
    inv += std::popcount(a >> (i + 1));
  }
  return (inv & 1) ? -1 : 1;
}

}  // namespace detail

template <typename Scalar>
class AlternatingForm {
 public:
  AlternatingForm() = default;
  AlternatingForm(int n, int degree)
      : n_(n), p_(degree), coeff_(Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(
                               detail::tuple_table(n, degree).masks.size())) {
    if (n < 0 || n > 8 || degree < 0 || degree > n)
      throw std::invalid_argument("AlternatingForm: need 0 <= degree <= n <= 8");
  }

  int dim() const { return n_; }
  int degree() const { return p_; }
  int terms() const { return static_cast<int>(coeff_.size()); }

  Scalar& operator[](int r) { return coeff_[r]; }
  const Scalar& operator[](int r) const { return coeff_[r]; }

  Scalar coefficient(std::uint32_t mask) const {
    int r = detail::tuple_table(n_, p_).rank[mask];
    if (r < 0) throw std::invalid_argument("coefficient: bad tuple mask");
    return coeff_[r];
  }
  void set_coefficient(std::uint32_t mask, Scalar v) {
    int r = detail::tuple_table(n_, p_).rank[mask];
    if (r < 0) throw std::invalid_argument("set_coefficient: bad tuple mask");
    coeff_[r] = v;
  }

  const Eigen::Vector<Scalar, Eigen::Dynamic>& coefficients() const { return coeff_; }

  AlternatingForm& operator*=(Scalar s) {
    coeff_ *= s;
    return *this;
  }
  AlternatingForm operator*(Scalar s) const {
    AlternatingForm r = *this;
    r *= s;
    return r;
  }
  AlternatingForm operator+(const AlternatingForm& o) const {
    check_same(o);
    AlternatingForm r = *this;
    r.coeff_ += o.coeff_;
    return r;
  }
  AlternatingForm operator-(const AlternatingForm& o) const {
    check_same(o);
    AlternatingForm r = *this;
    r.coeff_ -= o.coeff_;
    return r;
  }

  double norm() const { return coeff_.norm(); }

  // Evaluation on the columns of `frame` (n x p): sum over tuples of
  // coefficient times the minor determinant of the selected rows.
  template <typename Derived>
  Scalar evaluate(const Eigen::MatrixBase<Derived>& frame) const {
    if (frame.rows() != n_ || frame.cols() != p_)
      throw std::invalid_argument("evaluate: frame must be n x degree");
    const auto& tt = detail::tuple_table(n_, p_);
    Scalar acc{};
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8> minor(p_, p_);
    for (int r = 0; r < terms(); ++r) {
      if (coeff_[r] == Scalar{}) continue;
      std::uint32_t m = tt.masks[r];
      int row = 0;
      for (std::uint32_t mm = m; mm; mm &= mm - 1)
        minor.row(row++) = frame.row(std::countr_zero(mm)).template cast<double>();
      acc += coeff_[r] * Scalar(minor.determinant());
    }
    return acc;
  }

 private:
  void check_same(const AlternatingForm& o) const {
    if (n_ != o.n_ || p_ != o.p_)
      throw std::invalid_argument("form arithmetic: mismatched (n, degree)");
  }

  int n_ = 0, p_ = 0;
  Eigen::Vector<Scalar, Eigen::Dynamic> coeff_;
};

template <typename Scalar>
AlternatingForm<Scalar> wedge(const AlternatingForm<Scalar>& a,
                              const AlternatingForm<Scalar>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: mismatched dimension");
  const int n = a.dim();
  AlternatingForm<Scalar> out(n, a.degree() + b.degree());
  const auto& ta = detail::tuple_table(n, a.degree());
  const auto& tb = detail::tuple_table(n, b.degree());
  const auto& to = detail::tuple_table(n, a.degree() + b.degree());
  for (int i = 0; i < a.terms(); ++i) {
    if (a[i] == Scalar{}) continue;
    for (int j = 0; j < b.terms(); ++j) {
      if (b[j] == Scalar{}) continue;
      std::uint32_t ma = ta.masks[i], mb = tb.masks[j];
      if (ma & mb) continue;
      int r = to.rank[ma | mb];
      out[r] += Scalar(detail::merge_sign(ma, mb)) * a[i] * b[j];
    }
  }
  return out;
}

template <typename Scalar>
AlternatingForm<Scalar> wedge_power(const AlternatingForm<Scalar>& a, int k) {
  if (k < 1) throw std::invalid_argument("wedge_power: k >= 1");
  AlternatingForm<Scalar> out = a;
  for (int i = 1; i < k; ++i) out = wedge(out, a);
  return out;
}

inline AlternatingForm<Complex> complexify(const AlternatingForm<double>& a) {
  AlternatingForm<Complex> out(a.dim(), a.degree());
  for (int i = 0; i < a.terms(); ++i) out[i] = Complex(a[i], 0.0);
  return out;
}

inline AlternatingForm<double> real_part(const AlternatingForm<Complex>& a) {
  AlternatingForm<double> out(a.dim(), a.degree());
  for (int i = 0; i < a.terms(); ++i) out[i] = a[i].real();
  return out;
}

inline AlternatingForm<double> imag_part(const AlternatingForm<Complex>& a) {
  AlternatingForm<double> out(a.dim(), a.degree());
  for (int i = 0; i < a.terms(); ++i) out[i] = a[i].imag();
  return out;
}

inline AlternatingForm<Complex> conjugate(const AlternatingForm<Complex>& a) {
  AlternatingForm<Complex> out(a.dim(), a.degree());
  for (int i = 0; i < a.terms(); ++i) out[i] = std::conj(a[i]);
  return out;
}

// Basis covector dx_i as a 1-form on R^n.
inline AlternatingForm<double> basis_covector(int n, int i) {
  AlternatingForm<double> f(n, 1);
  f.set_coefficient(1u << i, 1.0);
  return f;
}

// Simple p-vector e_{i1} ^ ... ^ e_{ip} spanned by the columns of `frame`,
// in the same dense tuple representation (coefficients = minors). Pairing a
// p-form against it is the coefficient dot product.
template <typename Derived>
AlternatingForm<double> frame_wedge(const Eigen::MatrixBase<Derived>& frame) {
  const int n = static_cast<int>(frame.rows());
  const int p = static_cast<int>(frame.cols());
  AlternatingForm<double> out(n, p);
  const auto& tt = detail::tuple_table(n, p);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8> minor(p, p);
  for (int r = 0; r < out.terms(); ++r) {
    std::uint32_t m = tt.masks[r];
    int row = 0;
    for (std::uint32_t mm = m; mm; mm &= mm - 1)
      minor.row(row++) = frame.row(std::countr_zero(mm));
    out[r] = minor.determinant();
  }
  return out;
}

template <typename Scalar>
Scalar pairing(const AlternatingForm<Scalar>& form, const AlternatingForm<double>& mvec) {
  if (form.dim() != mvec.dim() || form.degree() != mvec.degree())
    throw std::invalid_argument("pairing: mismatched (n, degree)");
  Scalar acc{};
  for (int i = 0; i < form.terms(); ++i) acc += form[i] * Scalar(mvec[i]);
  return acc;
}

}  // namespace slcone
