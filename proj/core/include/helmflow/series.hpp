#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace helmflow {

using Complex = std::complex<double>;

/// Truncated complex power series sum_n coeffs[n] * z^n.
///
/// The truncation degree is explicit: binary operations never zero-extend a
/// shorter operand, a length mismatch is an error at the call site.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}

  static PowerSeries constant(Complex c0) { return PowerSeries({c0}); }

  /// Highest stored power, -1 when empty.
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }

  Complex operator[](int n) const { return coeffs_[static_cast<std::size_t>(n)]; }
  Complex& operator[](int n) { return coeffs_[static_cast<std::size_t>(n)]; }

  void push_back(Complex c) { coeffs_.push_back(c); }
  void reserve(std::size_t n) { coeffs_.reserve(n); }

  const std::vector<Complex>& coeffs() const { return coeffs_; }

  /// Horner evaluation of the truncated sum.
  Complex eval(Complex z) const;

 private:
  std::vector<Complex> coeffs_;
};

/// Cauchy product coefficient sum_{m=0..n} a[m]*b[n-m].
/// Throws ValidationError if either series is shorter than n.
Complex convolve(const PowerSeries& a, const PowerSeries& b, int n);

/// Next coefficient W[n] of the reciprocal series W = 1/v, given W[0..n-1]
/// in w_prefix.  W[0] = 1/v[0]; for n >= 1
///   W[n] = -(sum_{m=0..n-1} v[n-m] W[m]) / v[0].
/// Throws SolverError when v[0] == 0 (degenerate seed).
Complex reciprocal_coefficient(const PowerSeries& v, const PowerSeries& w_prefix, int n);

/// Per-bus series tracks produced by the embedding recurrences.
/// Index 0 is the slack bus; its voltage track is the constant series (1,0,...).
/// `vbar` is populated only by the two-track recurrences, `w` only by the
/// solvers that need reciprocal series.
struct SeriesBundle {
  std::vector<PowerSeries> v;
  std::vector<PowerSeries> vbar;
  std::vector<PowerSeries> w;

  int bus_count() const { return static_cast<int>(v.size()); }

  /// Common truncation order of the voltage tracks.
  int order() const { return v.empty() ? -1 : v.front().order(); }

  /// All non-empty member tracks must share one truncation order.
  void require_uniform() const;

  /// V[m] of every bus as a dense vector (track = v or vbar).
  Eigen::VectorXcd order_slice(const std::vector<PowerSeries>& track, int m) const;

  /// Truncated-series evaluation of every bus voltage at z.
  Eigen::VectorXcd eval(Complex z) const;
};

/// CSV of per-bus coefficient magnitudes: header "bus,n,re,im,abs", one row
/// per (bus, order).  `bus_ids` maps bundle indices to external bus numbers.
std::string coefficient_csv(const std::vector<PowerSeries>& series,
                            const std::vector<int>& bus_ids);

}  // namespace helmflow
