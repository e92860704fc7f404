#include "helmflow/series.hpp"

#include <sstream>

#include "helmflow/errors.hpp"

namespace helmflow {

Complex PowerSeries::eval(Complex z) const {
  Complex acc(0.0, 0.0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex convolve(const PowerSeries& a, const PowerSeries& b, int n) {
  if (n < 0) throw ValidationError("convolve: negative order");
  if (a.order() < n || b.order() < n)
    throw ValidationError("convolve: order " + std::to_string(n) +
                          " exceeds available coefficients");
  Complex acc(0.0, 0.0);
  for (int m = 0; m <= n; ++m) acc += a[m] * b[n - m];
  return acc;
}

Complex reciprocal_coefficient(const PowerSeries& v, const PowerSeries& w_prefix, int n) {
  if (n < 0) throw ValidationError("reciprocal_coefficient: negative order");
  if (v.empty() || v[0] == Complex(0.0, 0.0))
    throw SolverError("reciprocal_coefficient: V(0) = 0, degenerate seed");
  if (n == 0) return 1.0 / v[0];
  if (v.order() < n || w_prefix.order() < n - 1)
    throw ValidationError("reciprocal_coefficient: missing lower-order coefficients");
  Complex acc(0.0, 0.0);
  for (int m = 0; m < n; ++m) acc += v[n - m] * w_prefix[m];
  return -acc / v[0];
}

void SeriesBundle::require_uniform() const {
  const int n = order();
  auto check = [&](const std::vector<PowerSeries>& track, const char* name) {
    for (const auto& s : track)
      if (s.order() != n)
        throw ValidationError(std::string("SeriesBundle: track '") + name +
                              "' does not share order " + std::to_string(n));
  };
  check(v, "v");
  if (!vbar.empty()) check(vbar, "vbar");
  if (!w.empty()) check(w, "w");
}

Eigen::VectorXcd SeriesBundle::order_slice(const std::vector<PowerSeries>& track, int m) const {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(track.size()));
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (track[i].order() < m)
      throw ValidationError("SeriesBundle: order slice beyond truncation");
    out[static_cast<Eigen::Index>(i)] = track[i][m];
  }
  return out;
}

Eigen::VectorXcd SeriesBundle::eval(Complex z) const {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].eval(z);
  return out;
}

std::string coefficient_csv(const std::vector<PowerSeries>& series,
                            const std::vector<int>& bus_ids) {
  if (series.size() != bus_ids.size())
    throw ValidationError("coefficient_csv: id list does not match series count");
  std::ostringstream os;
  os.precision(17);
  os << "bus,n,re,im,abs\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (int n = 0; n <= series[i].order(); ++n) {
      const Complex c = series[i][n];
      os << bus_ids[i] << ',' << n << ',' << c.real() << ',' << c.imag() << ','
         << std::abs(c) << '\n';
    }
  }
  return os.str();
}

}  // namespace helmflow
