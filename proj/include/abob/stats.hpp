#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace abob {

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean_of: empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Sample standard deviation (n - 1 denominator).
inline double stddev_of(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("stddev_of: need at least 2 values");
  const double m = mean_of(xs);
  double sq = 0.0;
  for (double x : xs) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("ibeta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("ibeta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const auto continued_fraction = [](double a_, double b_, double x_) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 3e-15;
    const double qab = a_ + b_;
    const double qap = a_ + 1.0;
    const double qam = a_ - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x_ / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
      const double m2 = 2.0 * m;
      double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
      d = 1.0 + aa * d;
      if (std::abs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::abs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::abs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::abs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
  };

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * continued_fraction(a, b, x) / a;
  return 1.0 - front * continued_fraction(b, a, 1.0 - x) / b;
}

struct WelchResult {
  double t;
  double p_value;
  double degrees_of_freedom;
};

// Welch's unequal-variance two-sided t-test with Welch-Satterthwaite
// degrees of freedom; the p-value comes from the Student-t tail identity
// P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_t_test: both samples need >= 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double sa = stddev_of(a);
  const double sb = stddev_of(b);
  const double va = sa * sa / na;
  const double vb = sb * sb / nb;
  if (va + vb <= 0.0)
    throw std::invalid_argument("welch_t_test: zero pooled variance");
  const double t = (ma - mb) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const double p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
  return {t, p, df};
}

inline WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  return welch_t_test(std::span<const double>(a), std::span<const double>(b));
}

}  // namespace abob
