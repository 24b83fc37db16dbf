#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace arcscat {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.5772156649015329;

// C = ln2/(2pi) - gamma/(2pi) + i/4, the small-argument limit of
// (i/4)H0(z) + (1/2pi) J0(z) ln z.
inline const cplx C_limit{(0.6931471805599453 - euler_gamma) / (2.0 * pi), 0.25};

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};
inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }

struct SingularMatrixError : std::runtime_error {
  double pivot;
  explicit SingularMatrixError(double p)
      : std::runtime_error("matrix singular to working tolerance, pivot magnitude " +
                           std::to_string(p)),
        pivot(p) {}
};

struct StepRejectedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic standard-normal stream: explicit Box-Muller over mt19937_64
// so the byte stream does not depend on the standard library's
// normal_distribution implementation.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = unit_open_();
    double u2 = unit_open_();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double unit_open_() {
    // 53-bit mantissa shifted into (0,1): never exactly 0 or 1.
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace arcscat
