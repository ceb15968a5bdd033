#pragma once

// Quaternion scalar q = a + b i + c j + d k.
//
// Multiplication follows Hamilton's rules (i^2 = j^2 = k^2 = ijk = -1) and is
// NOT commutative; every operator below keeps the operand order as written.

#include <cmath>
#include <ostream>

#include "quatpinv/errors.hpp"

namespace quatpinv {

template <typename T>
struct Quaternion {
  using Scalar = T;

  T a{0}, b{0}, c{0}, d{0};  // storage order is fixed: (a, b, c, d)

  constexpr Quaternion() = default;
  constexpr Quaternion(T re) : a(re) {}  // NOLINT: implicit real embedding
  constexpr Quaternion(T a_, T b_, T c_, T d_) : a(a_), b(b_), c(c_), d(d_) {}

  static constexpr Quaternion i() { return {0, 1, 0, 0}; }
  static constexpr Quaternion j() { return {0, 0, 1, 0}; }
  static constexpr Quaternion k() { return {0, 0, 0, 1}; }

  constexpr T real() const { return a; }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    a += o.a; b += o.b; c += o.c; d += o.d;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    a -= o.a; b -= o.b; c -= o.c; d -= o.d;
    return *this;
  }
  constexpr Quaternion& operator*=(T s) {
    a *= s; b *= s; c *= s; d *= s;
    return *this;
  }
  constexpr Quaternion& operator/=(T s) {
    a /= s; b /= s; c /= s; d /= s;
    return *this;
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

template <typename T>
constexpr Quaternion<T> operator+(Quaternion<T> p, const Quaternion<T>& q) {
  return p += q;
}
template <typename T>
constexpr Quaternion<T> operator-(Quaternion<T> p, const Quaternion<T>& q) {
  return p -= q;
}
template <typename T>
constexpr Quaternion<T> operator-(const Quaternion<T>& q) {
  return {-q.a, -q.b, -q.c, -q.d};
}

/// Hamilton product p*q.
template <typename T>
constexpr Quaternion<T> operator*(const Quaternion<T>& p, const Quaternion<T>& q) {
  return {p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
          p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
          p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
          p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a};
}

template <typename T>
constexpr Quaternion<T> operator*(Quaternion<T> q, T s) {
  return q *= s;
}
template <typename T>
constexpr Quaternion<T> operator*(T s, Quaternion<T> q) {
  return q *= s;
}
template <typename T>
constexpr Quaternion<T> operator/(Quaternion<T> q, T s) {
  return q /= s;
}

template <typename T>
constexpr Quaternion<T> conj(const Quaternion<T>& q) {
  return {q.a, -q.b, -q.c, -q.d};
}

/// |q|^2
template <typename T>
constexpr T norm2(const Quaternion<T>& q) {
  return q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d;
}

template <typename T>
T norm(const Quaternion<T>& q) {
  return std::sqrt(norm2(q));
}

/// Re(conj(p) q), the real inner product of R^4.
template <typename T>
constexpr T real_dot(const Quaternion<T>& p, const Quaternion<T>& q) {
  return p.a * q.a + p.b * q.b + p.c * q.c + p.d * q.d;
}

/// q^{-1} = conj(q)/|q|^2. Throws DivisionByZero when |q| < 1e-300.
template <typename T>
Quaternion<T> inv(const Quaternion<T>& q) {
  const T n = norm(q);
  if (!(n >= T(1e-300))) throw DivisionByZero("quaternion inverse of |q| < 1e-300");
  return conj(q) / (n * n);
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const Quaternion<T>& q) {
  return os << '(' << q.a << (q.b < 0 ? " - " : " + ") << std::abs(q.b) << "i"
            << (q.c < 0 ? " - " : " + ") << std::abs(q.c) << "j"
            << (q.d < 0 ? " - " : " + ") << std::abs(q.d) << "k)";
}

using Quat = Quaternion<double>;

}  // namespace quatpinv
