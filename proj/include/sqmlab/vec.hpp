#pragma once

#include <cmath>

namespace sqmlab {

/// Small fixed 3-vector; unused trailing components stay zero in lower
/// dimensions so the same type serves d = 1, 2, 3.
struct Vec3 {
  double v[3] = {0.0, 0.0, 0.0};

  Vec3() = default;
  Vec3(double x, double y = 0.0, double z = 0.0) : v{x, y, z} {}

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  Vec3& operator+=(const Vec3& o) {
    v[0] += o.v[0];
    v[1] += o.v[1];
    v[2] += o.v[2];
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    v[0] -= o.v[0];
    v[1] -= o.v[1];
    v[2] -= o.v[2];
    return *this;
  }
  Vec3& operator*=(double s) {
    v[0] *= s;
    v[1] *= s;
    v[2] *= s;
    return *this;
  }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= 1.0 / s; }
inline Vec3 operator-(const Vec3& a) { return {-a.v[0], -a.v[1], -a.v[2]}; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.v[1] * b.v[2] - a.v[2] * b.v[1],
          a.v[2] * b.v[0] - a.v[0] * b.v[2],
          a.v[0] * b.v[1] - a.v[1] * b.v[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm_sq(const Vec3& a) { return dot(a, a); }

}  // namespace sqmlab
