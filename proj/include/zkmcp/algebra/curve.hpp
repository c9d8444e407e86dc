#pragma once

#include <span>
#include <vector>

#include "zkmcp/algebra/fields.hpp"

namespace zkmcp {

// Short Weierstrass curve y^2 = x^3 + b with a = 0.
template <class F, class Cfg>
struct AffinePoint {
  F x, y;
  bool infinity = true;

  AffinePoint() = default;
  AffinePoint(const F& x_, const F& y_) : x(x_), y(y_), infinity(false) {}

  static AffinePoint identity() { return {}; }
  static AffinePoint generator() { return Cfg::generator(); }

  bool is_on_curve() const {
    if (infinity) return true;
    return y.square() == x.square() * x + Cfg::b();
  }
  AffinePoint operator-() const {
    if (infinity) return *this;
    return {x, -y};
  }
  friend bool operator==(const AffinePoint& a, const AffinePoint& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x == b.x && a.y == b.y;
  }
};

template <class F, class Cfg>
class JacobianPoint {
 public:
  using Affine = AffinePoint<F, Cfg>;

  F X, Y, Z;

  JacobianPoint() : X(F::one()), Y(F::one()), Z(F::zero()) {}
  JacobianPoint(const F& x, const F& y, const F& z) : X(x), Y(y), Z(z) {}
  JacobianPoint(const Affine& a)  // NOLINT(google-explicit-constructor)
      : X(a.infinity ? F::one() : a.x),
        Y(a.infinity ? F::one() : a.y),
        Z(a.infinity ? F::zero() : F::one()) {}

  static JacobianPoint identity() { return {}; }
  static JacobianPoint generator() { return Cfg::generator(); }

  bool is_identity() const { return Z.is_zero(); }

  JacobianPoint operator-() const { return {X, -Y, Z}; }

  // dbl-2009-l
  JacobianPoint dbl() const {
    if (is_identity()) return *this;
    const F a = X.square();
    const F b = Y.square();
    const F c = b.square();
    const F d = ((X + b).square() - a - c).dbl();
    const F e = a.dbl() + a;
    const F f = e.square();
    JacobianPoint r;
    r.X = f - d.dbl();
    r.Y = e * (d - r.X) - c.dbl().dbl().dbl();
    r.Z = (Y * Z).dbl();
    return r;
  }

  // add-2007-bl
  JacobianPoint operator+(const JacobianPoint& o) const {
    if (is_identity()) return o;
    if (o.is_identity()) return *this;
    const F z1z1 = Z.square();
    const F z2z2 = o.Z.square();
    const F u1 = X * z2z2;
    const F u2 = o.X * z1z1;
    const F s1 = Y * o.Z * z2z2;
    const F s2 = o.Y * Z * z1z1;
    const F h = u2 - u1;
    const F rr = (s2 - s1).dbl();
    if (h.is_zero()) {
      return rr.is_zero() ? dbl() : identity();
    }
    const F i = h.dbl().square();
    const F j = h * i;
    const F v = u1 * i;
    JacobianPoint r;
    r.X = rr.square() - j - v.dbl();
    r.Y = rr * (v - r.X) - (s1 * j).dbl();
    r.Z = ((Z + o.Z).square() - z1z1 - z2z2) * h;
    return r;
  }

  // madd-2007-bl
  JacobianPoint add_mixed(const Affine& o) const {
    if (o.infinity) return *this;
    if (is_identity()) return JacobianPoint(o);
    const F z1z1 = Z.square();
    const F u2 = o.x * z1z1;
    const F s2 = o.y * Z * z1z1;
    const F h = u2 - X;
    const F rr = (s2 - Y).dbl();
    if (h.is_zero()) {
      return rr.is_zero() ? dbl() : identity();
    }
    const F hh = h.square();
    const F i = hh.dbl().dbl();
    const F j = h * i;
    const F v = X * i;
    JacobianPoint r;
    r.X = rr.square() - j - v.dbl();
    r.Y = rr * (v - r.X) - (Y * j).dbl();
    r.Z = (Z + h).square() - z1z1 - hh;
    return r;
  }

  JacobianPoint operator-(const JacobianPoint& o) const { return *this + (-o); }
  JacobianPoint& operator+=(const JacobianPoint& o) { return *this = *this + o; }

  JacobianPoint mul(const U256& k) const {
    JacobianPoint r;
    for (size_t i = k.num_bits(); i-- > 0;) {
      r = r.dbl();
      if (k.bit(i)) r += *this;
    }
    return r;
  }
  JacobianPoint mul(const Fr& k) const { return mul(k.to_canonical()); }

  Affine to_affine() const {
    if (is_identity()) return Affine::identity();
    const F zi = Z.inverse();
    const F zi2 = zi.square();
    return {X * zi2, Y * zi2 * zi};
  }

  friend bool operator==(const JacobianPoint& a, const JacobianPoint& b) {
    if (a.is_identity() || b.is_identity()) {
      return a.is_identity() == b.is_identity();
    }
    const F z1z1 = a.Z.square();
    const F z2z2 = b.Z.square();
    return a.X * z2z2 == b.X * z1z1 &&
           a.Y * z2z2 * b.Z == b.Y * z1z1 * a.Z;
  }
};

// Converts many points to affine with a single field inversion.
template <class F, class Cfg>
std::vector<AffinePoint<F, Cfg>> batch_to_affine(
    std::span<const JacobianPoint<F, Cfg>> pts) {
  std::vector<AffinePoint<F, Cfg>> out(pts.size());
  std::vector<F> prefix(pts.size());
  F acc = F::one();
  for (size_t i = 0; i < pts.size(); ++i) {
    prefix[i] = acc;
    if (!pts[i].is_identity()) acc *= pts[i].Z;
  }
  F inv = acc.inverse();
  for (size_t i = pts.size(); i-- > 0;) {
    if (pts[i].is_identity()) continue;
    const F zi = inv * prefix[i];
    inv *= pts[i].Z;
    const F zi2 = zi.square();
    out[i] = AffinePoint<F, Cfg>(pts[i].X * zi2, pts[i].Y * zi2 * zi);
  }
  return out;
}

struct G1Config {
  static const Fq& b();
  static AffinePoint<Fq, G1Config> generator();
};

// Sextic D-type twist: y^2 = x^3 + 3 / (9 + u).
struct G2Config {
  static const Fq2& b();
  static AffinePoint<Fq2, G2Config> generator();
};

using G1Affine = AffinePoint<Fq, G1Config>;
using G1 = JacobianPoint<Fq, G1Config>;
using G2Affine = AffinePoint<Fq2, G2Config>;
using G2 = JacobianPoint<Fq2, G2Config>;

// r * P == O; G1 has cofactor 1 so only G2 needs this.
bool g2_in_subgroup(const G2Affine& p);

}  // namespace zkmcp
