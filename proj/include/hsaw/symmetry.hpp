#pragma once

// The dihedral group of the square lattice, acting on lattice vectors.

#include <array>
#include <cstdint>
#include <string_view>

#include "hsaw/lattice.hpp"

namespace hsaw {

/// One of the eight lattice isometries fixing the origin, stored as the
/// integer matrix [[xx, xy], [yx, yy]] acting on column vectors.
class LatticeSymmetry {
 public:
  enum class Kind : std::uint8_t {
    identity,
    rotate90,
    rotate180,
    rotate270,
    reflect_x,   // (x, y) -> (-x, y)
    reflect_y,   // (x, y) -> (x, -y)
    diagonal,    // (x, y) -> (y, x)
    antidiagonal // (x, y) -> (-y, -x)
  };

  constexpr LatticeSymmetry() = default;

  constexpr explicit LatticeSymmetry(Kind k) {
    switch (k) {
      case Kind::identity: set(1, 0, 0, 1); break;
      case Kind::rotate90: set(0, -1, 1, 0); break;
      case Kind::rotate180: set(-1, 0, 0, -1); break;
      case Kind::rotate270: set(0, 1, -1, 0); break;
      case Kind::reflect_x: set(-1, 0, 0, 1); break;
      case Kind::reflect_y: set(1, 0, 0, -1); break;
      case Kind::diagonal: set(0, 1, 1, 0); break;
      case Kind::antidiagonal: set(0, -1, -1, 0); break;
    }
  }

  static constexpr std::array<Kind, 8> all_kinds() {
    return {Kind::identity,  Kind::rotate90,  Kind::rotate180, Kind::rotate270,
            Kind::reflect_x, Kind::reflect_y, Kind::diagonal,  Kind::antidiagonal};
  }

  /// The seven non-identity elements, in a fixed order used by the sampler.
  static constexpr std::array<LatticeSymmetry, 7> proposals() {
    return {LatticeSymmetry(Kind::rotate90),  LatticeSymmetry(Kind::rotate180),
            LatticeSymmetry(Kind::rotate270), LatticeSymmetry(Kind::reflect_x),
            LatticeSymmetry(Kind::reflect_y), LatticeSymmetry(Kind::diagonal),
            LatticeSymmetry(Kind::antidiagonal)};
  }

  template <typename T>
  constexpr void apply(T x, T y, T& ox, T& oy) const {
    ox = static_cast<T>(xx_ * x + xy_ * y);
    oy = static_cast<T>(yx_ * x + yy_ * y);
  }

  constexpr LatticePoint operator()(LatticePoint p) const {
    LatticePoint out;
    apply(p.x, p.y, out.x, out.y);
    return out;
  }

  /// (a * b)(v) = a(b(v)).
  constexpr LatticeSymmetry operator*(const LatticeSymmetry& b) const {
    LatticeSymmetry r;
    r.set(xx_ * b.xx_ + xy_ * b.yx_, xx_ * b.xy_ + xy_ * b.yy_, yx_ * b.xx_ + yy_ * b.yx_,
          yx_ * b.xy_ + yy_ * b.yy_);
    return r;
  }

  /// Orthogonal matrix: the inverse is the transpose.
  constexpr LatticeSymmetry inverse() const {
    LatticeSymmetry r;
    r.set(xx_, yx_, xy_, yy_);
    return r;
  }

  constexpr bool is_identity() const { return xx_ == 1 && yy_ == 1 && xy_ == 0 && yx_ == 0; }

  constexpr bool operator==(const LatticeSymmetry&) const = default;

  constexpr int xx() const { return xx_; }
  constexpr int xy() const { return xy_; }
  constexpr int yx() const { return yx_; }
  constexpr int yy() const { return yy_; }

 private:
  constexpr void set(int a, int b, int c, int d) {
    xx_ = static_cast<std::int8_t>(a);
    xy_ = static_cast<std::int8_t>(b);
    yx_ = static_cast<std::int8_t>(c);
    yy_ = static_cast<std::int8_t>(d);
  }

  std::int8_t xx_ = 1, xy_ = 0, yx_ = 0, yy_ = 1;
};

}  // namespace hsaw
