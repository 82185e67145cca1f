#pragma once

#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace su2rb {

// Half-integer label (spin j, irrep rank k, magnetic quantum number m, ...).
// Stored exactly as twice its value so that parity checks and selection rules
// are plain integer arithmetic -- no floating-point spin labels anywhere.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  // Integer-valued label, e.g. HalfInt(3) == 3.
  constexpr explicit HalfInt(int n) : twice_(2 * n) {}
  // Exact half-integer, e.g. HalfInt::from_twice(7) == 7/2.
  static constexpr HalfInt from_twice(int t) {
    HalfInt h;
    h.twice_ = t;
    return h;
  }

  constexpr int twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  // Value as a plain int; only valid for integer labels.
  constexpr int as_int() const {
    if (twice_ % 2 != 0) throw std::domain_error("HalfInt::as_int on half-odd value");
    return twice_ / 2;
  }
  constexpr double value() const { return 0.5 * twice_; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt abs() const { return from_twice(twice_ < 0 ? -twice_ : twice_); }

  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }
  friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

  // True when (a+b) is an integer, i.e. the two labels have the same parity.
  friend constexpr bool same_parity(HalfInt a, HalfInt b) {
    return ((a.twice_ - b.twice_) % 2) == 0;
  }

  std::string str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

// (-1)^p for an integer-valued HalfInt exponent.
inline int parity_sign(HalfInt p) {
  int n = p.as_int();
  return (n % 2 == 0) ? 1 : -1;
}
inline int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace su2rb
