#pragma once

#include <cstdint>
#include <functional>
#include <ostream>

namespace softcore::sat {

using Var = std::int32_t;

/// Boolean literal: variable index plus polarity, packed as 2*var + negated.
///
/// Variable 0 is reserved by the engine as the constant `true`, so user
/// variables start at 1 and `kTrue` / `kFalse` are always available as
/// root-fixed literals.
class Lit {
 public:
  constexpr Lit() = default;
  constexpr Lit(Var var, bool negated) : code_(2 * var + (negated ? 1 : 0)) {}

  static constexpr Lit from_code(std::int32_t code) {
    Lit l;
    l.code_ = code;
    return l;
  }
  /// DIMACS-style signed integer (+v / -v).
  static constexpr Lit from_dimacs(int signed_var) {
    return signed_var > 0 ? Lit(signed_var, false) : Lit(-signed_var, true);
  }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool negated() const { return (code_ & 1) != 0; }
  constexpr std::int32_t code() const { return code_; }
  constexpr bool valid() const { return code_ >= 0; }
  constexpr int to_dimacs() const { return negated() ? -var() : var(); }

  constexpr Lit operator~() const { return from_code(code_ ^ 1); }

  friend constexpr bool operator==(Lit a, Lit b) = default;
  friend constexpr auto operator<=>(Lit a, Lit b) { return a.code_ <=> b.code_; }

 private:
  std::int32_t code_ = -2;
};

inline constexpr Lit kTrue{0, false};
inline constexpr Lit kFalse{0, true};
inline constexpr Lit kNoLit{};

inline std::ostream& operator<<(std::ostream& os, Lit l) { return os << l.to_dimacs(); }

enum class LBool : std::uint8_t { kFalse = 0, kTrue = 1, kUndef = 2 };

inline constexpr LBool operator^(LBool b, bool flip) {
  if (b == LBool::kUndef) return b;
  return static_cast<LBool>(static_cast<std::uint8_t>(b) ^ static_cast<std::uint8_t>(flip));
}

}  // namespace softcore::sat

template <>
struct std::hash<softcore::sat::Lit> {
  std::size_t operator()(softcore::sat::Lit l) const noexcept {
    return std::hash<std::int32_t>{}(l.code());
  }
};
