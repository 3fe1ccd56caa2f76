#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace voila {

// Exact rational with positive denominator, always in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool isZero() const { return num_ == 0; }
  bool isInteger() const { return den_ == 1; }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Runtime value shared by the pure evaluator, the region oracle and the
// micro-verifier. References are small integers, 0 is null.
struct Value {
  enum class Kind { Int, Bool, Frac, Ref, Set, Seq };

  Kind kind = Kind::Int;
  std::int64_t i = 0;      // Int, Ref id, Bool (0/1)
  Rational q;              // Frac
  std::vector<Value> elems;  // Set (sorted, unique) or Seq

  static Value integer(std::int64_t v) { return Value{Kind::Int, v, {}, {}}; }
  static Value boolean(bool b) { return Value{Kind::Bool, b ? 1 : 0, {}, {}}; }
  static Value frac(Rational r) { return Value{Kind::Frac, 0, r, {}}; }
  static Value ref(std::int64_t id) { return Value{Kind::Ref, id, {}, {}}; }
  static Value null() { return ref(0); }
  static Value set(std::vector<Value> xs);
  static Value seq(std::vector<Value> xs) { return Value{Kind::Seq, 0, {}, std::move(xs)}; }

  bool asBool() const { return i != 0; }
  bool isNumeric() const { return kind == Kind::Int || kind == Kind::Frac; }
  Rational asRational() const { return kind == Kind::Frac ? q : Rational(i); }
  bool contains(const Value& v) const;
  std::string str() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
};

Value setUnion(const Value& a, const Value& b);
Value setInter(const Value& a, const Value& b);
Value setMinus(const Value& a, const Value& b);
bool setSubset(const Value& a, const Value& b);

// All subsets of a sorted element list, ordered by bitmask.
std::vector<Value> allSubsets(const std::vector<Value>& universe);

}  // namespace voila
