#include "voila/value.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace voila {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num_ = n / g;
  den_ = d / g;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) { return Rational(a.num_ * b.num_, a.den_ * b.den_); }
Rational operator/(const Rational& a, const Rational& b) { return Rational(a.num_ * b.den_, a.den_ * b.num_); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  // Denominators are positive, so cross multiplication preserves order.
  return a.num_ * b.den_ <=> b.num_ * a.den_;
}

Value Value::set(std::vector<Value> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return Value{Kind::Set, 0, {}, std::move(xs)};
}

bool Value::contains(const Value& v) const {
  if (kind == Kind::Set) return std::binary_search(elems.begin(), elems.end(), v);
  return std::find(elems.begin(), elems.end(), v) != elems.end();
}

std::string Value::str() const {
  switch (kind) {
    case Kind::Int: return std::to_string(i);
    case Kind::Bool: return i ? "true" : "false";
    case Kind::Frac: return q.str();
    case Kind::Ref: return i == 0 ? "null" : "ref" + std::to_string(i);
    case Kind::Set:
    case Kind::Seq: {
      std::string s = kind == Kind::Set ? "Set(" : "Seq(";
      for (std::size_t k = 0; k < elems.size(); ++k) s += (k ? ", " : "") + elems[k].str();
      return s + ")";
    }
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  // Ints and fractions compare numerically so 1 and 1f coincide.
  if (a.isNumeric() && b.isNumeric()) return a.asRational() <=> b.asRational();
  if (a.kind != b.kind) return static_cast<int>(a.kind) <=> static_cast<int>(b.kind);
  switch (a.kind) {
    case Value::Kind::Bool:
    case Value::Kind::Ref: return a.i <=> b.i;
    default: break;
  }
  return std::lexicographical_compare_three_way(a.elems.begin(), a.elems.end(), b.elems.begin(), b.elems.end());
}

Value setUnion(const Value& a, const Value& b) {
  std::vector<Value> out;
  std::set_union(a.elems.begin(), a.elems.end(), b.elems.begin(), b.elems.end(), std::back_inserter(out));
  return Value::set(std::move(out));
}

Value setInter(const Value& a, const Value& b) {
  std::vector<Value> out;
  std::set_intersection(a.elems.begin(), a.elems.end(), b.elems.begin(), b.elems.end(), std::back_inserter(out));
  return Value::set(std::move(out));
}

Value setMinus(const Value& a, const Value& b) {
  std::vector<Value> out;
  std::set_difference(a.elems.begin(), a.elems.end(), b.elems.begin(), b.elems.end(), std::back_inserter(out));
  return Value::set(std::move(out));
}

bool setSubset(const Value& a, const Value& b) {
  return std::includes(b.elems.begin(), b.elems.end(), a.elems.begin(), a.elems.end());
}

std::vector<Value> allSubsets(const std::vector<Value>& universe) {
  if (universe.size() > 20) throw std::length_error("subset enumeration over more than 20 elements");
  std::vector<Value> out;
  std::size_t n = std::size_t{1} << universe.size();
  out.reserve(n);
  for (std::size_t mask = 0; mask < n; ++mask) {
    std::vector<Value> xs;
    for (std::size_t k = 0; k < universe.size(); ++k)
      if (mask & (std::size_t{1} << k)) xs.push_back(universe[k]);
    out.push_back(Value::set(std::move(xs)));
  }
  return out;
}

}  // namespace voila
