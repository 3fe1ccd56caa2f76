#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voila/ast.hpp"
#include "voila/value.hpp"

namespace voila {

// A guard instance G(args)@region. For fractional guards the last argument
// is the permission amount; for indexed guards the single argument is the
// index.
struct GuardTerm {
  std::string name;
  Value region;
  std::vector<Value> args;
  GuardKind kind = GuardKind::Unique;

  // Arguments that identify the resource, i.e. without a fractional amount.
  std::vector<Value> key() const;
  Rational amount() const;
  std::string str() const;
};

// Multiset of locally held guards. Fractional entries aggregate by amount,
// other kinds by multiplicity.
class GuardHolding {
 public:
  struct Entry {
    std::string name;
    Value region;
    std::vector<Value> key;
    GuardKind kind;
    Rational amount;  // summed fraction, or multiplicity
  };

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Multiplicity or aggregate held for the resource identified by g.
  Rational held(const GuardTerm& g) const;
  // Any instance of g.name at g.region, regardless of arguments.
  Rational heldAnyArgs(const GuardTerm& g) const;

  void addUnchecked(const GuardTerm& g);

  friend bool operator==(const GuardHolding& a, const GuardHolding& b);

 private:
  std::vector<Entry> entries_;
  Entry* find(const std::string& name, const Value& region, const std::vector<Value>& key);
  const Entry* find(const std::string& name, const Value& region, const std::vector<Value>& key) const;
};

bool guardEntails(const GuardTerm& required, const GuardHolding& held);
bool envMayHold(const GuardTerm& g, const GuardHolding& local);

// Adds g to h. Fails on a duplicated unique or indexed guard and on an
// aggregate fraction above 1. Manual guards compose as a free multiset.
std::optional<GuardHolding> compose(const GuardHolding& h, const GuardTerm& g, std::string* error = nullptr);

// Syntactic entailment between two terms, the LESS macro: does `given`
// entail `required`? Unique/duplicable compare names, fractional compare
// amounts, indexed compare the index, manual compare all arguments.
bool lessTerm(const GuardTerm& required, const GuardTerm& given);

}  // namespace voila
