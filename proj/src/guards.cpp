#include "voila/guards.hpp"

namespace voila {

std::vector<Value> GuardTerm::key() const {
  if (kind == GuardKind::Fractional && !args.empty()) return {args.begin(), args.end() - 1};
  return args;
}

Rational GuardTerm::amount() const {
  if (kind == GuardKind::Fractional && !args.empty()) return args.back().asRational();
  return Rational(1);
}

std::string GuardTerm::str() const {
  std::string s = name;
  if (!args.empty()) {
    s += "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
    s += ")";
  }
  return s + "@" + region.str();
}

GuardHolding::Entry* GuardHolding::find(const std::string& name, const Value& region,
                                        const std::vector<Value>& key) {
  for (auto& e : entries_)
    if (e.name == name && e.region == region && e.key == key) return &e;
  return nullptr;
}

const GuardHolding::Entry* GuardHolding::find(const std::string& name, const Value& region,
                                              const std::vector<Value>& key) const {
  for (const auto& e : entries_)
    if (e.name == name && e.region == region && e.key == key) return &e;
  return nullptr;
}

Rational GuardHolding::held(const GuardTerm& g) const {
  const Entry* e = find(g.name, g.region, g.key());
  return e ? e->amount : Rational(0);
}

Rational GuardHolding::heldAnyArgs(const GuardTerm& g) const {
  Rational sum;
  for (const auto& e : entries_)
    if (e.name == g.name && e.region == g.region) sum += e.amount;
  return sum;
}

void GuardHolding::addUnchecked(const GuardTerm& g) {
  if (Entry* e = find(g.name, g.region, g.key())) {
    e->amount += g.amount();
    return;
  }
  entries_.push_back(Entry{g.name, g.region, g.key(), g.kind, g.amount()});
}

bool operator==(const GuardHolding& a, const GuardHolding& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (const auto& e : a.entries_) {
    const auto* o = b.find(e.name, e.region, e.key);
    if (!o || !(o->amount == e.amount)) return false;
  }
  return true;
}

bool guardEntails(const GuardTerm& required, const GuardHolding& held) {
  switch (required.kind) {
    case GuardKind::Unique:
    case GuardKind::Duplicable: return held.heldAnyArgs(required) > Rational(0);
    case GuardKind::Fractional: return held.held(required) >= required.amount();
    case GuardKind::Indexed:
    case GuardKind::Manual: return held.held(required) > Rational(0);
  }
  return false;
}

bool envMayHold(const GuardTerm& g, const GuardHolding& local) {
  switch (g.kind) {
    case GuardKind::Unique: return local.heldAnyArgs(g).isZero();
    case GuardKind::Duplicable: return true;
    case GuardKind::Fractional: return local.held(g) < Rational(1);
    case GuardKind::Indexed:
    case GuardKind::Manual: return local.held(g).isZero();
  }
  return false;
}

std::optional<GuardHolding> compose(const GuardHolding& h, const GuardTerm& g, std::string* error) {
  auto fail = [&](const std::string& msg) -> std::optional<GuardHolding> {
    if (error) *error = msg;
    return std::nullopt;
  };
  switch (g.kind) {
    case GuardKind::Unique:
      if (!h.heldAnyArgs(g).isZero()) return fail("guard duplication: " + g.str());
      break;
    case GuardKind::Indexed:
      if (!h.held(g).isZero()) return fail("guard duplication: " + g.str());
      break;
    case GuardKind::Fractional:
      if (g.amount() <= Rational(0)) return fail("non-positive fraction: " + g.str());
      if (h.held(g) + g.amount() > Rational(1)) return fail("fraction exceeds 1: " + g.str());
      break;
    case GuardKind::Duplicable:
      // Duplicable guards are idempotent.
      if (!h.held(g).isZero()) return h;
      break;
    case GuardKind::Manual: break;
  }
  GuardHolding out = h;
  out.addUnchecked(g);
  return out;
}

bool lessTerm(const GuardTerm& required, const GuardTerm& given) {
  if (required.name != given.name || !(required.region == given.region)) return false;
  switch (required.kind) {
    case GuardKind::Unique:
    case GuardKind::Duplicable: return true;
    case GuardKind::Fractional: return required.key() == given.key() && given.amount() >= required.amount();
    case GuardKind::Indexed:
    case GuardKind::Manual: return required.args == given.args;
  }
  return false;
}

}  // namespace voila
