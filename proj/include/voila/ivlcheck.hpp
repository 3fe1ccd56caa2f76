#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "voila/ivl.hpp"
#include "voila/value.hpp"

// Finite-domain collecting-semantics verifier for the IVL fragment emitted by
// the encoder. A verification state is a set of atoms (heap, mask, store);
// values the program leaves unconstrained are enumerated lazily over the
// configured domains.
namespace voila::ivlcheck {

struct DomainConfig {
  std::int64_t intLo = -8;
  std::int64_t intHi = 8;
  std::map<std::string, std::vector<Value>> regionDomains;  // state domain D per region
  std::vector<Value> fracs;  // empty means 0, 1/4, 1/2, 3/4, 1
  std::size_t budget = 100000;  // live atoms
};

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdictName(Verdict v);

struct Failure {
  int line = 0;         // voila source line, 0 if none
  std::string check;    // message of the failing statement
  std::string reason;   // violated conjunct or missing permission
  std::string witness;  // the failing atom
};

struct MethodResult {
  std::string method;
  int line = 0;
  Verdict verdict = Verdict::Pass;
  std::vector<Failure> failures;
  std::string note;  // why the verdict is Inconclusive
  std::size_t peakAtoms = 0;
};

MethodResult verifyMethod(const ivl::Program& p, const ivl::MethodDecl& m, const DomainConfig& cfg);
MethodResult verifyMethod(const ivl::Program& p, const std::string& method, const DomainConfig& cfg);
// Methods with a body, in program order; at most jobs run concurrently.
std::vector<MethodResult> verifyProgram(const ivl::Program& p, const DomainConfig& cfg, unsigned jobs = 1);

struct Collected {
  MethodResult result;
  std::vector<std::vector<Value>> rows;  // per surviving atom, the values of the probes
};
// Runs m and evaluates the probe expressions in every atom reaching its end.
Collected collectValues(const ivl::Program& p, const ivl::MethodDecl& m, const std::vector<ivl::EPtr>& probes,
                        const DomainConfig& cfg);

}  // namespace voila::ivlcheck
