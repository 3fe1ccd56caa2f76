#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "support/generators.hpp"
#include "voila/analysis.hpp"
#include "voila/candidate.hpp"
#include "voila/ivl.hpp"
#include "voila/ivlcheck.hpp"
#include "voila/regions.hpp"

namespace voila::testing {

std::string dataPath(const std::string& rel);
std::string readFile(const std::string& path);

struct Pipeline {
  Diagnostics diags;  // parse, analysis and expansion
  std::shared_ptr<const ResolvedProgram> program;
  ProofCandidate candidate;
  ivl::Program ivl;
  bool encoded = false;
};

// Runs every stage that can run; encoding needs a clean analysis.
Pipeline runPipeline(const std::string& source, const AnalysisConfig& cfg = {});
Pipeline runFile(const std::string& rel, const AnalysisConfig& cfg = {});

// Verifier domains matching an analysis: int range and region domains.
ivlcheck::DomainConfig domainsFor(const ResolvedProgram& rp);

const ivlcheck::MethodResult* findResult(const std::vector<ivlcheck::MethodResult>& rs, const std::string& m);

// The library's view of a generated region and stabilization case.
struct RegionFixture {
  std::shared_ptr<const ResolvedProgram> program;
  RegionConfig config;
};
RegionFixture regionFixture(const TransitionSystem& ts, const StabilizeCase& c);

// Region states reachable after the encoder's STABILIZE block, run by the
// micro-verifier from a state whose region value lies in c.start. Empty
// optional if the method did not pass.
std::optional<std::set<int>> ivlStabilize(const TransitionSystem& ts, const StabilizeCase& c,
                                          std::string* why = nullptr);

std::set<int> toInts(const std::vector<Value>& vs);

}  // namespace voila::testing
