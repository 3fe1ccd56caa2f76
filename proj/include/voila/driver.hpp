#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "voila/analysis.hpp"
#include "voila/ivlcheck.hpp"

// Pipeline driver behind the voila command line tool.
namespace voila::driver {

struct RunConfig {
  std::vector<std::string> inputs;
  bool check = false;  // run the micro-verifier
  bool emit = false;   // write the IVL text
  bool dumpCandidate = false;
  bool json = false;
  unsigned jobs = 1;
  std::string outDir;  // emit target; stdout when empty
  AnalysisConfig analysis;
  ivlcheck::DomainConfig domains;  // regionDomains are filled from the analysis
};

// Exit statuses.
constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

// Runs the pipeline; human diagnostics (or one JSON document) go to out.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// "R=v1,v2,..."; values are ints or true/false. Returns an error message.
std::optional<std::string> parseStateDomain(const std::string& text, AnalysisConfig& cfg);
// "lo..hi" with lo <= hi.
std::optional<std::string> parseIntDomain(const std::string& text, std::int64_t& lo, std::int64_t& hi);

}  // namespace voila::driver
