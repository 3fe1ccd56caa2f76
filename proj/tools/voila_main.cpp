#include <CLI11.hpp>
#include <iostream>

#include "voila/driver.hpp"

using namespace voila;

int main(int argc, char** argv) {
  CLI::App app{"voila: proof outline checker for fine-grained concurrent programs"};
  app.require_subcommand(1);
  driver::RunConfig cfg;
  std::vector<std::string> stateDomains;
  std::string intDomain;

  auto common = [&](CLI::App* c) {
    c->add_option("inputs", cfg.inputs, "input .vl files")->required()->check(CLI::ExistingFile);
    c->add_option("--state-domain", stateDomains, "state domain of a region, R=v1,v2,...");
    c->add_option("--int-domain", intDomain, "integer domain lo..hi");
    c->add_option("--budget", cfg.domains.budget, "live atom budget of the micro-verifier");
    c->add_flag("--dump-candidate", cfg.dumpCandidate, "print the proof candidate");
    c->add_flag("--json", cfg.json, "machine readable output");
    c->add_option("-o,--output", cfg.outDir, "directory receiving the emitted .vpr file");
  };
  CLI::App* check = app.add_subcommand("check", "verify every procedure");
  common(check);
  check->add_flag("--emit", cfg.emit, "also emit the IVL text");
  check->add_option("--jobs,-j", cfg.jobs, "procedures verified concurrently")->check(CLI::PositiveNumber);
  CLI::App* emit = app.add_subcommand("emit", "write the IVL encoding without verifying");
  common(emit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : driver::kUsage;
  }
  cfg.check = check->parsed();
  if (emit->parsed()) cfg.emit = true;

  for (const auto& s : stateDomains)
    if (auto e = driver::parseStateDomain(s, cfg.analysis)) {
      std::cerr << "voila: " << *e << "\n";
      return driver::kUsage;
    }
  if (!intDomain.empty())
    if (auto e = driver::parseIntDomain(intDomain, cfg.domains.intLo, cfg.domains.intHi)) {
      std::cerr << "voila: " << *e << "\n";
      return driver::kUsage;
    }
  try {
    return driver::run(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "voila: internal error: " << e.what() << "\n";
    return driver::kUsage;
  }
}
