#include "voila/driver.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "voila/candidate.hpp"
#include "voila/encoder.hpp"
#include "voila/parser.hpp"

namespace voila::driver {

namespace {

std::optional<std::int64_t> toInt(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

int codeOf(ivlcheck::Verdict v) {
  switch (v) {
    case ivlcheck::Verdict::Pass: return 0;
    case ivlcheck::Verdict::Fail: return 1;
    case ivlcheck::Verdict::Inconclusive: return 3;
  }
  return 1;
}

nlohmann::json toJson(const ivlcheck::MethodResult& r) {
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : r.failures)
    fs.push_back({{"line", f.line}, {"check", f.check}, {"reason", f.reason}, {"witness", f.witness}});
  nlohmann::json j{{"method", r.method}, {"line", r.line}, {"verdict", ivlcheck::verdictName(r.verdict)},
                   {"code", codeOf(r.verdict)}, {"failures", fs}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

bool readFile(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

std::optional<std::string> parseStateDomain(const std::string& text, AnalysisConfig& cfg) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) return "expected R=v1,v2,... in --state-domain " + text;
  std::string region = trim(text.substr(0, eq));
  std::vector<Value> values;
  std::stringstream ss(text.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "true" || item == "false") {
      values.push_back(Value::boolean(item == "true"));
    } else if (auto v = toInt(item)) {
      values.push_back(Value::integer(*v));
    } else {
      return "not a state value in --state-domain: '" + item + "'";
    }
  }
  if (values.empty()) return "empty state domain for " + region;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  cfg.stateDomains[region] = std::move(values);
  return std::nullopt;
}

std::optional<std::string> parseIntDomain(const std::string& text, std::int64_t& lo, std::int64_t& hi) {
  auto dots = text.find("..");
  if (dots == std::string::npos) return "expected lo..hi in --int-domain " + text;
  auto l = toInt(trim(text.substr(0, dots)));
  auto h = toInt(trim(text.substr(dots + 2)));
  if (!l || !h) return "not an integer range: " + text;
  if (*l > *h) return "empty integer range: " + text;
  lo = *l;
  hi = *h;
  return std::nullopt;
}

int run(const RunConfig& cfgIn, std::ostream& out, std::ostream& err) {
  RunConfig cfg = cfgIn;
  if (!cfg.check && !cfg.emit && !cfg.dumpCandidate) {
    err << "voila: nothing to do (no mode selected)\n";
    return kUsage;
  }
  if (cfg.inputs.empty()) {
    err << "voila: no input files\n";
    return kUsage;
  }
  cfg.analysis.intLo = cfg.domains.intLo;
  cfg.analysis.intHi = cfg.domains.intHi;

  // Multi-file input: declarations are concatenated; analysis reports duplicates.
  Diagnostics diags;
  Program merged;
  for (const auto& path : cfg.inputs) {
    std::string text;
    if (!readFile(path, text)) {
      err << "voila: cannot read " << path << "\n";
      return kUsage;
    }
    ParseResult pr = parseProgram(text, path);
    diags.append(pr.diags);
    for (auto& d : pr.program.decls) merged.decls.push_back(std::move(d));
  }
  std::string primary = cfg.inputs.size() == 1 ? cfg.inputs.front() : cfg.inputs.front() + "+";

  AnalysisResult ar;
  if (!diags.hasErrors()) {
    ar = analyze(std::move(merged), cfg.analysis);
    for (auto d : ar.diags.items()) {
      if (d.file.empty()) d.file = primary;
      diags.add(std::move(d));
    }
  }
  std::optional<ExpandResult> ex;
  if (!diags.hasErrors() && ar.program) {
    ex = expand(ar.program);
    for (auto d : ex->diags.items()) {
      if (d.file.empty()) d.file = primary;
      diags.add(std::move(d));
    }
  }
  diags.sortByPosition();

  nlohmann::json doc;
  nlohmann::json jd = nlohmann::json::array();
  for (const auto& d : diags.items()) jd.push_back(d.toJson());
  doc["diagnostics"] = jd;
  if (!cfg.json)
    for (const auto& d : diags.items()) out << d.toText() << "\n";

  int status = diags.hasErrors() ? kFail : kPass;
  if (!ex || diags.hasErrors()) {
    doc["exit"] = status;
    if (cfg.json) out << doc.dump(2) << "\n";
    return status;
  }

  if (cfg.dumpCandidate) {
    std::string dump = dumpCandidate(ex->candidate);
    if (cfg.json)
      doc["candidate"] = dump;
    else
      out << dump;
  }

  ivl::Program ivlProgram = encode(ex->candidate);
  if (cfg.emit) {
    std::string text = ivl::print(ivlProgram);
    if (cfg.outDir.empty()) {
      if (cfg.json)
        doc["ivl"] = text;
      else
        out << text;
    } else {
      std::error_code ec;
      std::filesystem::create_directories(cfg.outDir, ec);
      auto target = std::filesystem::path(cfg.outDir) / std::filesystem::path(cfg.inputs.front()).stem();
      target += ".vpr";
      std::ofstream o(target, std::ios::binary);
      if (!o || !(o << text)) {
        err << "voila: cannot write " << target.string() << "\n";
        return kUsage;
      }
      doc["emitted"] = target.string();
      if (!cfg.json) out << "wrote " << target.string() << "\n";
    }
  }

  if (cfg.check) {
    for (const auto& [name, info] : ar.program->regions) cfg.domains.regionDomains[name] = info.domain;
    auto results = ivlcheck::verifyProgram(ivlProgram, cfg.domains, std::max(1u, cfg.jobs));
    std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
    nlohmann::json jm = nlohmann::json::array();
    bool inconclusive = false;
    for (const auto& r : results) {
      jm.push_back(toJson(r));
      if (r.verdict != ivlcheck::Verdict::Pass) status = kFail;
      inconclusive = inconclusive || r.verdict == ivlcheck::Verdict::Inconclusive;
      if (cfg.json) continue;
      out << primary << ":" << r.line << ": " << r.method << ": " << ivlcheck::verdictName(r.verdict);
      for (const auto& pc : ex->candidate.procedures)
        if (pc.proc && pc.proc->name == r.method)
          out << " (" << pc.inferredSteps << " inferred, " << pc.annotatedSteps << " annotated steps)";
      if (!r.note.empty()) out << " [" << r.note << "]";
      out << "\n";
      for (const auto& f : r.failures) {
        out << primary << ":" << f.line << ": error: " << f.check;
        if (!f.reason.empty()) out << ": " << f.reason;
        out << "\n  in state " << f.witness << "\n";
      }
    }
    doc["methods"] = jm;
    if (inconclusive) doc["code"] = "inconclusive";
  }
  doc["exit"] = status;
  if (cfg.json) out << doc.dump(2) << "\n";
  return status;
}

}  // namespace voila::driver
