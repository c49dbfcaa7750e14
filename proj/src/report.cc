#include "rawtypes/report.h"

namespace rawtypes {

using nlohmann::json;

const char* to_string(Verdict v) {
  return v == Verdict::kWellTyped ? "well-typed" : "ill-typed";
}

json to_json(const Diagnostic& d) {
  json j = {
      {"severity", d.is_error() ? "error" : "warning"},
      {"code", d.code},
      {"message", d.message},
      {"file", d.location.file},
      {"line", d.location.line},
      {"column", d.location.column},
  };
  if (d.cls) j["class"] = d.cls->name();
  if (d.method) j["method"] = d.method->name();
  if (d.pc) j["pc"] = *d.pc;
  return j;
}

json to_json(const std::vector<Diagnostic>& ds) {
  json out = json::array();
  for (const Diagnostic& d : ds) out.push_back(to_json(d));
  return out;
}

json to_json(const TypeTables& tables) {
  json out = json::object();
  for (const auto& [key, table] : tables) {
    json states = json::array();
    for (const auto& st : table.states) {
      if (!st) {
        states.push_back(nullptr);
        continue;
      }
      json vars = json::object();
      for (const auto& [x, t] : *st) vars[x.name()] = to_string(t);
      states.push_back(std::move(vars));
    }
    out[key.first.name() + "." + key.second.name()] = std::move(states);
  }
  return out;
}

json to_json(const RunOutcome& o) {
  json j = {{"kind", to_string(o.kind)},
            {"paths", o.paths},
            {"steps", o.steps},
            {"max_depth", o.max_depth},
            {"truncated", o.truncated},
            {"branches", format_branches(o.branches)}};
  switch (o.kind) {
    case RunOutcome::Kind::kFinal:
      j["value"] = to_string(o.value);
      break;
    case RunOutcome::Kind::kFinalExceptional:
      j["exception"] = o.exc.name();
      break;
    case RunOutcome::Kind::kStuck:
      j["reason"] = to_string(o.stuck->reason);
      j["detail"] = o.stuck->detail;
      j["method"] = to_string(o.stuck->method);
      j["pc"] = o.stuck->pc;
      j["file"] = o.stuck->location.file;
      j["line"] = o.stuck->location.line;
      j["column"] = o.stuck->location.column;
      break;
    case RunOutcome::Kind::kFuelExhausted:
      if (o.state) {
        j["method"] = to_string(o.state->method);
        j["pc"] = o.state->pc;
      }
      break;
  }
  return j;
}

json to_json(const FuzzSummary& s) {
  json cex = json::array();
  for (const FuzzFinding& f : s.counterexamples) {
    cex.push_back({{"digest", f.digest},
                   {"origin", f.origin},
                   {"kind", f.kind},
                   {"message", f.message},
                   {"path", f.path}});
  }
  return {{"programs", s.programs},
          {"accepted", s.accepted},
          {"rejected", s.rejected},
          {"mutants", s.mutants},
          {"mutants_accepted", s.mutants_accepted},
          {"mutants_rejected", s.mutants_rejected},
          {"mutants_unchanged", s.mutants_unchanged},
          {"paths", s.paths},
          {"steps", s.steps},
          {"truncated", s.truncated},
          {"counterexamples", std::move(cex)}};
}

}  // namespace rawtypes
