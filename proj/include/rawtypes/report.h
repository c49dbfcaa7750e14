#pragma once

#include <string>

#include "json.hpp"
#include "rawtypes/checker.h"
#include "rawtypes/harness.h"
#include "rawtypes/interpreter.h"

namespace rawtypes {

// Stable machine-readable forms. Field names are part of the CLI contract.

nlohmann::json to_json(const Diagnostic& d);
nlohmann::json to_json(const std::vector<Diagnostic>& ds);
// {"C.m": [ {"x": "Init", ...} | null, ... ], ...}
nlohmann::json to_json(const TypeTables& tables);
nlohmann::json to_json(const RunOutcome& o);
nlohmann::json to_json(const FuzzSummary& s);

const char* to_string(Verdict v);  // "well-typed" | "ill-typed"

}  // namespace rawtypes
