#pragma once

#include <string>
#include <variant>
#include <vector>

#include "psys/system.hpp"

namespace psys::dsl {

struct SourceDocument {
  std::string text;
  std::string origin = "<memory>";
};

enum class Severity { error, warning };

struct ParseDiagnostic {
  Severity severity = Severity::error;
  std::string message;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
};

/// "origin:line:column: error: message"
std::string format_diagnostic(const ParseDiagnostic& d, const std::string& origin);

using ParseResult = std::variant<PSystemDef, std::vector<ParseDiagnostic>>;

/// Parses the `.psys` format (grammar in docs/psys-format.md). On success the
/// definition has passed PSystemDef::validate().
ParseResult parse(const SourceDocument& doc);

/// Throws DefinitionError carrying the formatted diagnostics.
PSystemDef parse_or_throw(const SourceDocument& doc);

/// Canonical text: sorted alphabet, sorted children, sorted contents and
/// priority pairs; rules in declaration order.
std::string serialize(const PSystemDef& def);

}  // namespace psys::dsl
