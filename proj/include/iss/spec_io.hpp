#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iss/behavior.hpp"
#include "iss/coordination.hpp"
#include "iss/document.hpp"
#include "iss/model.hpp"
#include "iss/norms.hpp"
#include "iss/verify.hpp"

namespace iss {

struct ParseResult {
  std::optional<Document> document;
  std::vector<Diagnostic> diagnostics;
};

/// Accepts LF or CRLF line ends. Recovers at the next `;` or `}` after an
/// error so that one pass reports as many problems as possible.
ParseResult parse_document(const std::string& text, const std::string& file = "<input>");

/// Canonical text: fixed section order, one statement per line, LF.
std::string serialize(const Document& d);

struct Lowered {
  Model model;
  std::vector<NormMonitor> norms;
  std::optional<SanctionPolicy> sanction;
  std::optional<ReparationPolicy> repair;

  const NormMonitor* find_norm(const std::string& name) const;
};

struct LowerResult {
  std::optional<Lowered> value;
  std::vector<Diagnostic> diagnostics;  // errors, or warnings alongside a value
};

/// Resolves names, builds and validates the model, compiles norms (checking
/// totality against the model) and checks policies.
LowerResult lower(const Document& d);

/// Parse and lower in one go.
LowerResult load(const std::string& text, const std::string& file = "<input>");

/// The document that lowers back to the given values. Spans are empty.
Document document_from(const Model& m, const std::vector<NormMonitor>& norms,
                       const std::optional<SanctionPolicy>& sanction = std::nullopt,
                       const std::optional<ReparationPolicy>& repair = std::nullopt);

struct StrategyParse {
  std::optional<StrategyDoc> document;
  std::vector<Diagnostic> diagnostics;
};
StrategyParse parse_strategy(const std::string& text, const std::string& file = "<strategy>");

struct LoweredStrategy {
  StrategyProfile profile;
  std::vector<StateId> starts;  // initial states of the model when the file names none
};
struct StrategyLowerResult {
  std::optional<LoweredStrategy> value;
  std::vector<Diagnostic> diagnostics;
};
StrategyLowerResult lower_strategy(const Model& m, const StrategyDoc& s);

struct QueryParse {
  std::optional<QueryDoc> query;
  std::vector<Diagnostic> diagnostics;
};
QueryParse parse_query(const std::string& text);

struct QueryLowerResult {
  std::optional<CoalitionQuery> query;
  std::vector<Diagnostic> diagnostics;
};
/// An omitted budget is the zero vector.
QueryLowerResult lower_query(const Model& m, const QueryDoc& q);

}  // namespace iss
