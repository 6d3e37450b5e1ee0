#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "iss/spec_io.hpp"

namespace iss::app {

enum class Format { Human, Records };

struct Options {
  Format format = Format::Human;
  std::uint64_t seed = 0;
  std::optional<std::string> norm;
  std::size_t bound = 4;
  bool color = false;
};

struct Output {
  int exit_code = 0;  // 0 ok, 1 domain failure, 2 usage
  std::string out;
  std::string err;
  std::optional<std::string> document;
};

/// A parsed and lowered input file.
struct Session {
  std::string file;
  std::string text;
  LowerResult lowered;

  static Session from_text(std::string text, std::string file);
  bool ok() const { return lowered.value.has_value(); }
};

struct SimulateArgs {
  std::optional<std::string> strategy_text;
  std::string strategy_name = "<strategy>";
  std::optional<std::size_t> enumerate;
  std::optional<std::size_t> sample;
};

struct EnforceArgs {
  std::string mode;
  bool allow_deadlock = false;
  std::optional<std::int64_t> sv;
  std::optional<std::int64_t> cv;
  std::optional<std::int64_t> window;
  std::optional<std::string> money;
  std::optional<std::string> repair_action;
  std::optional<std::string> attribution;
};

struct VerifyArgs {
  std::string query;
  std::optional<std::string> from;
  bool witness = false;
  bool probe = false;
  std::optional<std::string> sweep_resource;
  std::int64_t sweep_max = 8;
};

Output validate(const Session& s, const Options& o);
Output simulate(const Session& s, const Options& o, const SimulateArgs& a);
Output enforce(const Session& s, const Options& o, const EnforceArgs& a);
Output verify(const Session& s, const Options& o, const VerifyArgs& a);
Output audit(const Session& s, const Options& o, const EnforceArgs& policy);

}  // namespace iss::app
