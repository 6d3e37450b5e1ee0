#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "iss/iss.h"

namespace {

struct Common {
  std::string input;
  std::string format = "human";
  std::uint64_t seed = 0;
  std::string norm;
  std::size_t bound = 4;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("input", c.input, "model file (.iss)")->required();
  cmd->add_option("--format", c.format, "human or records")->check(CLI::IsMember({"human", "records"}));
  cmd->add_option("--seed", c.seed, "seed for sampled output");
  cmd->add_option("--norm", c.norm, "restrict to one norm");
  cmd->add_option("--bound", c.bound, "lasso length bound for audits")->check(CLI::Range(1, 12));
}

iss_options to_options(const Common& c) {
  iss_options o;
  iss_options_init(&o);
  o.format = c.format == "records" ? ISS_FORMAT_RECORDS : ISS_FORMAT_HUMAN;
  o.seed = c.seed;
  o.norm = c.norm.empty() ? nullptr : c.norm.c_str();
  o.bound = c.bound;
  const char* env = std::getenv("ISS_COLOR");
  o.color = c.format == "human" && isatty(STDOUT_FILENO) && !(env && std::string(env) == "0");
  return o;
}

struct EnforceFlags {
  std::string mode;
  bool allow_deadlock = false;
  std::int64_t sv = -1, cv = -1, window = -1;
  std::string money, repair_action, attribution, output;
};

void add_policy_flags(CLI::App* cmd, EnforceFlags& e) {
  cmd->add_option("--sv", e.sv, "sanction value");
  cmd->add_option("--cv", e.cv, "compensation value");
  cmd->add_option("--window", e.window, "repair window");
  cmd->add_option("--money", e.money, "money resource");
  cmd->add_option("--repair-action", e.repair_action, "action that repairs a violation");
  cmd->add_option("--attribution", e.attribution, "triggering or collective")
      ->check(CLI::IsMember({"triggering", "collective"}));
  cmd->add_flag("--allow-deadlock", e.allow_deadlock, "keep states left without actions by regimentation");
}

iss_enforce_args to_args(const EnforceFlags& e) {
  iss_enforce_args a;
  iss_enforce_args_init(&a);
  a.mode = e.mode.c_str();
  a.allow_deadlock = e.allow_deadlock;
  a.sv = e.sv;
  a.cv = e.cv;
  a.window = e.window;
  a.money = e.money.empty() ? nullptr : e.money.c_str();
  a.repair_action = e.repair_action.empty() ? nullptr : e.repair_action.c_str();
  a.attribution = e.attribution.empty() ? nullptr : e.attribution.c_str();
  return a;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return !in.bad();
}

/// Prints a result and returns the exit code.
int emit(iss_status status, iss_result* r, const std::string& output_path = "", bool document_to_stdout = false) {
  if (!r) {
    std::cerr << "error: " << iss_last_error() << "\n";
    return status == ISS_E_INVALID_ARGUMENT ? 2 : 1;
  }
  int code = iss_result_exit_code(r);
  const char* doc = iss_result_document(r);
  if (doc && !output_path.empty()) {
    std::ofstream out(output_path, std::ios::binary);
    out << doc;
    if (!out) {
      std::cerr << "error: cannot write " << output_path << "\n";
      code = 2;
    }
  } else if (doc && document_to_stdout) {
    std::cout << doc;
  }
  std::cout << iss_result_output(r);
  std::cerr << iss_result_errors(r);
  iss_result_free(r);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model, enforce and verify norms in industrial symbiosis systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", iss_version());

  Common common;
  EnforceFlags enf;
  std::string strategy;
  std::size_t enumerate = 0, sample = 0;
  std::string query, from, sweep;
  std::int64_t sweep_max = 8;
  bool witness = false, probe = false;

  auto* validate = app.add_subcommand("validate", "parse, lower and validate a model file");
  add_common(validate, common);

  auto* simulate = app.add_subcommand("simulate", "run a strategy or enumerate lassos and classify them");
  add_common(simulate, common);
  auto* strat_opt = simulate->add_option("--strategy", strategy, "strategy file");
  auto* enum_opt = simulate->add_option("--enumerate", enumerate, "enumerate every lasso up to this length")
                       ->check(CLI::Range(1, 12));
  strat_opt->excludes(enum_opt);
  simulate->add_option("--sample", sample, "show a seeded sample of this many lassos");

  auto* enforce = app.add_subcommand("enforce", "regiment, sanction or repair a norm");
  add_common(enforce, common);
  enforce->add_option("--mode", enf.mode, "regiment, sanction or repair")
      ->required()
      ->check(CLI::IsMember({"regiment", "sanction", "repair"}));
  enforce->add_option("-o,--output", enf.output, "write the transformed document here");
  add_policy_flags(enforce, enf);

  auto* verify = app.add_subcommand("verify", "check a coalition query");
  add_common(verify, common);
  verify->add_option("query", query, "e.g. '<<A, B budget=[2,0]>> F {q1}'")->required();
  verify->add_option("--from", from, "start state");
  verify->add_flag("--witness", witness, "print the witness strategy");
  verify->add_flag("--probe", probe, "print explored configurations against the complexity bound");
  verify->add_option("--sweep", sweep, "vary this resource's budget from 0 to --sweep-max");
  verify->add_option("--sweep-max", sweep_max, "largest budget of the sweep")->check(CLI::Range(0, 64));

  auto* audit = app.add_subcommand("audit", "detect violations and audit all three enforcement modes");
  add_common(audit, common);
  add_policy_flags(audit, enf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  iss_session* session = nullptr;
  const iss_status opened = iss_session_open_file(common.input.c_str(), &session);
  if (opened == ISS_E_IO || !session) {
    std::cerr << "error: " << iss_last_error() << "\n";
    return 2;
  }
  const iss_options opts = to_options(common);
  iss_result* r = nullptr;
  int code = 0;

  if (validate->parsed()) {
    const iss_status st = iss_validate(session, &opts, &r);
    code = emit(st, r);
  } else if (simulate->parsed()) {
    iss_simulate_args a;
    iss_simulate_args_init(&a);
    std::string text;
    if (!strategy.empty()) {
      if (!read_file(strategy, text)) {
        std::cerr << "error: cannot read " << strategy << "\n";
        iss_session_free(session);
        return 2;
      }
      a.strategy_text = text.c_str();
      a.strategy_name = strategy.c_str();
    }
    a.enumerate = enumerate;
    a.sample = sample;
    const iss_status st = iss_simulate(session, &opts, &a, &r);
    code = emit(st, r);
  } else if (enforce->parsed()) {
    const iss_enforce_args a = to_args(enf);
    const iss_status st = iss_enforce(session, &opts, &a, &r);
    code = emit(st, r, enf.output, opts.format == ISS_FORMAT_HUMAN);
  } else if (verify->parsed()) {
    iss_verify_args a;
    iss_verify_args_init(&a);
    a.query = query.c_str();
    a.from = from.empty() ? nullptr : from.c_str();
    a.witness = witness;
    a.probe = probe;
    a.sweep_resource = sweep.empty() ? nullptr : sweep.c_str();
    a.sweep_max = sweep_max;
    const iss_status st = iss_verify(session, &opts, &a, &r);
    code = emit(st, r);
  } else if (audit->parsed()) {
    const iss_enforce_args a = to_args(enf);
    const iss_status st = iss_audit(session, &opts, &a, &r);
    code = emit(st, r);
  }
  iss_session_free(session);
  return code;
}
