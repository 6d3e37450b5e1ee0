#include "iss/iss.h"

#include <fstream>
#include <new>
#include <sstream>

#include "app.hpp"

struct iss_session {
  iss::app::Session session;
  std::string diagnostics;
};

struct iss_result {
  iss::app::Output output;
};

namespace {

thread_local std::string last_error;

iss_status set_error(iss_status s, std::string message) {
  last_error = std::move(message);
  return s;
}

iss_status open(std::string text, std::string name, iss_session** out) {
  auto* s = new (std::nothrow) iss_session;
  if (!s) return set_error(ISS_E_INTERNAL, "out of memory");
  s->session = iss::app::Session::from_text(std::move(text), std::move(name));
  for (const auto& d : s->session.lowered.diagnostics) s->diagnostics += iss::format_diagnostic(d, s->session.text);
  *out = s;
  if (!s->session.ok()) return set_error(ISS_E_DOMAIN, "the document has errors");
  last_error.clear();
  return ISS_OK;
}

iss::app::Options options(const iss_options* o) {
  iss::app::Options out;
  if (!o) return out;
  out.format = o->format == ISS_FORMAT_RECORDS ? iss::app::Format::Records : iss::app::Format::Human;
  out.seed = o->seed;
  if (o->norm) out.norm = o->norm;
  out.bound = o->bound;
  out.color = o->color != 0;
  return out;
}

iss::app::EnforceArgs enforce_args(const iss_enforce_args* a) {
  iss::app::EnforceArgs out;
  if (!a) return out;
  if (a->mode) out.mode = a->mode;
  out.allow_deadlock = a->allow_deadlock != 0;
  if (a->sv >= 0) out.sv = a->sv;
  if (a->cv >= 0) out.cv = a->cv;
  if (a->window >= 0) out.window = a->window;
  if (a->money) out.money = a->money;
  if (a->repair_action) out.repair_action = a->repair_action;
  if (a->attribution) out.attribution = a->attribution;
  return out;
}

template <class F>
iss_status run(const iss_session* s, iss_result** out, F&& f) {
  if (!s || !out) return set_error(ISS_E_INVALID_ARGUMENT, "null argument");
  try {
    auto* r = new iss_result{f()};
    *out = r;
    if (r->output.exit_code == 2) return set_error(ISS_E_INVALID_ARGUMENT, r->output.err);
    if (r->output.exit_code != 0) return set_error(ISS_E_DOMAIN, r->output.err);
    last_error.clear();
    return ISS_OK;
  } catch (const std::exception& e) {
    return set_error(ISS_E_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* iss_version(void) { return "0.1.0"; }

const char* iss_status_string(iss_status s) {
  switch (s) {
    case ISS_OK: return "ok";
    case ISS_E_DOMAIN: return "domain error";
    case ISS_E_IO: return "i/o error";
    case ISS_E_INVALID_ARGUMENT: return "invalid argument";
    case ISS_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* iss_last_error(void) { return last_error.c_str(); }

void iss_options_init(iss_options* o) {
  if (!o) return;
  *o = iss_options{ISS_FORMAT_HUMAN, 0, nullptr, 4, 0};
}

void iss_simulate_args_init(iss_simulate_args* a) {
  if (!a) return;
  *a = iss_simulate_args{nullptr, "<strategy>", 0, 0};
}

void iss_enforce_args_init(iss_enforce_args* a) {
  if (!a) return;
  *a = iss_enforce_args{"regiment", 0, -1, -1, -1, nullptr, nullptr, nullptr};
}

void iss_verify_args_init(iss_verify_args* a) {
  if (!a) return;
  *a = iss_verify_args{nullptr, nullptr, 0, 0, nullptr, 8};
}

iss_status iss_session_open_file(const char* path, iss_session** out) {
  if (!path || !out) return set_error(ISS_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) return set_error(ISS_E_IO, std::string("cannot read ") + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return set_error(ISS_E_IO, std::string("cannot read ") + path);
  try {
    return open(buf.str(), path, out);
  } catch (const std::exception& e) {
    return set_error(ISS_E_INTERNAL, e.what());
  }
}

iss_status iss_session_open_text(const char* text, size_t length, const char* name, iss_session** out) {
  if (!text || !out) return set_error(ISS_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    return open(std::string(text, length), name ? name : "<input>", out);
  } catch (const std::exception& e) {
    return set_error(ISS_E_INTERNAL, e.what());
  }
}

void iss_session_free(iss_session* s) { delete s; }

int iss_session_ok(const iss_session* s) { return s && s->session.ok() ? 1 : 0; }

const char* iss_session_diagnostics(const iss_session* s) { return s ? s->diagnostics.c_str() : ""; }

size_t iss_session_count(const iss_session* s, iss_entity kind) {
  if (!s || !s->session.ok()) return 0;
  const auto& l = *s->session.lowered.value;
  switch (kind) {
    case ISS_AGENTS: return l.model.agent_count();
    case ISS_RESOURCES: return l.model.resource_count();
    case ISS_STATES: return l.model.state_count();
    case ISS_ACTIONS: return l.model.action_count();
    case ISS_NORMS: return l.norms.size();
  }
  return 0;
}

const char* iss_session_name(const iss_session* s, iss_entity kind, size_t index) {
  if (index >= iss_session_count(s, kind)) return nullptr;
  const auto& l = *s->session.lowered.value;
  switch (kind) {
    case ISS_AGENTS: return l.model.agent_names()[index].c_str();
    case ISS_RESOURCES: return l.model.resource_names()[index].c_str();
    case ISS_STATES: return l.model.state_names()[index].c_str();
    case ISS_ACTIONS: return l.model.action_names()[index].c_str();
    case ISS_NORMS: return l.norms[index].name().c_str();
  }
  return nullptr;
}

iss_status iss_validate(const iss_session* s, const iss_options* o, iss_result** out) {
  return run(s, out, [&] { return iss::app::validate(s->session, options(o)); });
}

iss_status iss_simulate(const iss_session* s, const iss_options* o, const iss_simulate_args* a, iss_result** out) {
  if (!a) return set_error(ISS_E_INVALID_ARGUMENT, "null argument");
  return run(s, out, [&] {
    iss::app::SimulateArgs args;
    if (a->strategy_text) args.strategy_text = a->strategy_text;
    if (a->strategy_name) args.strategy_name = a->strategy_name;
    if (a->enumerate) args.enumerate = a->enumerate;
    if (a->sample) args.sample = a->sample;
    return iss::app::simulate(s->session, options(o), args);
  });
}

iss_status iss_enforce(const iss_session* s, const iss_options* o, const iss_enforce_args* a, iss_result** out) {
  if (!a) return set_error(ISS_E_INVALID_ARGUMENT, "null argument");
  return run(s, out, [&] { return iss::app::enforce(s->session, options(o), enforce_args(a)); });
}

iss_status iss_verify(const iss_session* s, const iss_options* o, const iss_verify_args* a, iss_result** out) {
  if (!a || !a->query) return set_error(ISS_E_INVALID_ARGUMENT, "null argument");
  return run(s, out, [&] {
    iss::app::VerifyArgs args;
    args.query = a->query;
    if (a->from) args.from = a->from;
    args.witness = a->witness != 0;
    args.probe = a->probe != 0;
    if (a->sweep_resource) args.sweep_resource = a->sweep_resource;
    args.sweep_max = a->sweep_max;
    return iss::app::verify(s->session, options(o), args);
  });
}

iss_status iss_audit(const iss_session* s, const iss_options* o, const iss_enforce_args* a, iss_result** out) {
  return run(s, out, [&] { return iss::app::audit(s->session, options(o), enforce_args(a)); });
}

int iss_result_exit_code(const iss_result* r) { return r ? r->output.exit_code : 2; }
const char* iss_result_output(const iss_result* r) { return r ? r->output.out.c_str() : ""; }
const char* iss_result_errors(const iss_result* r) { return r ? r->output.err.c_str() : ""; }
const char* iss_result_document(const iss_result* r) {
  return r && r->output.document ? r->output.document->c_str() : nullptr;
}
void iss_result_free(iss_result* r) { delete r; }

iss_status iss_check(const iss_session* s, const char* query, int* holds, uint64_t* configs_explored) {
  if (!s || !query || !holds) return set_error(ISS_E_INVALID_ARGUMENT, "null argument");
  if (!s->session.ok()) return set_error(ISS_E_DOMAIN, "the document has errors");
  try {
    const auto& m = s->session.lowered.value->model;
    auto parsed = iss::parse_query(query);
    if (!parsed.query) return set_error(ISS_E_DOMAIN, parsed.diagnostics.front().message);
    auto lowered = iss::lower_query(m, *parsed.query);
    if (!lowered.query) return set_error(ISS_E_DOMAIN, lowered.diagnostics.front().message);
    auto r = iss::check(m, *lowered.query);
    *holds = r.holds ? 1 : 0;
    if (configs_explored) *configs_explored = r.configs_explored;
    last_error.clear();
    return ISS_OK;
  } catch (const iss::Error& e) {
    return set_error(ISS_E_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return set_error(ISS_E_INTERNAL, e.what());
  }
}

}  // extern "C"
