// SLD resolution engine with four-port tracing and clause attribution.
// One Engine run executes one query to its first solution; all limits are
// enforced per run. Immutable programs can be shared across concurrent runs.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prodbg/program.hpp"
#include "prodbg/term.hpp"

namespace prodbg {

struct ExecLimits {
  long long max_steps = 100000;
  int max_depth = 5000;
  long long wall_clock_ms = 2000;
};

enum class Port { Call, Exit, Redo, Fail };
const char* port_name(Port p);

struct TraceEvent {
  long long seq = 0;
  Port port = Port::Call;
  TermPtr goal;                  // snapshot with bindings applied
  std::optional<int> clause_id;  // call/redo on user clauses only
  int depth = 0;
};

enum class SolveStatus { Success, Failure, ResourceLimit, RuntimeError };
const char* status_name(SolveStatus s);

struct QueryOutcome {
  SolveStatus status = SolveStatus::Failure;
  // Named query variables with their solution values; present on success.
  std::optional<std::map<std::string, TermPtr>> first_solution;
  std::vector<TraceEvent> trace;
  long long steps_used = 0;
  std::string error;  // detail for runtime_error / resource_limit
};

struct EngineOptions {
  ExecLimits limits;
  bool trace = false;
  bool unknown_as_fail = false;  // unknown predicates fail instead of erroring
};

QueryOutcome solve(const Program& p, const std::vector<TermPtr>& goals,
                   const EngineOptions& opts = {});

// Substitution map for the functional unification interface.
struct Bindings {
  std::map<std::string, TermPtr> map;
  long long generation = 0;
};

std::optional<Bindings> unify_terms(const TermPtr& a, const TermPtr& b,
                                    const Bindings& base);

TermPtr substitute(const TermPtr& t, const Bindings& b);

class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Integer arithmetic over + - * / mod // and unary minus. `/` requires exact
// division. Throws EvalError on unbound variables, bad functors, division by
// zero, inexact division, or overflow.
long long eval_arith(const TermPtr& t, const Bindings& b);

// One event per line: SEQ<TAB>PORT<TAB>DEPTH<TAB>GOAL<TAB>CLAUSE, where
// CLAUSE is #k (clause position within its predicate) or -.
std::string dump_trace(const std::vector<TraceEvent>& trace, const Program& p);

}  // namespace prodbg
