#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dalign/conditions.hpp"
#include "dalign/core.hpp"
#include "dalign/declare.hpp"

namespace dalign {

// ---------------------------------------------------------------------------
// SMT-LIB encoding
//
// Every event contributes one integer timestamp variable and one data
// variable per declared process variable. Strings are interned integers, so
// the whole encoding stays in quantifier-free linear integer/real arithmetic.

inline std::string smt_sort_name(Sort s) {
  switch (base_sort(s)) {
    case Sort::Bool: return "Bool";
    case Sort::Rat: return "Real";
    default: return "Int";  // Int, Timestamp, String (interned)
  }
}

inline std::string sym_time(EventId id) { return "ts_" + id.str(); }

inline std::string sym_data(const std::string& var, EventId id) {
  if (var == kTimestampVar) return sym_time(id);
  return "d_" + var + "_" + id.str();
}

inline std::string smt_int_literal(const BigInt& v) {
  if (v < 0) return "(- " + BigInt(-v).str() + ")";
  return v.str();
}

inline std::string smt_rat_literal(const BigRat& v) {
  BigInt num = numerator(v), den = denominator(v);
  bool neg = num < 0;
  if (neg) num = -num;
  std::string body =
      den == 1 ? num.str() + ".0" : "(/ " + num.str() + ".0 " + den.str() + ".0)";
  return neg ? "(- " + body + ")" : body;
}

inline std::string encode_cond(const CondPtr& c);

inline std::string encode_var(const VarRef& v) {
  if (v.role != VarRole::Event)
    throw SolverError("cannot encode unbound role variable: " + v.key());
  return sym_data(v.var, v.event);
}

inline std::string encode_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return encode_var(t->var);
    case Term::Kind::IntConst: return smt_int_literal(t->int_val);
    case Term::Kind::RatConst: return smt_rat_literal(t->rat_val);
    case Term::Kind::Add:
      return "(+ " + encode_term(t->lhs) + " " + encode_term(t->rhs) + ")";
    case Term::Kind::Neg: return "(- " + encode_term(t->lhs) + ")";
    case Term::Kind::Mul: {
      std::string coeff = t->sort == Sort::Rat ? smt_rat_literal(t->coeff)
                                               : smt_int_literal(numerator(t->coeff));
      return "(* " + coeff + " " + encode_term(t->lhs) + ")";
    }
    case Term::Kind::Mod:
      return "(mod " + encode_term(t->lhs) + " " + smt_int_literal(t->modulus) + ")";
    case Term::Kind::Ite:
      return "(ite " + encode_cond(t->cond) + " " + encode_term(t->lhs) + " " +
             encode_term(t->rhs) + ")";
  }
  throw SolverError("unreachable term kind");
}

inline std::string encode_cond(const CondPtr& c) {
  switch (c->kind) {
    case Cond::Kind::BoolConst: return c->bval ? "true" : "false";
    case Cond::Kind::BoolVar: return encode_var(c->var);
    case Cond::Kind::Cmp: {
      std::string l = encode_term(c->lhs), r = encode_term(c->rhs);
      switch (c->op) {
        case CmpOp::Ge: return "(>= " + l + " " + r + ")";
        case CmpOp::Gt: return "(> " + l + " " + r + ")";
        case CmpOp::Le: return "(<= " + l + " " + r + ")";
        case CmpOp::Lt: return "(< " + l + " " + r + ")";
        case CmpOp::Eq: return "(= " + l + " " + r + ")";
        case CmpOp::Ne: return "(not (= " + l + " " + r + "))";
      }
      break;
    }
    case Cond::Kind::StrEq: {
      auto side = [](const Cond::StrAtom& s) {
        if (s.is_var) return encode_var(s.var);
        return smt_int_literal(BigInt(s.code));
      };
      std::string eq = "(= " + side(c->sl) + " " + side(c->sr) + ")";
      return c->op == CmpOp::Eq ? eq : "(not " + eq + ")";
    }
    case Cond::Kind::Not: return "(not " + encode_cond(c->a) + ")";
    case Cond::Kind::And:
      return "(and " + encode_cond(c->a) + " " + encode_cond(c->b) + ")";
    case Cond::Kind::Or:
      return "(or " + encode_cond(c->a) + " " + encode_cond(c->b) + ")";
    case Cond::Kind::Ite:
      return "(ite " + encode_cond(c->a) + " " + encode_cond(c->b) + " " +
             encode_cond(c->c) + ")";
  }
  throw SolverError("unreachable condition kind");
}

// Ordering conditions are encoded against the full event set of the state:
// the quantified translations of directly-before, first/last and alternation
// range over exactly the events present.
inline std::string encode_ordering(const OrdPtr& o, const std::vector<Event>& events) {
  switch (o->kind) {
    case Ord::Kind::True: return "true";
    case Ord::Kind::Before:
      return "(< " + sym_time(o->a) + " " + sym_time(o->b) + ")";
    case Ord::Kind::DirectlyBefore: {
      std::string out = "(and (< " + sym_time(o->a) + " " + sym_time(o->b) + ")";
      for (auto& e : events) {
        if (e.id == o->a || e.id == o->b) continue;
        out += " (or (> " + sym_time(e.id) + " " + sym_time(o->b) + ") (< " +
               sym_time(e.id) + " " + sym_time(o->a) + "))";
      }
      return out + ")";
    }
    case Ord::Kind::First: {
      std::string out;
      int n = 0;
      for (auto& e : events) {
        if (e.id == o->a) continue;
        out += " (< " + sym_time(o->a) + " " + sym_time(e.id) + ")";
        ++n;
      }
      if (n == 0) return "true";
      return "(and" + out + ")";
    }
    case Ord::Kind::Last: {
      std::string out;
      int n = 0;
      for (auto& e : events) {
        if (e.id == o->a) continue;
        out += " (> " + sym_time(o->a) + " " + sym_time(e.id) + ")";
        ++n;
      }
      if (n == 0) return "true";
      return "(and" + out + ")";
    }
    case Ord::Kind::AltBefore: {
      std::string out = "(and (< " + sym_time(o->a) + " " + sym_time(o->b) + ")";
      for (auto& e : events) {
        if (e.id == o->a || e.id == o->b || e.activity != o->activity) continue;
        CondPtr g = bind_guard(o->guard, e.id);
        out += " (or (not " + encode_cond(g) + ") (> " + sym_time(e.id) + " " +
               sym_time(o->b) + ") (< " + sym_time(e.id) + " " + sym_time(o->a) + "))";
      }
      return out + ")";
    }
    case Ord::Kind::Not: return "(not " + encode_ordering(o->inner, events) + ")";
  }
  throw SolverError("unreachable ordering kind");
}

// Declarations for all variables of a state's events.
inline std::vector<std::string> encode_declarations(const std::vector<Event>& events,
                                                    const std::vector<VarDecl>& vars) {
  std::vector<std::string> out;
  for (auto& e : events) {
    out.push_back("(declare-const " + sym_time(e.id) + " Int)");
    for (auto& v : vars) {
      if (v.name == kTimestampVar) continue;
      out.push_back("(declare-const " + sym_data(v.name, e.id) + " " +
                    smt_sort_name(v.sort) + ")");
    }
  }
  if (events.size() >= 2) {
    std::string d = "(assert (distinct";
    for (auto& e : events) d += " " + sym_time(e.id);
    out.push_back(d + "))");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tiny s-expression reader for get-value responses

struct SExpr {
  bool atom = false;
  std::string text;
  std::vector<SExpr> items;
};

inline SExpr parse_sexpr(const std::string& s, std::size_t& pos) {
  auto skip = [&] {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\n' || s[pos] == '\t' || s[pos] == '\r'))
      ++pos;
  };
  skip();
  if (pos >= s.size()) throw SolverError("unexpected end of solver response");
  if (s[pos] == '(') {
    ++pos;
    SExpr e;
    while (true) {
      skip();
      if (pos >= s.size()) throw SolverError("unbalanced solver response");
      if (s[pos] == ')') {
        ++pos;
        return e;
      }
      e.items.push_back(parse_sexpr(s, pos));
    }
  }
  SExpr e;
  e.atom = true;
  std::size_t start = pos;
  while (pos < s.size() && s[pos] != '(' && s[pos] != ')' && s[pos] != ' ' && s[pos] != '\n' &&
         s[pos] != '\t' && s[pos] != '\r')
    ++pos;
  e.text = s.substr(start, pos - start);
  return e;
}

inline BigRat sexpr_numeric(const SExpr& e) {
  if (e.atom) {
    const std::string& t = e.text;
    auto dot = t.find('.');
    if (dot == std::string::npos) return BigRat(BigInt(t));
    // exact decimal
    std::string digits = t.substr(0, dot) + t.substr(dot + 1);
    BigInt num(digits.empty() ? "0" : digits);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < t.size(); ++i) den *= 10;
    return BigRat(num, den);
  }
  if (e.items.size() == 2 && e.items[0].atom && e.items[0].text == "-")
    return -sexpr_numeric(e.items[1]);
  if (e.items.size() == 3 && e.items[0].atom && e.items[0].text == "/")
    return sexpr_numeric(e.items[1]) / sexpr_numeric(e.items[2]);
  if (e.items.size() == 2 && e.items[0].atom && e.items[0].text == "to_real")
    return sexpr_numeric(e.items[1]);
  throw SolverError("cannot interpret solver value");
}

inline Value sexpr_value(const SExpr& e, Sort sort) {
  if (base_sort(sort) == Sort::Bool) {
    if (e.atom && e.text == "true") return Value::boolean(true);
    if (e.atom && e.text == "false") return Value::boolean(false);
    throw SolverError("expected boolean solver value");
  }
  BigRat q = sexpr_numeric(e);
  if (base_sort(sort) == Sort::Rat) return Value::rational(q);
  if (denominator(q) != 1) throw SolverError("expected integer solver value");
  if (sort == Sort::String) {
    BigInt n = numerator(q);
    return Value::string_code(static_cast<std::int64_t>(n));
  }
  return Value::integer(numerator(q));
}

// ---------------------------------------------------------------------------
// Solver session: one external solver process speaking SMT-LIB2.

struct SolverStats {
  std::int64_t checks = 0;
  std::int64_t batches = 0;
  double wall_ms = 0.0;
};

inline std::vector<std::string> split_command(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

// Locates the solver command: explicit argument, then DADA_SOLVER_PATH, then
// a z3 or cvc5 binary on PATH.
inline std::vector<std::string> resolve_solver_command(const std::string& flag = "") {
  if (!flag.empty()) return split_command(flag);
  if (const char* env = ::getenv("DADA_SOLVER_PATH")) {
    std::string s(env);
    if (!s.empty()) return split_command(s);
  }
  auto on_path = [](const std::string& name) -> bool {
    const char* path = ::getenv("PATH");
    if (!path) return false;
    std::istringstream is(path);
    std::string dir;
    while (std::getline(is, dir, ':')) {
      if (dir.empty()) continue;
      std::string full = dir + "/" + name;
      if (::access(full.c_str(), X_OK) == 0) return true;
    }
    return false;
  };
  if (on_path("z3")) return {"z3", "-in"};
  if (on_path("cvc5")) return {"cvc5", "--incremental"};
  throw SolverError(
      "no SMT solver found: pass --solver, set DADA_SOLVER_PATH, or put z3/cvc5 on PATH");
}

class SolverSession {
 public:
  explicit SolverSession(std::vector<std::string> argv, int timeout_ms = 0)
      : argv_(std::move(argv)), timeout_ms_(timeout_ms) {
    if (argv_.empty()) throw SolverError("empty solver command");
    spawn();
    init_options();
  }

  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  ~SolverSession() { shutdown(); }

  SolverStats& stats() { return stats_; }

  // Clears all solver state (used between searches when a session is pooled).
  void reset() {
    if (level_ > 0) {
      send("(pop " + std::to_string(level_) + ")\n");
      expect_successes(1);
      level_ = 0;
    }
    send("(reset)\n");
    expect_successes(1);
    init_options(false);
  }

  void push_frame(const std::vector<std::string>& commands) {
    std::string batch = "(push 1)\n";
    for (auto& c : commands) batch += c + "\n";
    auto t0 = clock_now();
    send(batch);
    expect_successes(1 + commands.size());
    stats_.wall_ms += elapsed_ms(t0);
    ++level_;
  }

  void pop_frame() {
    send("(pop 1)\n");
    expect_successes(1);
    --level_;
  }

  // Runs a group of independent satisfiability checks on top of the current
  // frame; each query is a list of SMT-LIB assert bodies. All queries go out
  // in one write to amortize the pipe round trip.
  std::vector<bool> check_group(const std::vector<std::vector<std::string>>& queries) {
    std::vector<bool> results;
    if (queries.empty()) return results;
    std::string batch;
    for (auto& q : queries) {
      batch += "(push 1)\n";
      for (auto& f : q) batch += "(assert " + f + ")\n";
      batch += "(check-sat)\n(pop 1)\n";
    }
    auto t0 = clock_now();
    send(batch);
    for (auto& q : queries) {
      expect_successes(1 + q.size());
      results.push_back(read_check_result());
      expect_successes(1);
    }
    stats_.wall_ms += elapsed_ms(t0);
    stats_.checks += static_cast<std::int64_t>(queries.size());
    ++stats_.batches;
    return results;
  }

  bool check(const std::vector<std::string>& formulas) {
    return check_group({formulas})[0];
  }

  // Satisfiability check plus model extraction for the given terms.
  std::optional<std::map<std::string, Value>> check_model(
      const std::vector<std::string>& formulas,
      const std::vector<std::pair<std::string, Sort>>& terms) {
    std::string batch = "(push 1)\n";
    for (auto& f : formulas) batch += "(assert " + f + ")\n";
    batch += "(check-sat)\n";
    auto t0 = clock_now();
    send(batch);
    expect_successes(1 + formulas.size());
    bool sat = read_check_result();
    ++stats_.checks;
    ++stats_.batches;
    std::optional<std::map<std::string, Value>> out;
    if (sat && !terms.empty()) {
      std::string gv = "(get-value (";
      for (auto& [name, sort] : terms) gv += name + " ";
      gv += "))\n";
      send(gv);
      std::string resp = read_balanced();
      std::size_t pos = 0;
      SExpr e = parse_sexpr(resp, pos);
      std::map<std::string, Value> model;
      std::map<std::string, Sort> want;
      for (auto& [name, sort] : terms) want[name] = sort;
      for (auto& pair : e.items) {
        if (pair.items.size() != 2 || !pair.items[0].atom) continue;
        auto it = want.find(pair.items[0].text);
        if (it == want.end()) continue;
        model[pair.items[0].text] = sexpr_value(pair.items[1], it->second);
      }
      out = std::move(model);
    } else if (sat) {
      out = std::map<std::string, Value>{};
    }
    send("(pop 1)\n");
    expect_successes(1);
    stats_.wall_ms += elapsed_ms(t0);
    return out;
  }

 private:
  static std::chrono::steady_clock::time_point clock_now() {
    return std::chrono::steady_clock::now();
  }
  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_now() - t0).count();
  }

  void spawn() {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw SolverError("failed to create solver pipes");
    pid_ = fork();
    if (pid_ < 0) throw SolverError("failed to fork solver process");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      std::vector<char*> argv;
      for (auto& a : argv_) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      const char* msg = "(error \"exec failed\")\n";
      ssize_t ignored = write(STDOUT_FILENO, msg, strlen(msg));
      (void)ignored;
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
  }

  void shutdown() {
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
    in_fd_ = out_fd_ = -1;
    if (pid_ > 0) {
      int status = 0;
      for (int i = 0; i < 50; ++i) {
        if (waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          return;
        }
        usleep(10000);
      }
      kill(pid_, SIGKILL);
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  void init_options(bool set_success = true) {
    std::string s;
    s += "(set-option :print-success true)\n";
    s += "(set-option :produce-models true)\n";
    if (timeout_ms_ > 0) s += "(set-option :timeout " + std::to_string(timeout_ms_) + ")\n";
    s += "(set-logic QF_LIRA)\n";
    send(s);
    int expected = 3 + (timeout_ms_ > 0 ? 1 : 0);
    for (int i = 0; i < expected; ++i) {
      std::string line = read_line();
      // Option support differs across solvers; only a failing set-logic is fatal.
      if (line.rfind("(error", 0) == 0 && i == expected - 1)
        throw SolverError("solver rejected logic: " + line);
    }
    (void)set_success;
  }

  void send(const std::string& s) {
    const char* p = s.data();
    std::size_t left = s.size();
    while (left > 0) {
      ssize_t w = write(in_fd_, p, left);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw SolverError("solver process closed its input (write failed)");
      }
      p += w;
      left -= static_cast<std::size_t>(w);
    }
  }

  std::string read_line() {
    std::string line;
    while (true) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        return line;
      }
      fill_buffer();
    }
  }

  void fill_buffer() {
    char chunk[4096];
    ssize_t r = read(out_fd_, chunk, sizeof(chunk));
    if (r <= 0) {
      if (r < 0 && errno == EINTR) return;
      throw SolverError("solver process terminated unexpectedly");
    }
    buffer_.append(chunk, static_cast<std::size_t>(r));
  }

  // Reads one balanced s-expression (the response to get-value).
  std::string read_balanced() {
    std::string acc;
    int depth = 0;
    bool started = false;
    while (true) {
      while (!buffer_.empty()) {
        char c = buffer_.front();
        buffer_.erase(0, 1);
        if (!started) {
          if (c == '(') {
            started = true;
            depth = 1;
            acc += c;
          } else if (!isspace(static_cast<unsigned char>(c))) {
            // error responses are atoms/lines, collect until newline
            acc += c;
            while (!buffer_.empty() && buffer_.front() != '\n') {
              acc += buffer_.front();
              buffer_.erase(0, 1);
            }
            throw SolverError("solver error: " + acc);
          }
          continue;
        }
        acc += c;
        if (c == '(') ++depth;
        if (c == ')') {
          --depth;
          if (depth == 0) return acc;
        }
      }
      fill_buffer();
    }
  }

  void expect_successes(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      std::string line = read_line();
      if (line != "success")
        throw SolverError("solver error: " + line);
    }
  }

  bool read_check_result() {
    std::string line = read_line();
    if (line == "sat") return true;
    if (line == "unsat") return false;
    if (line == "unknown")
      throw SolverError("solver returned unknown (timeout or misconfigured logic)");
    throw SolverError("solver error: " + line);
  }

  std::vector<std::string> argv_;
  int timeout_ms_ = 0;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
  int level_ = 0;
  SolverStats stats_;
};

}  // namespace dalign
