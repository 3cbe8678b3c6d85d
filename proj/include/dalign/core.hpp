#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_rational.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dalign {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Sorts and values

// `Timestamp` is an integer sort measured in seconds; it exists as a separate
// tag so the event-time variable can be told apart from ordinary ints.
enum class Sort { Bool, Int, Rat, String, Timestamp };

inline bool is_numeric(Sort s) {
  return s == Sort::Int || s == Sort::Rat || s == Sort::Timestamp;
}

// Timestamp compares and mixes freely with Int.
inline Sort base_sort(Sort s) { return s == Sort::Timestamp ? Sort::Int : s; }

inline bool same_base(Sort a, Sort b) { return base_sort(a) == base_sort(b); }

inline const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Bool: return "bool";
    case Sort::Int: return "int";
    case Sort::Rat: return "rat";
    case Sort::String: return "string";
    case Sort::Timestamp: return "timestamp";
  }
  return "?";
}

inline std::optional<Sort> sort_from_name(const std::string& n) {
  if (n == "bool" || n == "boolean") return Sort::Bool;
  if (n == "int" || n == "integer") return Sort::Int;
  if (n == "rat" || n == "rational" || n == "float" || n == "real") return Sort::Rat;
  if (n == "string") return Sort::String;
  if (n == "timestamp" || n == "date") return Sort::Timestamp;
  return std::nullopt;
}

// String values are interned: a Value of string sort stores the dictionary
// code, never the characters. Equal strings share a code, distinct strings
// get distinct codes.
class StringInterner {
 public:
  StringInterner() { intern(""); }  // code 0 is always the empty string

  std::int64_t intern(const std::string& s) {
    auto it = codes_.find(s);
    if (it != codes_.end()) return it->second;
    std::int64_t code = static_cast<std::int64_t>(strings_.size());
    strings_.push_back(s);
    codes_.emplace(s, code);
    return code;
  }

  std::optional<std::int64_t> lookup(const std::string& s) const {
    auto it = codes_.find(s);
    if (it == codes_.end()) return std::nullopt;
    return it->second;
  }

  // Codes chosen freely by the SMT solver may fall outside the dictionary;
  // those resolve to a synthesized placeholder name.
  std::string name_of(std::int64_t code) const {
    if (code >= 0 && code < static_cast<std::int64_t>(strings_.size()))
      return strings_[static_cast<std::size_t>(code)];
    return "str_" + std::to_string(code);
  }

  std::size_t size() const { return strings_.size(); }

 private:
  std::vector<std::string> strings_;
  std::unordered_map<std::string, std::int64_t> codes_;
};

class Value {
 public:
  Value() : data_(false) {}
  static Value boolean(bool b) { return Value(b); }
  static Value integer(BigInt i) { return Value(std::move(i)); }
  static Value rational(BigRat r) { return Value(std::move(r)); }
  static Value string_code(std::int64_t code) { return Value(StrCode{code}); }

  Sort sort() const {
    switch (data_.index()) {
      case 0: return Sort::Bool;
      case 1: return Sort::Int;
      case 2: return Sort::Rat;
      default: return Sort::String;
    }
  }

  bool as_bool() const { return std::get<bool>(data_); }
  const BigInt& as_int() const { return std::get<BigInt>(data_); }
  const BigRat& as_rat() const { return std::get<BigRat>(data_); }
  std::int64_t as_string_code() const { return std::get<StrCode>(data_).code; }

  // Exact numeric view; valid for Int and Rat values.
  BigRat numeric() const {
    if (data_.index() == 1) return BigRat(std::get<BigInt>(data_));
    return std::get<BigRat>(data_);
  }

  bool operator==(const Value& o) const {
    if (sort() != o.sort()) return false;
    switch (data_.index()) {
      case 0: return as_bool() == o.as_bool();
      case 1: return as_int() == o.as_int();
      case 2: return as_rat() == o.as_rat();
      default: return as_string_code() == o.as_string_code();
    }
  }
  bool operator!=(const Value& o) const { return !(*this == o); }

  std::string to_string(const StringInterner* interner = nullptr) const {
    switch (data_.index()) {
      case 0: return as_bool() ? "true" : "false";
      case 1: return as_int().str();
      case 2: return as_rat().str();
      default:
        if (interner) return interner->name_of(as_string_code());
        return "str#" + std::to_string(as_string_code());
    }
  }

 private:
  struct StrCode {
    std::int64_t code;
  };
  explicit Value(bool b) : data_(b) {}
  explicit Value(BigInt i) : data_(std::move(i)) {}
  explicit Value(BigRat r) : data_(std::move(r)) {}
  explicit Value(StrCode c) : data_(c) {}

  std::variant<bool, BigInt, BigRat, StrCode> data_;
};

// ---------------------------------------------------------------------------
// Events, traces, logs

// Trace-origin ids live in a namespace disjoint from synthesized ids, so
// membership of an id in the original trace is decidable by inspection.
struct EventId {
  bool synthesized = false;
  int index = 0;

  bool operator==(const EventId& o) const {
    return synthesized == o.synthesized && index == o.index;
  }
  bool operator!=(const EventId& o) const { return !(*this == o); }
  bool operator<(const EventId& o) const {
    if (synthesized != o.synthesized) return !synthesized;
    return index < o.index;
  }

  std::string str() const {
    return (synthesized ? "m" : "t") + std::to_string(index);
  }
};

inline EventId trace_event_id(int pos) { return EventId{false, pos}; }

// Hands out synthesized ids; owned by a single search.
inline EventId fresh_event_id(int& counter) { return EventId{true, counter++}; }

using Assignment = std::map<std::string, Value>;

struct Event {
  EventId id;
  std::string activity;
  Assignment assignment;
  bool from_trace = false;
  // Set once any attribute of this event was freed by a repair; removal
  // repairs never touch modified events.
  bool modified = false;

  std::optional<Value> value_of(const std::string& var) const {
    auto it = assignment.find(var);
    if (it == assignment.end()) return std::nullopt;
    return it->second;
  }
};

struct Trace {
  std::string name;
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
};

struct Log {
  std::vector<Trace> traces;
};

inline Trace make_trace(std::string name,
                        std::vector<std::pair<std::string, Assignment>> evs) {
  Trace t;
  t.name = std::move(name);
  int pos = 0;
  for (auto& [act, asg] : evs) {
    Event e;
    e.id = trace_event_id(pos++);
    e.activity = act;
    e.assignment = std::move(asg);
    e.from_trace = true;
    t.events.push_back(std::move(e));
  }
  return t;
}

// Declared process variable.
struct VarDecl {
  std::string name;
  Sort sort = Sort::Int;
};

// The event-time variable present in every problem.
inline const std::string kTimestampVar = "timestamp";

// ---------------------------------------------------------------------------
// Errors

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResourceLimitError : std::runtime_error {
  explicit ResourceLimitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dalign
