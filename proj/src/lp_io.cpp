#include "stockflow/lp_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace stockflow::milp {
namespace {

constexpr size_t kWrapCol = 200;

// Accumulates space-separated tokens, wrapping before the limit; continuation
// lines are indented so a row never starts in column zero.
class LineAcc {
 public:
  explicit LineAcc(std::ostream& os) : os_(os) {}
  void head(const std::string& h) { cur_ = h; }
  void token(const std::string& t) {
    if (cur_.size() + 1 + t.size() > kWrapCol) {
      os_ << cur_ << "\n";
      cur_ = "  ";
    }
    cur_ += " " + t;
  }
  void flush() {
    os_ << cur_ << "\n";
    cur_.clear();
  }

 private:
  std::ostream& os_;
  std::string cur_;
};

std::string coef_str(const Rat64& c) { return c.decimal_str(); }

void emit_terms(LineAcc& acc, const std::vector<std::pair<Rat64, std::string>>& terms,
                const Rat64& constant) {
  bool first = true;
  for (const auto& [c, nm] : terms) {
    if (c.is_zero()) continue;
    Rat64 a = c.sign() < 0 ? -c : c;
    std::string t;
    if (first) {
      if (c.sign() < 0) t = "- ";
    } else {
      t = c.sign() < 0 ? "- " : "+ ";
    }
    if (!(a == Rat64(1))) t += coef_str(a) + " ";
    t += nm;
    acc.token(t);
    first = false;
  }
  if (!constant.is_zero()) {
    Rat64 a = constant.sign() < 0 ? -constant : constant;
    std::string t = first ? (constant.sign() < 0 ? "- " : "") : (constant.sign() < 0 ? "- " : "+ ");
    t += coef_str(a);
    acc.token(t);
    first = false;
  }
  if (first) acc.token("0");
}

const char* sense_str(Sense s) {
  switch (s) {
    case Sense::Le: return "<=";
    case Sense::Ge: return ">=";
    case Sense::Eq: return "=";
  }
  return "?";
}

}  // namespace

void write_lp(const Model& model, std::ostream& os) {
  LineAcc acc(os);
  os << "Minimize\n";
  acc.head(" obj:");
  {
    std::vector<std::pair<Rat64, std::string>> terms;
    for (int j = 0; j < model.num_vars(); ++j)
      if (!model.obj[(size_t)j].is_zero())
        terms.emplace_back(model.obj[(size_t)j], model.var_names[(size_t)j]);
    emit_terms(acc, terms, model.obj_const);
  }
  acc.flush();
  os << "Subject To\n";
  for (const auto& row : model.rows) {
    acc.head(" " + row.name + ":");
    std::vector<std::pair<Rat64, std::string>> terms;
    for (auto k = row.begin; k != row.end; ++k)
      terms.emplace_back(model.terms[k].coef, model.var_names[(size_t)model.terms[k].var]);
    emit_terms(acc, terms, Rat64(0));
    acc.token(sense_str(row.sense));
    acc.token(coef_str(row.rhs));
    acc.flush();
  }

  std::string bounds;
  for (int j = 0; j < model.num_vars(); ++j) {
    const Bound& lo = model.lb[(size_t)j];
    const Bound& hi = model.ub[(size_t)j];
    const std::string& nm = model.var_names[(size_t)j];
    bool bin_default = model.var_kinds[(size_t)j] == VarKind::Binary && lo.finite &&
                       hi.finite && lo.value == Rat64(0) && hi.value == Rat64(1);
    if (bin_default) continue;
    if (!lo.finite && !hi.finite) {
      bounds += " " + nm + " free\n";
    } else if (lo.finite && hi.finite && lo.value == hi.value) {
      bounds += " " + nm + " = " + coef_str(lo.value) + "\n";
    } else if (!lo.finite) {
      bounds += " -infinity <= " + nm + " <= " + coef_str(hi.value) + "\n";
    } else if (!hi.finite) {
      if (!(lo.value == Rat64(0))) bounds += " " + nm + " >= " + coef_str(lo.value) + "\n";
    } else if (lo.value == Rat64(0)) {
      bounds += " " + nm + " <= " + coef_str(hi.value) + "\n";
    } else {
      bounds += " " + coef_str(lo.value) + " <= " + nm + " <= " + coef_str(hi.value) + "\n";
    }
  }
  if (!bounds.empty()) os << "Bounds\n" << bounds;

  std::string gen, bin;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (model.var_kinds[(size_t)j] == VarKind::Integer)
      gen += " " + model.var_names[(size_t)j] + "\n";
    else if (model.var_kinds[(size_t)j] == VarKind::Binary)
      bin += " " + model.var_names[(size_t)j] + "\n";
  }
  if (!gen.empty()) os << "Generals\n" << gen;
  if (!bin.empty()) os << "Binaries\n" << bin;
  os << "End\n";
}

void write_lp_file(const Model& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_lp(model, os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string lp_string(const Model& model) {
  std::ostringstream os;
  write_lp(model, os);
  return os.str();
}

namespace {

struct Tok {
  enum Kind { Name, Number, Colon, Plus, Minus, LessEq, GreaterEq, Equal, End } kind;
  std::string text;
  int line;
};

class Lexer {
 public:
  explicit Lexer(std::istream& is) {
    std::string raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    size_t i = 0;
    int line = 1;
    auto peek = [&](size_t k) { return i + k < raw.size() ? raw[i + k] : '\0'; };
    while (i < raw.size()) {
      char c = raw[i];
      if (c == '\n') {
        ++line;
        ++i;
        continue;
      }
      if (c == '\\') {  // comment to end of line
        while (i < raw.size() && raw[i] != '\n') ++i;
        continue;
      }
      if (std::isspace((unsigned char)c)) {
        ++i;
        continue;
      }
      if (c == ':') {
        toks_.push_back({Tok::Colon, ":", line});
        ++i;
        continue;
      }
      if (c == '+') {
        toks_.push_back({Tok::Plus, "+", line});
        ++i;
        continue;
      }
      if (c == '-') {
        toks_.push_back({Tok::Minus, "-", line});
        ++i;
        continue;
      }
      if (c == '<' || c == '>' || c == '=') {
        Tok::Kind k = c == '<' ? Tok::LessEq : c == '>' ? Tok::GreaterEq : Tok::Equal;
        ++i;
        if (peek(0) == '=') ++i;
        toks_.push_back({k, c == '<' ? "<=" : c == '>' ? ">=" : "=", line});
        continue;
      }
      if (std::isdigit((unsigned char)c) || (c == '.' && std::isdigit((unsigned char)peek(1)))) {
        size_t start = i;
        while (i < raw.size()) {
          char d = raw[i];
          if (std::isdigit((unsigned char)d) || d == '.') {
            ++i;
          } else if ((d == 'e' || d == 'E') &&
                     (std::isdigit((unsigned char)peek(1)) ||
                      ((peek(1) == '+' || peek(1) == '-') && std::isdigit((unsigned char)peek(2))))) {
            i += 2;  // consume 'e' and sign-or-digit; digits continue below
          } else {
            break;
          }
        }
        toks_.push_back({Tok::Number, raw.substr(start, i - start), line});
        continue;
      }
      // names: letters, digits, and common LP punctuation
      size_t start = i;
      while (i < raw.size() && !std::isspace((unsigned char)raw[i]) &&
             std::string(":+-<>=\\").find(raw[i]) == std::string::npos)
        ++i;
      if (i == start) throw LpParseError("unexpected character at line " + std::to_string(line));
      toks_.push_back({Tok::Name, raw.substr(start, i - start), line});
    }
    toks_.push_back({Tok::End, "", line});
  }

  const Tok& peek(size_t k = 0) const {
    size_t ix = pos_ + k;
    return ix < toks_.size() ? toks_[ix] : toks_.back();
  }
  Tok next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at_end() const { return toks_[pos_].kind == Tok::End; }

 private:
  std::vector<Tok> toks_;
  size_t pos_ = 0;
};

bool word_is(const Tok& t, const char* w) {
  if (t.kind != Tok::Name) return false;
  if (t.text.size() != std::string(w).size()) return false;
  for (size_t i = 0; i < t.text.size(); ++i)
    if (std::tolower((unsigned char)t.text[i]) != w[i]) return false;
  return true;
}

[[noreturn]] void fail(const Tok& t, const std::string& what) {
  throw LpParseError(what + " at line " + std::to_string(t.line) +
                     (t.text.empty() ? "" : " near '" + t.text + "'"));
}

bool is_section_word(const Tok& t) {
  return word_is(t, "subject") || word_is(t, "st") || word_is(t, "s.t.") ||
         word_is(t, "bounds") || word_is(t, "bound") || word_is(t, "generals") ||
         word_is(t, "general") || word_is(t, "gen") || word_is(t, "binaries") ||
         word_is(t, "binary") || word_is(t, "bin") || word_is(t, "end");
}

class LpParser {
 public:
  explicit LpParser(std::istream& is) : lex_(is) {}

  Model parse() {
    const Tok& t0 = lex_.peek();
    if (word_is(t0, "maximize") || word_is(t0, "max"))
      fail(t0, "maximization models are not supported; restate as minimization");
    if (!(word_is(t0, "minimize") || word_is(t0, "min"))) fail(t0, "expected 'Minimize'");
    lex_.next();
    parse_objective();
    expect_subject_to();
    parse_rows();
    for (;;) {
      const Tok& t = lex_.peek();
      if (t.kind == Tok::End) break;
      if (word_is(t, "bounds") || word_is(t, "bound")) {
        lex_.next();
        parse_bounds();
      } else if (word_is(t, "generals") || word_is(t, "general") || word_is(t, "gen")) {
        lex_.next();
        parse_kind_list(VarKind::Integer);
      } else if (word_is(t, "binaries") || word_is(t, "binary") || word_is(t, "bin")) {
        lex_.next();
        parse_kind_list(VarKind::Binary);
      } else if (word_is(t, "end")) {
        lex_.next();
        break;
      } else {
        fail(t, "unexpected content after constraints");
      }
    }
    return std::move(mdl_);
  }

 private:
  int var_of(const std::string& nm) {
    auto it = index_.find(nm);
    if (it != index_.end()) return it->second;
    int j = mdl_.add_var(nm, VarKind::Continuous, Bound::at(Rat64(0)), Bound::none());
    index_.emplace(nm, j);
    return j;
  }

  // Reads signed terms (coefficient-name pairs and bare constants) until a
  // token that cannot continue a linear expression.
  void parse_expr(std::vector<std::pair<int, Rat64>>& terms, Rat64& constant, bool stop_at_section) {
    bool first = true;
    for (;;) {
      const Tok& t = lex_.peek();
      int sgn = 1;
      if (t.kind == Tok::Plus || t.kind == Tok::Minus) {
        sgn = t.kind == Tok::Minus ? -1 : 1;
        lex_.next();
      } else if (!first) {
        return;  // expression continues only via +/-
      } else if (t.kind != Tok::Number && t.kind != Tok::Name) {
        return;
      }
      if (stop_at_section && lex_.peek().kind == Tok::Name && is_section_word(lex_.peek()) &&
          lex_.peek(1).kind != Tok::Colon)
        return;
      const Tok& u = lex_.peek();
      if (u.kind == Tok::Number) {
        Rat64 c = parse_num(u);
        lex_.next();
        const Tok& v = lex_.peek();
        if (v.kind == Tok::Name && !(stop_at_section && is_section_word(v) && lex_.peek(1).kind != Tok::Colon)) {
          lex_.next();
          terms.emplace_back(var_of(v.text), sgn < 0 ? -c : c);
        } else {
          constant += sgn < 0 ? -c : c;
        }
      } else if (u.kind == Tok::Name) {
        lex_.next();
        terms.emplace_back(var_of(u.text), Rat64(sgn));
      } else {
        fail(u, "expected a term");
      }
      first = false;
    }
  }

  Rat64 parse_num(const Tok& t) {
    try {
      return Rat64::parse(t.text);
    } catch (const std::exception& e) {
      fail(t, std::string("bad number (") + e.what() + ")");
    }
  }

  void parse_objective() {
    if (lex_.peek().kind == Tok::Name && lex_.peek(1).kind == Tok::Colon &&
        !is_section_word(lex_.peek())) {
      lex_.next();
      lex_.next();
    }
    std::vector<std::pair<int, Rat64>> terms;
    Rat64 constant(0);
    parse_expr(terms, constant, /*stop_at_section=*/true);
    for (auto& [j, c] : terms) mdl_.obj[(size_t)j] += c;
    mdl_.obj_const += constant;
  }

  void expect_subject_to() {
    const Tok& t = lex_.peek();
    if (word_is(t, "subject")) {
      lex_.next();
      if (!word_is(lex_.peek(), "to")) fail(lex_.peek(), "expected 'Subject To'");
      lex_.next();
    } else if (word_is(t, "st") || word_is(t, "s.t.")) {
      lex_.next();
    } else {
      fail(t, "expected 'Subject To'");
    }
  }

  void parse_rows() {
    for (;;) {
      const Tok& t = lex_.peek();
      if (t.kind != Tok::Name || is_section_word(t)) return;
      if (lex_.peek(1).kind != Tok::Colon) fail(t, "expected 'name:' to start a constraint");
      std::string name = t.text;
      lex_.next();
      lex_.next();
      std::vector<std::pair<int, Rat64>> terms;
      Rat64 constant(0);
      parse_expr(terms, constant, /*stop_at_section=*/false);
      const Tok& s = lex_.peek();
      Sense sense;
      if (s.kind == Tok::LessEq) sense = Sense::Le;
      else if (s.kind == Tok::GreaterEq) sense = Sense::Ge;
      else if (s.kind == Tok::Equal) sense = Sense::Eq;
      else fail(s, "expected <=, >= or = in constraint '" + name + "'");
      lex_.next();
      int rsgn = 1;
      if (lex_.peek().kind == Tok::Minus) { rsgn = -1; lex_.next(); }
      else if (lex_.peek().kind == Tok::Plus) { lex_.next(); }
      const Tok& r = lex_.peek();
      if (r.kind != Tok::Number) fail(r, "expected numeric right-hand side");
      Rat64 rhs = parse_num(r);
      lex_.next();
      if (rsgn < 0) rhs = -rhs;
      mdl_.add_row(name, sense, rhs - constant);
      for (auto& [j, c] : terms) mdl_.row_term(j, c);
    }
  }

  // lb/ub with a sign: number or infinity.
  struct Val {
    bool inf = false;
    int inf_sign = 1;
    Rat64 v{};
  };
  Val parse_bound_val() {
    Val out;
    int sgn = 1;
    if (lex_.peek().kind == Tok::Minus) { sgn = -1; lex_.next(); }
    else if (lex_.peek().kind == Tok::Plus) { lex_.next(); }
    const Tok& t = lex_.peek();
    if (word_is(t, "infinity") || word_is(t, "inf")) {
      out.inf = true;
      out.inf_sign = sgn;
      lex_.next();
      return out;
    }
    if (t.kind != Tok::Number) fail(t, "expected a bound value");
    out.v = parse_num(t);
    if (sgn < 0) out.v = -out.v;
    lex_.next();
    return out;
  }

  void set_lb(int j, const Val& v) {
    explicit_bounds_.insert(j);
    mdl_.lb[(size_t)j] = v.inf ? Bound::none() : Bound::at(v.v);
    if (v.inf && v.inf_sign > 0) fail(lex_.peek(), "lower bound of +infinity");
  }
  void set_ub(int j, const Val& v) {
    explicit_bounds_.insert(j);
    mdl_.ub[(size_t)j] = v.inf ? Bound::none() : Bound::at(v.v);
    if (v.inf && v.inf_sign < 0) fail(lex_.peek(), "upper bound of -infinity");
  }

  void parse_bounds() {
    for (;;) {
      const Tok& t = lex_.peek();
      if (t.kind == Tok::End || (t.kind == Tok::Name && is_section_word(t))) return;
      if (t.kind == Tok::Name) {
        // name free | name sense value
        std::string nm = t.text;
        lex_.next();
        if (word_is(lex_.peek(), "free")) {
          lex_.next();
          int j = var_of(nm);
          explicit_bounds_.insert(j);
          mdl_.lb[(size_t)j] = Bound::none();
          mdl_.ub[(size_t)j] = Bound::none();
          continue;
        }
        const Tok& s = lex_.peek();
        int j = var_of(nm);
        if (s.kind == Tok::LessEq) {
          lex_.next();
          set_ub(j, parse_bound_val());
        } else if (s.kind == Tok::GreaterEq) {
          lex_.next();
          set_lb(j, parse_bound_val());
        } else if (s.kind == Tok::Equal) {
          lex_.next();
          Val v = parse_bound_val();
          if (v.inf) fail(s, "fixed bound cannot be infinite");
          set_lb(j, v);
          set_ub(j, v);
        } else {
          fail(s, "malformed bound line");
        }
      } else {
        // value <= name [<= value]
        Val lo = parse_bound_val();
        if (lex_.peek().kind != Tok::LessEq) fail(lex_.peek(), "expected <= in bound line");
        lex_.next();
        const Tok& nm = lex_.peek();
        if (nm.kind != Tok::Name) fail(nm, "expected variable name in bound line");
        int j = var_of(nm.text);
        lex_.next();
        set_lb(j, lo);
        if (lex_.peek().kind == Tok::LessEq) {
          lex_.next();
          set_ub(j, parse_bound_val());
        }
      }
    }
  }

  void parse_kind_list(VarKind kind) {
    for (;;) {
      const Tok& t = lex_.peek();
      if (t.kind != Tok::Name || is_section_word(t)) return;
      int j = var_of(t.text);
      mdl_.var_kinds[(size_t)j] = kind;
      if (kind == VarKind::Binary && !explicit_bounds_.count(j)) {
        mdl_.lb[(size_t)j] = Bound::at(Rat64(0));
        mdl_.ub[(size_t)j] = Bound::at(Rat64(1));
      }
      lex_.next();
    }
  }

  Lexer lex_;
  Model mdl_;
  std::unordered_map<std::string, int> index_;
  std::set<int> explicit_bounds_;
};

}  // namespace

Model parse_lp(std::istream& is) {
  LpParser p(is);
  return p.parse();
}

Model parse_lp_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open LP file: " + path);
  return parse_lp(is);
}

ParsedSolution parse_solution(std::istream& is) {
  ParsedSolution out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "status") {
      if (!(ls >> out.status))
        throw LpParseError("missing status word at line " + std::to_string(lineno));
      continue;
    }
    std::string num;
    if (!(ls >> num))
      throw LpParseError("missing value for '" + first + "' at line " + std::to_string(lineno));
    Rat64 v;
    try {
      v = Rat64::parse(num);
    } catch (const std::exception& e) {
      throw LpParseError("bad value '" + num + "' at line " + std::to_string(lineno) + ": " +
                         e.what());
    }
    std::string extra;
    if (ls >> extra)
      throw LpParseError("trailing content at line " + std::to_string(lineno));
    if (first == "objective") {
      out.has_objective = true;
      out.objective = v;
    } else {
      out.values.emplace_back(first, v);
    }
  }
  return out;
}

ParsedSolution parse_solution_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open solution file: " + path);
  return parse_solution(is);
}

void write_solution(const Model& model, const Solution& sol, std::ostream& os) {
  os << "status " << to_string(sol.status) << "\n";
  if (sol.has_incumbent) {
    os << "objective " << big_decimal_str(sol.objective) << "\n";
    for (int j = 0; j < model.num_vars(); ++j)
      os << model.var_names[(size_t)j] << " " << sol.values[(size_t)j].decimal_str() << "\n";
  }
}

}  // namespace stockflow::milp
