#include "hgd/parse.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace hgd {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const VarTablePtr& vars, std::size_t line)
      : text_(text), vars_(vars), line_(line) {}

  DiffOperator parse_all() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty expression");
    DiffOperator r = expr();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, pos_ + 1); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  DiffOperator one() const { return DiffOperator(RationalFunction::constant(vars_, 1)); }

  DiffOperator expr() {
    DiffOperator r = term();
    for (;;) {
      if (accept('+')) {
        r += term();
      } else if (accept('-')) {
        r -= term();
      } else {
        return r;
      }
    }
  }

  DiffOperator term() {
    DiffOperator r = unary();
    for (;;) {
      if (accept('*')) {
        r = r * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        DiffOperator d = unary();
        if (d.is_zero()) {
          pos_ = at;
          fail("division by zero");
        }
        if (d.order() > 0) {
          pos_ = at;
          fail("division by an expression containing derivations");
        }
        r = r * DiffOperator(d.leading_coeff().inverse());
      } else {
        return r;
      }
    }
  }

  DiffOperator unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  DiffOperator power() {
    DiffOperator base = atom();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a nonnegative integer exponent");
    unsigned long k = std::stoul(std::string(text_.substr(start, pos_ - start)));
    if (k > 255) fail("exponent too large");
    DiffOperator r = one();
    for (unsigned long i = 0; i < k; ++i) r = r * base;
    return r;
  }

  DiffOperator atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      DiffOperator r = expr();
      if (!accept(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail(std::string("unexpected '") + c + "'");
  }

  DiffOperator number() {
    const std::size_t start = pos_;
    std::string digits;
    std::size_t decimals = 0;
    bool dot = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        if (dot) ++decimals;
      } else if (c == '.' && !dot) {
        dot = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits.empty()) {
      pos_ = start;
      fail("malformed number");
    }
    Integer num(digits, 10);
    Integer den = 1;
    for (std::size_t i = 0; i < decimals; ++i) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return DiffOperator(RationalFunction::constant(vars_, q));
  }

  DiffOperator name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string id(text_.substr(start, pos_ - start));
    if (auto i = vars_->find(id)) return DiffOperator(RationalFunction::variable(vars_, *i));
    if (id.size() > 1 && id[0] == 'd') {
      if (auto i = vars_->find(id.substr(1))) return DiffOperator::partial(vars_, *i);
    }
    pos_ = start;
    fail("unknown variable '" + id + "'");
  }

  std::string_view text_;
  const VarTablePtr& vars_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

DiffOperator parse_operator(std::string_view text, const VarTablePtr& vars, std::size_t line) {
  return Parser(text, vars, line).parse_all();
}

RationalFunction parse_rational(std::string_view text, const VarTablePtr& vars, std::size_t line) {
  DiffOperator op = parse_operator(text, vars, line);
  if (op.is_zero()) return RationalFunction(vars);
  if (op.order() > 0) throw ParseError("expected an expression without derivations", line, 1);
  return op.leading_coeff();
}

Ideal parse_ideal(std::string_view text) {
  Ideal ideal;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    std::string_view line = strip_comment(raw);
    if (blank(line)) {
      if (end == text.size()) break;
      continue;
    }
    if (!ideal.vars) {
      auto colon = line.find(':');
      std::string_view head = line.substr(0, colon);
      while (!head.empty() && std::isspace(static_cast<unsigned char>(head.front()))) head.remove_prefix(1);
      while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back()))) head.remove_suffix(1);
      if (colon == std::string_view::npos || head != "vars") {
        throw ParseError("expected 'vars:' declaration", lineno, 1);
      }
      std::istringstream names{std::string(line.substr(colon + 1))};
      std::vector<std::string> list;
      for (std::string n; names >> n;) {
        bool ok = std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_';
        for (char c : n) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
        if (!ok) throw ParseError("invalid variable name '" + n + "'", lineno, colon + 2);
        list.push_back(n);
      }
      if (list.empty()) throw ParseError("no variables declared", lineno, colon + 2);
      try {
        ideal.vars = make_vars(std::move(list));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(e.what(), lineno, 1);
      }
    } else {
      DiffOperator op = parse_operator(line, ideal.vars, lineno);
      if (!op.is_zero()) ideal.generators.push_back(std::move(op));
    }
    if (end == text.size()) break;
  }
  if (!ideal.vars) throw ParseError("empty ideal file", lineno == 0 ? 1 : lineno, 1);
  if (ideal.generators.empty()) throw ParseError("ideal has no generators", lineno, 1);
  return ideal;
}

Ideal read_ideal_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ideal(buf.str());
}

std::string format_ideal(const Ideal& ideal) {
  std::string s = "vars:";
  for (const auto& n : ideal.vars->names()) s += ' ' + n;
  s += '\n';
  for (const auto& g : ideal.generators) s += g.to_string() + '\n';
  return s;
}

std::vector<DiffOperator> parse_operator_list(std::string_view text, const VarTablePtr& vars) {
  std::vector<DiffOperator> out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '(') ++depth;
    if (i < text.size() && text[i] == ')') --depth;
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      out.push_back(parse_operator(text.substr(start, i - start), vars));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace hgd
