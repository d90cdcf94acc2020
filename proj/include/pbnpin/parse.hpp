/*!
  \file parse.hpp
  \brief Parser and serializer for the .pbn network description language.

  Grammar (whitespace and '#' line comments are insignificant):

      file      := ('pbn' IDENT)? item*
      item      := node | target
      node      := 'node' IDENT '{' candidate+ '}'
      candidate := PROB ':' expr
      target    := 'target' (IDENT '=' ('0'|'1') ','?)+
      expr      := xor ('|' xor)*
      xor       := and ('^' and)*
      and       := unary ('&' unary)*
      unary     := '!' unary | '0' | '1' | IDENT | '(' expr ')'

  PROB is a decimal literal (e.g. 1, 0.99, 0.005) or an exact fraction p/q;
  both are converted exactly, never through floating point. Identifiers are
  [A-Za-z_][A-Za-z0-9_]* except the keywords pbn/node/target. Candidate
  probabilities of a node must sum to exactly 1.
*/

#pragma once

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"

namespace pbnpin {

struct source_span {
  int line = 1;
  int column = 1;
  size_t offset = 0;
};

struct parse_error : error {
  source_span span;
  parse_error(source_span s, const std::string& msg)
      : error(std::to_string(s.line) + ":" + std::to_string(s.column) + ": " + msg), span(s) {}
};

struct parse_result {
  pbn_model model;
  /// Steady-state values by node index (1-based at position index-1), if a
  /// target clause was present.
  std::optional<std::vector<bool>> target;
};

namespace dsl {

enum class tok : uint8_t {
  kw_pbn, kw_node, kw_target, ident, number,
  colon, lbrace, rbrace, lparen, rparen,
  bang, amp, pipe, caret, equals, slash, comma, eof
};

struct token {
  tok kind;
  std::string text;
  source_span span;
};

class lexer {
public:
  explicit lexer(std::string_view text) : text_(text) {}

  std::vector<token> run() {
    std::vector<token> out;
    for (;;) {
      skip_ws();
      const source_span here = span();
      if (pos_ >= text_.size()) {
        out.push_back({tok::eof, "", here});
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          word.push_back(text_[pos_]);
          advance();
        }
        tok kind = tok::ident;
        if (word == "pbn") kind = tok::kw_pbn;
        else if (word == "node") kind = tok::kw_node;
        else if (word == "target") kind = tok::kw_target;
        out.push_back({kind, std::move(word), here});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          num.push_back(text_[pos_]);
          advance();
        }
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
          num.push_back('.');
          advance();
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            num.push_back(text_[pos_]);
            advance();
          }
        }
        out.push_back({tok::number, std::move(num), here});
        continue;
      }
      tok kind;
      switch (c) {
        case ':': kind = tok::colon; break;
        case '{': kind = tok::lbrace; break;
        case '}': kind = tok::rbrace; break;
        case '(': kind = tok::lparen; break;
        case ')': kind = tok::rparen; break;
        case '!': kind = tok::bang; break;
        case '&': kind = tok::amp; break;
        case '|': kind = tok::pipe; break;
        case '^': kind = tok::caret; break;
        case '=': kind = tok::equals; break;
        case '/': kind = tok::slash; break;
        case ',': kind = tok::comma; break;
        default:
          throw parse_error(here, std::string("unexpected character '") + c + "'");
      }
      out.push_back({kind, std::string(1, c), here});
      advance();
    }
  }

private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      }
      if (pos_ < text_.size() && text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') {
          advance();
        }
        continue;
      }
      return;
    }
  }

  source_span span() const { return {line_, col_, pos_}; }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

/// Exact decimal-to-rational conversion ("0.005" -> 1/200).
inline rational parse_decimal(const std::string& text) {
  const size_t dot = text.find('.');
  if (dot == std::string::npos) {
    return rational(integer(text), integer(1));
  }
  const std::string whole = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  integer den = 1;
  for (size_t i = 0; i < frac.size(); ++i) {
    den *= 10;
  }
  return rational(integer(whole) * den + integer(frac), den);
}

// Expression layer parsed with names; resolved to indices afterwards so that
// forward references between nodes work.
struct raw_expr;
using raw_ptr = std::shared_ptr<raw_expr>;
struct raw_expr {
  enum class kind : uint8_t { constant, name, negation, binary } k;
  bool value = false;
  std::string name;
  source_span span;
  char binop = 0;
  raw_ptr lhs, rhs;
};

struct raw_candidate {
  rational probability;
  source_span span;
  raw_ptr expr;
};

struct raw_node {
  std::string name;
  source_span span;
  std::vector<raw_candidate> candidates;
};

class parser {
public:
  explicit parser(std::vector<token> tokens) : toks_(std::move(tokens)) {}

  void run() {
    if (at(tok::kw_pbn)) {
      next();
      network_name = expect(tok::ident, "network name").text;
    }
    while (!at(tok::eof)) {
      if (at(tok::kw_node)) {
        parse_node();
      } else if (at(tok::kw_target)) {
        parse_target();
      } else {
        throw parse_error(peek().span, "expected 'node' or 'target', got '" + peek().text + "'");
      }
    }
    if (nodes.empty()) {
      throw parse_error(peek().span, "network declares no nodes");
    }
  }

  std::string network_name = "pbn";
  std::vector<raw_node> nodes;
  std::vector<std::pair<token, bool>> target; // (name token, value)
  bool has_target = false;

private:
  const token& peek() const { return toks_[pos_]; }
  bool at(tok k) const { return peek().kind == k; }
  token next() { return toks_[pos_++]; }

  token expect(tok k, const std::string& what) {
    if (!at(k)) {
      throw parse_error(peek().span, "expected " + what + ", got '" + peek().text + "'");
    }
    return next();
  }

  void parse_node() {
    next();
    raw_node node;
    const token name = expect(tok::ident, "node name");
    node.name = name.text;
    node.span = name.span;
    expect(tok::lbrace, "'{'");
    while (!at(tok::rbrace)) {
      raw_candidate cand;
      const token prob = expect(tok::number, "probability");
      cand.span = prob.span;
      rational p = parse_decimal(prob.text);
      if (at(tok::slash)) {
        next();
        const token den = expect(tok::number, "denominator");
        const rational d = parse_decimal(den.text);
        if (d.numerator() == 0 || d.denominator() != 1 || p.denominator() != 1) {
          throw parse_error(den.span, "fractions must be integer/integer with nonzero denominator");
        }
        p = rational(p.numerator(), d.numerator());
      }
      cand.probability = p;
      expect(tok::colon, "':'");
      cand.expr = parse_expr();
      node.candidates.push_back(std::move(cand));
    }
    next(); // '}'
    if (node.candidates.empty()) {
      throw parse_error(node.span, "node " + node.name + " has no candidate functions");
    }
    nodes.push_back(std::move(node));
  }

  void parse_target() {
    const token kw = next();
    if (has_target) {
      throw parse_error(kw.span, "duplicate target clause");
    }
    has_target = true;
    while (at(tok::ident)) {
      const token name = next();
      expect(tok::equals, "'='");
      const token val = expect(tok::number, "0 or 1");
      if (val.text != "0" && val.text != "1") {
        throw parse_error(val.span, "target values must be 0 or 1");
      }
      target.emplace_back(name, val.text == "1");
      if (at(tok::comma)) {
        next();
      }
    }
    if (target.empty()) {
      throw parse_error(kw.span, "empty target clause");
    }
  }

  raw_ptr parse_expr() { return parse_or(); }

  raw_ptr parse_or() {
    raw_ptr e = parse_xor();
    while (at(tok::pipe)) {
      const token op = next();
      e = make_binary('|', op.span, e, parse_xor());
    }
    return e;
  }

  raw_ptr parse_xor() {
    raw_ptr e = parse_and();
    while (at(tok::caret)) {
      const token op = next();
      e = make_binary('^', op.span, e, parse_and());
    }
    return e;
  }

  raw_ptr parse_and() {
    raw_ptr e = parse_unary();
    while (at(tok::amp)) {
      const token op = next();
      e = make_binary('&', op.span, e, parse_unary());
    }
    return e;
  }

  raw_ptr parse_unary() {
    if (at(tok::bang)) {
      const token op = next();
      auto e = std::make_shared<raw_expr>();
      e->k = raw_expr::kind::negation;
      e->span = op.span;
      e->lhs = parse_unary();
      return e;
    }
    if (at(tok::number)) {
      const token num = next();
      if (num.text != "0" && num.text != "1") {
        throw parse_error(num.span, "only 0 and 1 are valid constants in expressions");
      }
      auto e = std::make_shared<raw_expr>();
      e->k = raw_expr::kind::constant;
      e->value = num.text == "1";
      e->span = num.span;
      return e;
    }
    if (at(tok::ident)) {
      const token name = next();
      auto e = std::make_shared<raw_expr>();
      e->k = raw_expr::kind::name;
      e->name = name.text;
      e->span = name.span;
      return e;
    }
    if (at(tok::lparen)) {
      next();
      raw_ptr e = parse_expr();
      expect(tok::rparen, "')'");
      return e;
    }
    throw parse_error(peek().span, "expected expression, got '" + peek().text + "'");
  }

  static raw_ptr make_binary(char op, source_span span, raw_ptr lhs, raw_ptr rhs) {
    auto e = std::make_shared<raw_expr>();
    e->k = raw_expr::kind::binary;
    e->binop = op;
    e->span = span;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  std::vector<token> toks_;
  size_t pos_ = 0;
};

inline bool_expr resolve(const raw_expr& raw, const std::map<std::string, int>& index) {
  switch (raw.k) {
    case raw_expr::kind::constant:
      return bool_expr::constant(raw.value);
    case raw_expr::kind::name: {
      auto it = index.find(raw.name);
      if (it == index.end()) {
        throw parse_error(raw.span, "unknown node reference: " + raw.name);
      }
      return bool_expr::var(it->second);
    }
    case raw_expr::kind::negation:
      return !resolve(*raw.lhs, index);
    case raw_expr::kind::binary: {
      const bool_expr l = resolve(*raw.lhs, index);
      const bool_expr r = resolve(*raw.rhs, index);
      switch (raw.binop) {
        case '&': return l & r;
        case '|': return l | r;
        case '^': return l ^ r;
      }
    }
  }
  throw internal_error("resolve: unreachable");
}

} // namespace dsl

inline parse_result parse(std::string_view text, const caps& limits = {}) {
  dsl::lexer lex(text);
  dsl::parser par(lex.run());
  par.run();

  std::map<std::string, int> index;
  for (size_t i = 0; i < par.nodes.size(); ++i) {
    const dsl::raw_node& node = par.nodes[i];
    if (index.count(node.name)) {
      throw parse_error(node.span, "duplicate node name: " + node.name);
    }
    index[node.name] = static_cast<int>(i) + 1;
  }

  std::vector<node_spec> specs;
  specs.reserve(par.nodes.size());
  for (const dsl::raw_node& node : par.nodes) {
    node_spec spec;
    spec.name = node.name;
    rational sum = rat(0);
    for (const dsl::raw_candidate& cand : node.candidates) {
      if (cand.probability < rat(0) || cand.probability > rat(1)) {
        throw parse_error(cand.span, "probability out of [0,1]");
      }
      sum += cand.probability;
      spec.candidates.emplace_back(cand.probability, dsl::resolve(*cand.expr, index));
    }
    if (sum != rat(1)) {
      throw parse_error(node.span, "node " + node.name +
                                       ": candidate probabilities sum to " + to_string(sum) +
                                       ", expected 1");
    }
    specs.push_back(std::move(spec));
  }

  parse_result result{pbn_model::build(par.network_name, specs, limits), std::nullopt};

  if (par.has_target) {
    std::vector<bool> eps(specs.size(), false);
    std::vector<bool> seen(specs.size(), false);
    for (const auto& [name_tok, value] : par.target) {
      auto it = index.find(name_tok.text);
      if (it == index.end()) {
        throw parse_error(name_tok.span, "unknown node in target: " + name_tok.text);
      }
      const size_t slot = static_cast<size_t>(it->second - 1);
      if (seen[slot]) {
        throw parse_error(name_tok.span, "node assigned twice in target: " + name_tok.text);
      }
      seen[slot] = true;
      eps[slot] = value;
    }
    for (size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) {
        throw parse_error(par.target.front().first.span,
                          "target does not assign node " + specs[i].name);
      }
    }
    result.target = std::move(eps);
  }
  return result;
}

namespace dsl {

/// Decimal rendering when the denominator is 2^a 5^b, fraction otherwise.
inline std::string probability_literal(const rational& p) {
  integer den = p.denominator();
  int twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) {
    return to_string(p);
  }
  const int digits = std::max(twos, fives);
  if (digits == 0) {
    return p.numerator().str();
  }
  integer scale = 1;
  for (int i = 0; i < digits; ++i) {
    scale *= 10;
  }
  const integer scaled = p.numerator() * (scale / p.denominator());
  std::string whole = integer(scaled / scale).str();
  std::string frac = integer(scaled % scale).str();
  frac.insert(frac.begin(), static_cast<size_t>(digits) - frac.size(), '0');
  while (frac.size() > 1 && frac.back() == '0') {
    frac.pop_back();
  }
  return whole + "." + frac;
}

} // namespace dsl

inline std::string serialize(const pbn_model& model,
                             const std::optional<std::vector<bool>>& target = std::nullopt) {
  std::ostringstream out;
  out << "pbn " << model.name() << "\n\n";
  const auto name_of = [&](int i) { return model.node(i).name; };
  for (const pbn_node& node : model.nodes()) {
    out << "node " << node.name << " {\n";
    for (const candidate_function& cand : node.candidates) {
      out << "  " << dsl::probability_literal(cand.probability) << ": "
          << cand.expr.to_string(name_of) << "\n";
    }
    out << "}\n";
  }
  if (target) {
    out << "\ntarget";
    for (int i = 1; i <= model.node_count(); ++i) {
      out << " " << model.node(i).name << "=" << ((*target)[static_cast<size_t>(i - 1)] ? 1 : 0);
    }
    out << "\n";
  }
  return out.str();
}

} // namespace pbnpin
