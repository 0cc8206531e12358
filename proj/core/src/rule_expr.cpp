#include "greybox/rule_expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "greybox/errors.hpp"

namespace greybox::rules {

std::string render(const FeatureValue& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "absent"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double d) const {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
      return std::string(buf, end);
    }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

enum class Op { Eq, Ne, Lt, Le, Gt, Ge, In };

struct Predicate::Node {
  enum class Kind { Or, And, Not, Const, Truthy, Compare } kind;
  std::vector<std::shared_ptr<const Node>> children;
  bool constant = false;
  std::string feature;
  Op op = Op::Eq;
  std::vector<FeatureValue> literals;
};

namespace {

using NodePtr = std::shared_ptr<const Predicate::Node>;
using Node = Predicate::Node;

enum class Tok { Ident, Text, Number, Op, LParen, RParen, LBracket, RBracket, Comma, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

[[noreturn]] void syntax(std::string_view source, std::size_t pos, const std::string& what) {
  throw Error(ErrorKind::RuleSyntax,
              "predicate error at offset " + std::to_string(pos) + ": " + what,
              {{"predicate", std::string(source)}, {"offset", pos}});
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      ++i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '.' ||
                              ((s[i] == '-' || s[i] == '+') && (s[i - 1] == 'e' || s[i - 1] == 'E'))))
        ++i;
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
    } else if (c == '\'') {
      auto close = s.find('\'', i + 1);
      if (close == std::string_view::npos) syntax(s, start, "unterminated string");
      out.push_back({Tok::Text, std::string(s.substr(i + 1, close - i - 1)), start});
      i = close + 1;
    } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',') {
      static constexpr std::string_view chars = "()[],";
      static constexpr Tok kinds[] = {Tok::LParen, Tok::RParen, Tok::LBracket, Tok::RBracket, Tok::Comma};
      out.push_back({kinds[chars.find(c)], std::string(1, c), start});
      ++i;
    } else if (c == '=' || c == '!' || c == '<' || c == '>') {
      ++i;
      if (i < s.size() && s[i] == '=') ++i;
      auto op = std::string(s.substr(start, i - start));
      if (op == "=" || op == "!") syntax(s, start, "unknown operator '" + op + "'");
      out.push_back({Tok::Op, op, start});
    } else {
      syntax(s, start, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view source, const FeatureSchema& schema, std::vector<std::string>& refs)
      : source_(source), schema_(schema), refs_(refs), toks_(tokenize(source)) {}

  NodePtr parse() {
    auto node = parse_or();
    if (peek().kind != Tok::End) syntax(source_, peek().pos, "unexpected '" + peek().text + "'");
    return node;
  }

 private:
  const Token& peek() const { return toks_[at_]; }
  const Token& take() { return toks_[at_++]; }
  bool keyword(std::string_view word) const { return peek().kind == Tok::Ident && peek().text == word; }

  NodePtr parse_or() {
    auto first = parse_and();
    if (!keyword("or")) return first;
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Or;
    node->children.push_back(first);
    while (keyword("or")) {
      take();
      node->children.push_back(parse_and());
    }
    return node;
  }

  NodePtr parse_and() {
    auto first = parse_unary();
    if (!keyword("and")) return first;
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::And;
    node->children.push_back(first);
    while (keyword("and")) {
      take();
      node->children.push_back(parse_unary());
    }
    return node;
  }

  NodePtr parse_unary() {
    if (keyword("not")) {
      take();
      auto node = std::make_shared<Node>();
      node->kind = Node::Kind::Not;
      node->children.push_back(parse_unary());
      return node;
    }
    if (peek().kind == Tok::LParen) {
      take();
      auto inner = parse_or();
      if (peek().kind != Tok::RParen) syntax(source_, peek().pos, "expected ')'");
      take();
      return inner;
    }
    if (keyword("true") || keyword("false")) {
      auto node = std::make_shared<Node>();
      node->kind = Node::Kind::Const;
      node->constant = take().text == "true";
      return node;
    }
    if (peek().kind != Tok::Ident) syntax(source_, peek().pos, "expected a feature name");
    const Token name = take();
    auto type = schema_.find(name.text);
    if (type == schema_.end()) syntax(source_, name.pos, "unknown feature '" + name.text + "'");
    if (std::find(refs_.begin(), refs_.end(), name.text) == refs_.end()) refs_.push_back(name.text);

    auto node = std::make_shared<Node>();
    node->feature = name.text;
    if (peek().kind != Tok::Op && !keyword("in")) {
      if (type->second != FeatureType::Bool)
        syntax(source_, name.pos, "feature '" + name.text + "' is not boolean; compare it");
      node->kind = Node::Kind::Truthy;
      return node;
    }
    node->kind = Node::Kind::Compare;
    const Token op = take();
    if (op.text == "in") {
      node->op = Op::In;
      if (peek().kind != Tok::LBracket) syntax(source_, peek().pos, "expected '[' after 'in'");
      take();
      node->literals.push_back(literal(type->second));
      while (peek().kind == Tok::Comma) {
        take();
        node->literals.push_back(literal(type->second));
      }
      if (peek().kind != Tok::RBracket) syntax(source_, peek().pos, "expected ']'");
      take();
      return node;
    }
    static const std::pair<std::string_view, Op> ops[] = {{"==", Op::Eq}, {"!=", Op::Ne}, {"<", Op::Lt},
                                                          {"<=", Op::Le}, {">", Op::Gt},  {">=", Op::Ge}};
    for (const auto& [text, o] : ops)
      if (op.text == text) node->op = o;
    if (node->op != Op::Eq && node->op != Op::Ne && type->second != FeatureType::Number)
      syntax(source_, op.pos, "ordering comparison on non-numeric feature '" + name.text + "'");
    node->literals.push_back(literal(type->second));
    return node;
  }

  FeatureValue literal(FeatureType want) {
    const Token t = take();
    switch (t.kind) {
      case Tok::Text:
        if (want != FeatureType::Text) syntax(source_, t.pos, "text literal for a non-text feature");
        return t.text;
      case Tok::Number: {
        if (want != FeatureType::Number) syntax(source_, t.pos, "number literal for a non-numeric feature");
        double d = 0;
        auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
        if (ec != std::errc() || end != t.text.data() + t.text.size())
          syntax(source_, t.pos, "malformed number '" + t.text + "'");
        return d;
      }
      case Tok::Ident:
        if (t.text == "true" || t.text == "false") {
          if (want != FeatureType::Bool) syntax(source_, t.pos, "boolean literal for a non-boolean feature");
          return t.text == "true";
        }
        [[fallthrough]];
      default:
        syntax(source_, t.pos, "expected a literal");
    }
  }

  std::string_view source_;
  const FeatureSchema& schema_;
  std::vector<std::string>& refs_;
  std::vector<Token> toks_;
  std::size_t at_ = 0;
};

bool compare(Op op, const FeatureValue& lhs, const FeatureValue& rhs) {
  if (op == Op::Eq) return lhs == rhs;
  if (op == Op::Ne) return lhs != rhs;
  const double a = std::get<double>(lhs);
  const double b = std::get<double>(rhs);
  switch (op) {
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    default: return false;
  }
}

bool eval(const Node& n, const Features& f) {
  switch (n.kind) {
    case Node::Kind::Or:
      return std::any_of(n.children.begin(), n.children.end(), [&](const auto& c) { return eval(*c, f); });
    case Node::Kind::And:
      return std::all_of(n.children.begin(), n.children.end(), [&](const auto& c) { return eval(*c, f); });
    case Node::Kind::Not: return !eval(*n.children.front(), f);
    case Node::Kind::Const: return n.constant;
    case Node::Kind::Truthy: {
      auto it = f.find(n.feature);
      return it != f.end() && std::holds_alternative<bool>(it->second) && std::get<bool>(it->second);
    }
    case Node::Kind::Compare: {
      auto it = f.find(n.feature);
      if (it == f.end() || std::holds_alternative<std::monostate>(it->second)) return false;
      if (n.op == Op::In)
        return std::find(n.literals.begin(), n.literals.end(), it->second) != n.literals.end();
      return compare(n.op, it->second, n.literals.front());
    }
  }
  return false;
}

}  // namespace

Predicate Predicate::parse(std::string_view text, const FeatureSchema& schema) {
  Predicate p;
  p.text_ = std::string(text);
  p.root_ = Parser(text, schema, p.referenced_).parse();
  return p;
}

bool Predicate::evaluate(const Features& features) const { return eval(*root_, features); }

}  // namespace greybox::rules
