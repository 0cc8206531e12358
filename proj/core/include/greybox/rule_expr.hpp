#pragma once

// Predicate language of the recommender rule table.
//
//   expr    := and ("or" and)*
//   and     := unary ("and" unary)*
//   unary   := "not" unary | "(" expr ")" | compare | feature | "true" | "false"
//   compare := feature op literal | feature "in" "[" literal ("," literal)* "]"
//   op      := "==" | "!=" | "<" | "<=" | ">" | ">="
//   literal := 'text' | number | true | false
//
// Features are typed (bool, number, text); predicates are type-checked when
// parsed. A feature may be absent at evaluation time (e.g. no cost estimate);
// every comparison on an absent feature is false.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace greybox::rules {

enum class FeatureType { Bool, Number, Text };

using FeatureValue = std::variant<std::monostate, bool, double, std::string>;
using Features = std::map<std::string, FeatureValue, std::less<>>;
using FeatureSchema = std::map<std::string, FeatureType, std::less<>>;

std::string render(const FeatureValue& v);

class Predicate {
 public:
  struct Node;

  /// Throws Error{RuleSyntax} with the character offset of the problem.
  static Predicate parse(std::string_view text, const FeatureSchema& schema);

  bool evaluate(const Features& features) const;
  /// Feature names in order of first appearance.
  const std::vector<std::string>& referenced() const noexcept { return referenced_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::vector<std::string> referenced_;
  std::string text_;
};

}  // namespace greybox::rules
