#include "slackcme/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <memory>

namespace slackcme {
namespace {

struct Linear {
  std::vector<long long> coefficients;
  long long constant = 0;
};

class PredicateParser {
 public:
  PredicateParser(std::string_view s, const std::vector<std::string>& species)
      : s_(s), species_(species) {}

  StatePredicate parse() {
    auto p = disjunction();
    skip();
    if (pos_ < s_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, 1, static_cast<int>(pos_) + 1);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(std::string_view token) {
    skip();
    if (s_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  StatePredicate disjunction() {
    auto lhs = conjunction();
    while (eat("||")) {
      auto rhs = conjunction();
      lhs = [lhs, rhs](std::span<const int> x) { return lhs(x) || rhs(x); };
    }
    return lhs;
  }

  StatePredicate conjunction() {
    auto lhs = unary();
    while (eat("&&")) {
      auto rhs = unary();
      lhs = [lhs, rhs](std::span<const int> x) { return lhs(x) && rhs(x); };
    }
    return lhs;
  }

  StatePredicate unary() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '!' && s_.substr(pos_, 2) != "!=") {
      ++pos_;
      auto inner = unary();
      return [inner](std::span<const int> x) { return !inner(x); };
    }
    if (eat("(")) {
      auto inner = disjunction();
      if (!eat(")")) fail("expected ')'");
      return inner;
    }
    return comparison();
  }

  StatePredicate comparison() {
    Linear lhs = linear();
    skip();
    const std::size_t at = pos_;
    int op = -1;
    static constexpr std::string_view ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (int k = 0; k < 6; ++k)
      if (eat(ops[k])) {
        op = k;
        break;
      }
    if (op < 0) {
      pos_ = at;
      fail("expected a comparison operator");
    }
    Linear rhs = linear();
    for (std::size_t j = 0; j < lhs.coefficients.size(); ++j)
      lhs.coefficients[j] -= rhs.coefficients[j];
    lhs.constant -= rhs.constant;
    auto diff = std::make_shared<Linear>(std::move(lhs));
    auto value = [diff](std::span<const int> x) {
      long long v = diff->constant;
      for (std::size_t j = 0; j < x.size() && j < diff->coefficients.size(); ++j)
        v += diff->coefficients[j] * x[j];
      return v;
    };
    switch (op) {
      case 0: return [value](std::span<const int> x) { return value(x) == 0; };
      case 1: return [value](std::span<const int> x) { return value(x) != 0; };
      case 2: return [value](std::span<const int> x) { return value(x) <= 0; };
      case 3: return [value](std::span<const int> x) { return value(x) >= 0; };
      case 4: return [value](std::span<const int> x) { return value(x) < 0; };
      default: return [value](std::span<const int> x) { return value(x) > 0; };
    }
  }

  Linear linear() {
    Linear out;
    out.coefficients.assign(species_.size(), 0);
    int sign = 1;
    if (eat("-")) sign = -1;
    term(out, sign);
    while (true) {
      if (eat("+")) {
        term(out, 1);
      } else if (eat("-")) {
        term(out, -1);
      } else {
        break;
      }
    }
    return out;
  }

  void term(Linear& out, int sign) {
    skip();
    long long factor = 1;
    bool have_number = false;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      factor = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        factor = factor * 10 + (s_[pos_++] - '0');
      have_number = true;
      if (!eat("*")) {
        out.constant += sign * factor;
        return;
      }
      skip();
    }
    if (pos_ >= s_.size() ||
        !(std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      fail(have_number ? "expected a species name after '*'" : "expected a species or a number");
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    const auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end()) {
      pos_ = start;
      fail("unknown species '" + name + "'");
    }
    out.coefficients[static_cast<std::size_t>(it - species_.begin())] += sign * factor;
  }

  std::string_view s_;
  const std::vector<std::string>& species_;
  std::size_t pos_ = 0;
};

}  // namespace

StatePredicate parse_predicate(std::string_view expression,
                               const std::vector<std::string>& species) {
  return PredicateParser(expression, species).parse();
}

}  // namespace slackcme
