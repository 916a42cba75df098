#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "slackcme/network.hpp"

namespace slackcme {
namespace {

struct Term {
  int coefficient;
  std::string species;
};

struct RawComplex {
  std::vector<Term> terms;
  int column;
};

class LineParser {
 public:
  LineParser(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  bool consume(std::string_view token) {
    skip_ws();
    if (s_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  RawComplex complex() {
    skip_ws();
    RawComplex out{{}, static_cast<int>(pos_) + 1};
    // A lone 0 is the empty complex; "0X" is not valid.
    if (pos_ < s_.size() && s_[pos_] == '0' &&
        (pos_ + 1 >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) ||
                                    s_[pos_ + 1] == '_'))) {
      ++pos_;
      return out;
    }
    out.terms.push_back(term());
    while (true) {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '+') {
        ++pos_;
        out.terms.push_back(term());
      } else {
        break;
      }
    }
    return out;
  }

  double rate() {
    skip_ws();
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected a rate constant");
    const std::size_t start = pos_;
    pos_ += static_cast<std::size_t>(ptr - begin);
    if (!(value > 0.0)) {
      pos_ = start;
      fail("rate constant must be positive");
    }
    return value;
  }

 private:
  Term term() {
    skip_ws();
    int coefficient = 1;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      const std::size_t start = pos_;
      coefficient = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        coefficient = coefficient * 10 + (s_[pos_] - '0');
        ++pos_;
      }
      if (coefficient == 0) {
        pos_ = start;
        fail("stoichiometric coefficient must be positive");
      }
      skip_ws();
    }
    if (pos_ >= s_.size() ||
        !(std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      fail("expected a species name");
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return {coefficient, std::string(s_.substr(start, pos_ - start))};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

std::string format_rate(double k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", k);
  // Prefer the shortest representation that round-trips.
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", precision, k);
    double back = 0.0;
    std::from_chars(shorter, shorter + std::char_traits<char>::length(shorter), back);
    if (back == k) return shorter;
  }
  return buf;
}

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
  struct Statement {
    RawComplex lhs, rhs;
    double k_forward;
    std::optional<double> k_backward;
    int line;
  };
  std::vector<Statement> statements;
  std::vector<std::string> species;

  auto note_species = [&](const RawComplex& c) {
    for (const auto& t : c.terms)
      if (std::find(species.begin(), species.end(), t.species) == species.end())
        species.push_back(t.species);
  };

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string_view line =
        text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    ++line_no;
    LineParser p(line, line_no);
    if (!p.at_end()) {
      Statement st{p.complex(), {}, 0.0, std::nullopt, line_no};
      bool reversible = false;
      if (p.consume("<->")) {
        reversible = true;
      } else if (!p.consume("->")) {
        p.fail("expected '->' or '<->'");
      }
      st.rhs = p.complex();
      if (!p.consume("@")) p.fail("expected '@' before rate constants");
      st.k_forward = p.rate();
      if (reversible) {
        if (!p.consume(",")) p.fail("reversible reaction needs two rate constants");
        st.k_backward = p.rate();
      }
      if (!p.at_end()) p.fail("unexpected trailing input");
      note_species(st.lhs);
      note_species(st.rhs);
      statements.push_back(std::move(st));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (statements.empty()) throw ParseError("no reactions", line_no, 1);

  std::vector<Complex> complexes;
  auto complex_index = [&](const RawComplex& raw) {
    Complex c{std::vector<int>(species.size(), 0)};
    for (const auto& t : raw.terms) {
      const auto it = std::find(species.begin(), species.end(), t.species);
      c.stoich[static_cast<std::size_t>(it - species.begin())] += t.coefficient;
    }
    const auto found = std::find(complexes.begin(), complexes.end(), c);
    if (found != complexes.end()) return static_cast<std::size_t>(found - complexes.begin());
    complexes.push_back(std::move(c));
    return complexes.size() - 1;
  };

  std::vector<Reaction> reactions;
  auto add = [&](std::size_t from, std::size_t to, double k, const Statement& st, int column) {
    if (from == to) throw ParseError("reactant equals product", st.line, column);
    for (const auto& r : reactions)
      if (r.reactant == from && r.product == to)
        throw ParseError("duplicate reaction", st.line, column);
    reactions.push_back({from, to, k, Kinetics::mass_action()});
  };
  for (const auto& st : statements) {
    const std::size_t a = complex_index(st.lhs);
    const std::size_t b = complex_index(st.rhs);
    add(a, b, st.k_forward, st, st.lhs.column);
    if (st.k_backward) add(b, a, *st.k_backward, st, st.rhs.column);
  }
  return ReactionNetwork(std::move(species), std::move(complexes), std::move(reactions));
}

namespace {

std::string complex_to_dsl(const Complex& c, const std::vector<Species>& species) {
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < c.stoich.size(); ++i) {
    if (c.stoich[i] == 0) continue;
    if (!first) out << " + ";
    if (c.stoich[i] != 1) out << c.stoich[i];
    out << species[i].name;
    first = false;
  }
  if (first) out << '0';
  return out.str();
}

}  // namespace

std::string to_dsl(const ReactionNetwork& net) {
  std::ostringstream out;
  for (const auto& rx : net.reactions()) {
    out << complex_to_dsl(net.complexes()[rx.reactant], net.species()) << " -> "
        << complex_to_dsl(net.complexes()[rx.product], net.species()) << " @ "
        << format_rate(rx.rate_constant) << '\n';
  }
  return out.str();
}

}  // namespace slackcme
