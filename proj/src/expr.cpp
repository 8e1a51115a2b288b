#include "uninet/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "uninet/errors.hpp"

namespace uninet {

LogicExpr LogicExpr::input(std::size_t index) {
  LogicExpr e;
  e.kind_ = Kind::Input;
  e.index_ = index;
  return e;
}

LogicExpr LogicExpr::constant(bool value) {
  LogicExpr e;
  e.kind_ = value ? Kind::True : Kind::False;
  return e;
}

LogicExpr LogicExpr::binary(double alpha, LogicExpr left, LogicExpr right,
                            double tolerance) {
  return binary(classify_alpha(alpha, tolerance), alpha, std::move(left),
                std::move(right));
}

LogicExpr LogicExpr::binary(OperatorKind kind, double alpha, LogicExpr left,
                            LogicExpr right) {
  LogicExpr e;
  e.kind_ = Kind::Binary;
  e.op_ = kind;
  e.alpha_ = alpha;
  e.children_.push_back(std::move(left));
  e.children_.push_back(std::move(right));
  return e;
}

LogicExpr LogicExpr::negate(LogicExpr child) {
  LogicExpr e;
  e.kind_ = Kind::Not;
  e.children_.push_back(std::move(child));
  return e;
}

std::size_t LogicExpr::leaf_count() const {
  if (kind_ == Kind::Input) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

std::size_t LogicExpr::binary_depth() const {
  std::size_t d = 0;
  for (const auto& c : children_) d = std::max(d, c.binary_depth());
  return d + (kind_ == Kind::Binary ? 1 : 0);
}

std::size_t LogicExpr::max_input_index() const {
  std::size_t m = kind_ == Kind::Input ? index_ : 0;
  for (const auto& c : children_) m = std::max(m, c.max_input_index());
  return m;
}

bool LogicExpr::has_inputs() const {
  if (kind_ == Kind::Input) return true;
  return std::any_of(children_.begin(), children_.end(),
                     [](const LogicExpr& c) { return c.has_inputs(); });
}

double LogicExpr::evaluate(std::span<const double> truth) const {
  switch (kind_) {
    case Kind::Input:
      if (index_ >= truth.size()) {
        throw ContractError("expression references input " +
                            std::to_string(index_) + " of " +
                            std::to_string(truth.size()));
      }
      return truth[index_];
    case Kind::True:
      return 1.0;
    case Kind::False:
      return 0.0;
    case Kind::Not:
      return 1.0 - children_[0].evaluate(truth);
    case Kind::Binary:
      return binary_op_crisp(children_[0].evaluate(truth),
                             children_[1].evaluate(truth), alpha_);
  }
  return 0.0;
}

namespace {

std::string op_text(const LogicExpr& e) {
  if (e.op() != OperatorKind::Other) return std::string(operator_name(e.op()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "op[%.2f]", e.alpha());
  return buf;
}

std::string render_impl(const LogicExpr& e, std::span<const std::string> names);

std::string operand(const LogicExpr& e, std::span<const std::string> names) {
  switch (e.kind()) {
    case LogicExpr::Kind::Input:
    case LogicExpr::Kind::True:
    case LogicExpr::Kind::False:
      return render_impl(e, names);
    default:
      return "(" + render_impl(e, names) + ")";
  }
}

std::string render_impl(const LogicExpr& e, std::span<const std::string> names) {
  switch (e.kind()) {
    case LogicExpr::Kind::Input:
      if (!names.empty() && e.index() < names.size()) {
        return "(" + names[e.index()] + ")";
      }
      return "(" + std::to_string(e.index()) + ")";
    case LogicExpr::Kind::True:
      return "1";
    case LogicExpr::Kind::False:
      return "0";
    case LogicExpr::Kind::Not:
      return "1-" + operand(e.child(), names);
    case LogicExpr::Kind::Binary:
      return operand(e.left(), names) + " " + op_text(e) + " " +
             operand(e.right(), names);
  }
  return {};
}

class Parser {
 public:
  Parser(std::string_view text, double tolerance)
      : text_(text), tolerance_(tolerance) {}

  LogicExpr parse() {
    LogicExpr e = expr();
    if (pos_ != text_.size()) fail("trailing characters");
    return e;
  }

 private:
  LogicExpr expr() {
    LogicExpr left = operand();
    if (pos_ < text_.size() && text_[pos_] == ' ') {
      ++pos_;
      auto [kind, alpha] = opname();
      expect(' ');
      LogicExpr right = operand();
      return LogicExpr::binary(kind, alpha, std::move(left), std::move(right));
    }
    return left;
  }

  LogicExpr operand() {
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (c == '1' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
      pos_ += 2;
      return LogicExpr::negate(operand());
    }
    if (c == '1' || c == '0') {
      ++pos_;
      return LogicExpr::constant(c == '1');
    }
    if (c != '(') fail("expected '(' or a constant");
    ++pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    if (end > pos_ && end < text_.size() && text_[end] == ')') {
      const auto index = std::stoull(std::string(text_.substr(pos_, end - pos_)));
      pos_ = end + 1;
      return LogicExpr::input(index);
    }
    LogicExpr inner = expr();
    expect(')');
    return inner;
  }

  std::pair<OperatorKind, double> opname() {
    for (auto kind : {OperatorKind::Disjunction, OperatorKind::Conjunction,
                      OperatorKind::Aggregative}) {
      const auto name = operator_name(kind);
      if (text_.substr(pos_, name.size()) == name) {
        pos_ += name.size();
        return {kind, canonical_alpha(kind)};
      }
    }
    if (text_.substr(pos_, 3) == "op[") {
      pos_ += 3;
      const auto close = text_.find(']', pos_);
      if (close == std::string_view::npos) fail("unterminated op[");
      const std::string number(text_.substr(pos_, close - pos_));
      std::size_t used = 0;
      double alpha = 0;
      try {
        alpha = std::stod(number, &used);
      } catch (const std::exception&) {
        fail("bad alpha");
      }
      if (used != number.size()) fail("bad alpha");
      pos_ = close + 1;
      (void)tolerance_;
      return {OperatorKind::Other, alpha};
    }
    fail("unknown operator");
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("cannot parse expression at offset " + std::to_string(pos_) +
                    ": " + what);
  }

  std::string_view text_;
  double tolerance_;
  std::size_t pos_ = 0;
};

}  // namespace

bool same_shape(const LogicExpr& a, const LogicExpr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case LogicExpr::Kind::Input:
      return a.index() == b.index();
    case LogicExpr::Kind::True:
    case LogicExpr::Kind::False:
      return true;
    case LogicExpr::Kind::Not:
      return same_shape(a.child(), b.child());
    case LogicExpr::Kind::Binary:
      if (a.op() != b.op()) return false;
      if (a.op() == OperatorKind::Other &&
          std::lround(a.alpha() * 100) != std::lround(b.alpha() * 100)) {
        return false;
      }
      return same_shape(a.left(), b.left()) && same_shape(a.right(), b.right());
  }
  return false;
}

std::string render(const LogicExpr& e, std::span<const std::string> leaf_names) {
  return render_impl(e, leaf_names);
}

LogicExpr parse_expression(std::string_view text, double tolerance) {
  return Parser(text, tolerance).parse();
}

nlohmann::json expr_to_json(const LogicExpr& e) {
  switch (e.kind()) {
    case LogicExpr::Kind::Input:
      return {{"type", "input"}, {"index", e.index()}};
    case LogicExpr::Kind::True:
      return {{"type", "true"}};
    case LogicExpr::Kind::False:
      return {{"type", "false"}};
    case LogicExpr::Kind::Not:
      return {{"type", "not"}, {"child", expr_to_json(e.child())}};
    case LogicExpr::Kind::Binary:
      return {{"type", "binary"},
              {"op", std::string(operator_name(e.op()))},
              {"alpha", e.alpha()},
              {"left", expr_to_json(e.left())},
              {"right", expr_to_json(e.right())}};
  }
  return {};
}

}  // namespace uninet
