#include "tsnsim/expr.hpp"

#include <cctype>
#include <cstdlib>

#include "tsnsim/time.hpp"

namespace tsnsim {

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::map<std::string, double>& vars)
      : text_(text), vars_(vars) {}

  double parse() {
    const double v = sum();
    skip_ws();
    TSNSIM_CHECK(pos_ == text_.size(),
                 "trailing characters in expression: " + text_);
    return v;
  }

 private:
  double sum() {
    double v = product();
    for (;;) {
      skip_ws();
      if (consume('+')) {
        v += product();
      } else if (consume('-')) {
        v -= product();
      } else {
        return v;
      }
    }
  }

  double product() {
    double v = factor();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        v *= factor();
      } else if (consume('/')) {
        const double d = factor();
        TSNSIM_CHECK(d != 0.0, "division by zero in expression: " + text_);
        v /= d;
      } else {
        return v;
      }
    }
  }

  double factor() {
    skip_ws();
    if (consume('-')) return -factor();
    if (consume('(')) {
      const double v = sum();
      skip_ws();
      TSNSIM_CHECK(consume(')'), "missing ')' in expression: " + text_);
      return v;
    }
    if (pos_ < text_.size() &&
        (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
         text_[pos_] == '.')) {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      TSNSIM_CHECK(end != begin, "bad number in expression: " + text_);
      pos_ += static_cast<std::size_t>(end - begin);
      return v;
    }
    // Identifier.
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    TSNSIM_CHECK(pos_ > start, "expected number, variable or '(' in: " + text_);
    const std::string name = text_.substr(start, pos_ - start);
    const auto it = vars_.find(name);
    TSNSIM_CHECK(it != vars_.end(),
                 "unknown variable '" + name + "' in expression: " + text_);
    return it->second;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& text_;
  const std::map<std::string, double>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

double eval_expr(const std::string& text,
                 const std::map<std::string, double>& vars) {
  TSNSIM_CHECK(!text.empty(), "empty expression");
  return Parser(text, vars).parse();
}

}  // namespace tsnsim
