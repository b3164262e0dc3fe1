#include "sexpr.hpp"

#include <cctype>

namespace uuvnav::hddl {

ParseError::ParseError(const std::string& message, SourcePos pos)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                         ": " + message),
      pos_(pos),
      detail_(message) {}

namespace detail {

namespace {

bool symbol_char(unsigned char c) {
  if (std::isalnum(c)) return true;
  switch (c) {
    case '-': case '_': case '?': case ':': case '=': case '<': case '>':
    case '.': case '+': case '*': case '/': case '!': case '@': case '^':
      return true;
    default:
      return c >= 0x80;  // UTF-8 continuation of identifiers
  }
}

}  // namespace

SExpr read_sexpr(std::string_view text) {
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };

  std::vector<SExpr> stack;
  std::optional<SExpr> top;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      advance();
      continue;
    }
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }
    const SourcePos pos{line, col};
    if (c == ')' && stack.empty()) throw ParseError("unbalanced ')'", pos);
    if (top) throw ParseError("unexpected content after the closing parenthesis", pos);
    if (c == '(') {
      SExpr list;
      list.is_list = true;
      list.pos = pos;
      stack.push_back(std::move(list));
      advance();
      continue;
    }
    if (c == ')') {
      SExpr done = std::move(stack.back());
      stack.pop_back();
      advance();
      if (stack.empty()) {
        top = std::move(done);
      } else {
        stack.back().items.push_back(std::move(done));
      }
      continue;
    }
    if (!symbol_char(c)) {
      std::string shown = std::isprint(c) ? std::string(1, static_cast<char>(c))
                                          : "\\x" + std::to_string(static_cast<int>(c));
      throw ParseError("unexpected character '" + shown + "'", pos);
    }
    SExpr sym;
    sym.pos = pos;
    while (i < text.size() && symbol_char(static_cast<unsigned char>(text[i]))) {
      sym.symbol.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
      advance();
    }
    if (stack.empty()) throw ParseError("expected '(' at top level", pos);
    stack.back().items.push_back(std::move(sym));
  }
  if (!stack.empty()) {
    throw ParseError("unbalanced '(': list opened here is never closed", stack.back().pos);
  }
  if (!top) throw ParseError("empty input", SourcePos{line, col});
  return std::move(*top);
}

}  // namespace detail
}  // namespace uuvnav::hddl
