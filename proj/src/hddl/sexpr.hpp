#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uuvnav/hddl.hpp"

namespace uuvnav::hddl::detail {

/// Node of the s-expression tree. Symbols are lower-cased on read.
struct SExpr {
  bool is_list = false;
  std::string symbol;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_symbol(std::string_view s) const { return !is_list && symbol == s; }
  bool empty_list() const { return is_list && items.empty(); }
};

/// Reads exactly one top-level expression; trailing content is an error.
SExpr read_sexpr(std::string_view text);

}  // namespace uuvnav::hddl::detail
