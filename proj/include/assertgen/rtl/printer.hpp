// Verilog pretty-printer. Output re-parses to a structurally equal tree.
#pragma once

#include <string>

#include "assertgen/rtl/ast.hpp"

namespace assertgen::rtl {

std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);
std::string print_item(const ModuleItem& item, int indent = 0);
std::string print_module(const Module& m);
std::string print_unit(const SourceUnit& unit);

} // namespace assertgen::rtl
