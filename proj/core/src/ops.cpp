#include "prodbg/ops.hpp"

#include <algorithm>

namespace prodbg {

namespace {

const std::vector<OpDef>& infix_table() {
  static const std::vector<OpDef> t = {
      {":-", 1200, OpType::XFX}, {";", 1100, OpType::XFY},
      {"->", 1050, OpType::XFY}, {",", 1000, OpType::XFY},
      {"=", 700, OpType::XFX},   {"\\=", 700, OpType::XFX},
      {"==", 700, OpType::XFX},  {"\\==", 700, OpType::XFX},
      {"is", 700, OpType::XFX},  {"=:=", 700, OpType::XFX},
      {"=\\=", 700, OpType::XFX}, {"<", 700, OpType::XFX},
      {">", 700, OpType::XFX},   {"=<", 700, OpType::XFX},
      {">=", 700, OpType::XFX},  {"+", 500, OpType::YFX},
      {"-", 500, OpType::YFX},   {"*", 400, OpType::YFX},
      {"/", 400, OpType::YFX},   {"mod", 400, OpType::YFX},
      {"//", 400, OpType::YFX},
  };
  return t;
}

const std::vector<OpDef>& prefix_table() {
  static const std::vector<OpDef> t = {
      {":-", 1200, OpType::FX},
      {"\\+", 900, OpType::FY},
      {"-", 200, OpType::FY},
  };
  return t;
}

}  // namespace

const OpDef* infix_op(const std::string& name) {
  for (const auto& d : infix_table())
    if (d.name == name) return &d;
  return nullptr;
}

const OpDef* prefix_op(const std::string& name) {
  for (const auto& d : prefix_table())
    if (d.name == name) return &d;
  return nullptr;
}

const std::vector<OpDef>& dsl_binary_ops() {
  static const std::vector<OpDef> t = [] {
    std::vector<OpDef> out;
    for (const auto& d : infix_table())
      if (d.name != ":-" && d.name != ",") out.push_back(d);
    return out;
  }();
  return t;
}

const std::vector<OpDef>& dsl_prefix_ops() {
  static const std::vector<OpDef> t = {
      {"\\+", 900, OpType::FY},
      {"-", 200, OpType::FY},
  };
  return t;
}

const std::vector<std::string>& comparison_ops() {
  static const std::vector<std::string> t = {"<",  ">",   "=<",  ">=",
                                             "=:=", "=\\=", "==", "\\==",
                                             "=",  "\\="};
  return t;
}

bool is_comparison_op(const std::string& name) {
  const auto& t = comparison_ops();
  return std::find(t.begin(), t.end(), name) != t.end();
}

}  // namespace prodbg
