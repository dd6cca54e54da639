// Fixed Edinburgh operator table for the supported subset.
#pragma once

#include <string>
#include <vector>

namespace prodbg {

enum class OpType { XFX, XFY, YFX, FY, FX };

struct OpDef {
  std::string name;
  int prec;
  OpType type;
};

// Table lookups; nullptr when the name is not an operator.
const OpDef* infix_op(const std::string& name);
const OpDef* prefix_op(const std::string& name);

// Binary operators available to the mutation DSL: every infix operator except
// the clause neck and the comma.
const std::vector<OpDef>& dsl_binary_ops();
// Prefix operators available to the mutation DSL.
const std::vector<OpDef>& dsl_prefix_ops();

bool is_comparison_op(const std::string& name);
const std::vector<std::string>& comparison_ops();

}  // namespace prodbg
