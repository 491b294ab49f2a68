#pragma once

#include <string_view>

#include "palm/ast.hpp"

namespace palm {

/// Parses and resolves a PALM-J program.
///
/// Node ids are assigned in creation order (children before parents, starting
/// at 1), so re-parsing a pretty-printed program reproduces the same ids.
/// Compound assignments and `++`/`--` are desugared into plain assignments.
/// Throws SyntaxError, ResolveError or TypeError.
SubjectProgram parse(std::string_view source);

/// Parses without running the resolve pass.
SubjectProgram parseUnresolved(std::string_view source);

/// Parses a standalone expression (no resolution). Used by tooling and tests.
ExprPtr parseExpression(std::string_view source);

/// Runs name resolution and type checking, filling `program.exprTypes`.
void resolve(SubjectProgram& program);

}  // namespace palm
