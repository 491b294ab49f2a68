#include "palm/rewrite.hpp"

namespace palm {

namespace {

ExprPtr child(const ExprPtr& e, const ExprRewriter& fn, bool& changed) {
  if (!e) return e;
  ExprPtr r = rewriteExpr(e, fn);
  if (r != e) changed = true;
  return r;
}

std::vector<ExprPtr> children(const std::vector<ExprPtr>& list, const ExprRewriter& fn, bool& changed) {
  std::vector<ExprPtr> out;
  out.reserve(list.size());
  for (const auto& e : list) out.push_back(child(e, fn, changed));
  return out;
}

}  // namespace

ExprPtr rewriteExpr(const ExprPtr& e, const ExprRewriter& fn) {
  if (ExprPtr r = fn(e)) return r;
  bool changed = false;
  Expr::Node node = std::visit(
      [&](const auto& n) -> Expr::Node {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          return Unary{n.op, child(n.operand, fn, changed)};
        } else if constexpr (std::is_same_v<T, Binary>) {
          ExprPtr l = child(n.lhs, fn, changed);
          ExprPtr r = child(n.rhs, fn, changed);
          return Binary{n.op, l, r};
        } else if constexpr (std::is_same_v<T, Call>) {
          return Call{n.callee, children(n.args, fn, changed)};
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          ExprPtr recv = child(n.receiver, fn, changed);
          return MethodCall{recv, n.method, children(n.args, fn, changed)};
        } else if constexpr (std::is_same_v<T, Index>) {
          ExprPtr a = child(n.array, fn, changed);
          ExprPtr i = child(n.index, fn, changed);
          return Index{a, i};
        } else if constexpr (std::is_same_v<T, ArrayLen>) {
          return ArrayLen{child(n.array, fn, changed)};
        } else if constexpr (std::is_same_v<T, NewArray>) {
          ExprPtr size = child(n.size, fn, changed);
          return NewArray{n.elementType, size, children(n.elements, fn, changed), n.hasInitializer};
        } else {
          return n;
        }
      },
      e->node);
  if (!changed) return e;
  return makeExpr(std::move(node), e->id, e->pos);
}

StmtPtr rewriteStmtExprs(const StmtPtr& s, const ExprRewriter& fn) {
  auto rw = [&](const ExprPtr& e) { return e ? rewriteExpr(e, fn) : e; };
  if (const auto* d = s->as<DeclStmt>()) return makeStmt(DeclStmt{d->type, d->name, rw(d->init)}, s->id, s->pos);
  if (const auto* a = s->as<AssignStmt>()) {
    ExprPtr target = rw(a->target);
    ExprPtr value = rw(a->value);
    return makeStmt(AssignStmt{target, value}, s->id, s->pos);
  }
  if (const auto* x = s->as<ExprStmt>()) return makeStmt(ExprStmt{rw(x->expr)}, s->id, s->pos);
  if (const auto* r = s->as<ReturnStmt>()) return makeStmt(ReturnStmt{rw(r->value)}, s->id, s->pos);
  if (const auto* a = s->as<AssertStmt>()) return makeStmt(AssertStmt{rw(a->cond), a->expected}, s->id, s->pos);
  return s;
}

StmtPtr renameInStmt(const StmtPtr& s, const std::map<std::string, std::string>& names) {
  StmtPtr out = rewriteStmtExprs(s, [&](const ExprPtr& e) -> ExprPtr {
    if (const auto* v = e->as<VarRef>()) {
      auto it = names.find(v->name);
      if (it != names.end()) return makeExpr(VarRef{it->second}, e->id, e->pos);
    }
    return nullptr;
  });
  if (const auto* d = out->as<DeclStmt>()) {
    auto it = names.find(d->name);
    if (it != names.end()) return makeStmt(DeclStmt{d->type, it->second, d->init}, out->id, out->pos);
  }
  return out;
}

std::vector<ExprPtr> directExprs(const Stmt& s) {
  return std::visit(
      [](const auto& n) -> std::vector<ExprPtr> {
        using T = std::decay_t<decltype(n)>;
        std::vector<ExprPtr> out;
        auto add = [&](const ExprPtr& e) {
          if (e) out.push_back(e);
        };
        if constexpr (std::is_same_v<T, DeclStmt>) {
          add(n.init);
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          add(n.target);
          add(n.value);
        } else if constexpr (std::is_same_v<T, IfStmt> || std::is_same_v<T, WhileStmt> ||
                             std::is_same_v<T, DoWhileStmt> || std::is_same_v<T, ForStmt> ||
                             std::is_same_v<T, AssertStmt>) {
          add(n.cond);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          add(n.value);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          add(n.expr);
        }
        return out;
      },
      s.node);
}

void forEachStmt(const Stmt& s, const std::function<void(const Stmt&)>& fn) {
  fn(s);
  auto sub = [&](const StmtPtr& p) {
    if (p) forEachStmt(*p, fn);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IfStmt>) {
          sub(n.thenBranch);
          sub(n.elseBranch);
        } else if constexpr (std::is_same_v<T, WhileStmt> || std::is_same_v<T, DoWhileStmt>) {
          sub(n.body);
        } else if constexpr (std::is_same_v<T, ForStmt>) {
          sub(n.init);
          sub(n.update);
          sub(n.body);
        } else if constexpr (std::is_same_v<T, BlockStmt>) {
          for (const auto& st : n.stmts) sub(st);
        }
      },
      s.node);
}

void forEachUnconditionalCall(const Expr& e, const std::function<void(const Expr&)>& fn) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          forEachUnconditionalCall(*n.operand, fn);
        } else if constexpr (std::is_same_v<T, Binary>) {
          forEachUnconditionalCall(*n.lhs, fn);
          if (n.op != BinaryOp::And && n.op != BinaryOp::Or) forEachUnconditionalCall(*n.rhs, fn);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) forEachUnconditionalCall(*a, fn);
          fn(e);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          forEachUnconditionalCall(*n.receiver, fn);
          for (const auto& a : n.args) forEachUnconditionalCall(*a, fn);
        } else if constexpr (std::is_same_v<T, Index>) {
          forEachUnconditionalCall(*n.array, fn);
          forEachUnconditionalCall(*n.index, fn);
        } else if constexpr (std::is_same_v<T, ArrayLen>) {
          forEachUnconditionalCall(*n.array, fn);
        } else if constexpr (std::is_same_v<T, NewArray>) {
          if (n.size) forEachUnconditionalCall(*n.size, fn);
          for (const auto& a : n.elements) forEachUnconditionalCall(*a, fn);
        }
      },
      e.node);
}

bool containsExpr(const Expr& hay, const Expr* needle) {
  bool found = false;
  forEachSubExpr(hay, [&](const Expr& x) {
    if (&x == needle) found = true;
  });
  return found;
}

}  // namespace palm
