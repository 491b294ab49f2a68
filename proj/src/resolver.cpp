#include <map>
#include <set>
#include <vector>

#include "palm/builtins.hpp"
#include "palm/errors.hpp"
#include "palm/parser.hpp"

namespace palm {

namespace {

using K = SubjectType::Kind;

bool isTrueLiteral(const ExprPtr& e) {
  const auto* b = e ? e->as<BoolLit>() : nullptr;
  return b && b->value;
}

/// Java-style "can complete normally" for the statement forms of PALM-J.
bool canComplete(const Stmt& s) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ReturnStmt>) {
          return false;
        } else if constexpr (std::is_same_v<T, BlockStmt>) {
          for (const auto& st : n.stmts) {
            if (!canComplete(*st)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          if (!n.elseBranch) return true;
          return canComplete(*n.thenBranch) || canComplete(*n.elseBranch);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return !isTrueLiteral(n.cond);
        } else if constexpr (std::is_same_v<T, DoWhileStmt>) {
          return canComplete(*n.body) && !isTrueLiteral(n.cond);
        } else if constexpr (std::is_same_v<T, ForStmt>) {
          return !isTrueLiteral(n.cond);
        } else {
          return true;
        }
      },
      s.node);
}

class Resolver {
 public:
  explicit Resolver(SubjectProgram& prog) : prog_(prog) {}

  void run() {
    prog_.exprTypes.clear();
    std::set<std::string> names;
    for (const auto& fn : prog_.functions) {
      if (!names.insert(fn.name).second) throw ResolveError(fn.name, fn.pos, "duplicate function");
      if (isFreeBuiltinName(fn.name)) throw ResolveError(fn.name, fn.pos, "function redefines builtin");
    }
    std::set<std::string> fieldNames;
    for (const auto& field : prog_.fields) {
      if (!fieldNames.insert(field.name).second) {
        throw ResolveError(field.name, field.pos, "duplicate field");
      }
      if (field.init) {
        SubjectType t = expr(*field.init);
        requireAssignable(field.type, t, field.init->pos);
      }
      fields_[field.name] = field.type;
    }
    for (const auto& fn : prog_.functions) function(fn);
  }

 private:
  void function(const FunctionDecl& fn) {
    fn_ = &fn;
    scopes_.clear();
    scopes_.emplace_back();
    for (const auto& p : fn.params) declare(p.name, p.type, fn.pos);
    stmt(*fn.body);
    if (!fn.returnType.isVoid() && canComplete(*fn.body)) {
      throw TypeError(fn.pos, "missing return in '" + fn.name + "'", toString(fn.returnType));
    }
  }

  void declare(const std::string& name, SubjectType type, SourcePos pos) {
    if (fields_.count(name) > 0) throw ResolveError(name, pos, "local shadows field");
    for (const auto& scope : scopes_) {
      if (scope.count(name) > 0) throw ResolveError(name, pos, "duplicate local");
    }
    scopes_.back()[name] = type;
  }

  SubjectType lookup(const std::string& name, SourcePos pos) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    auto f = fields_.find(name);
    if (f != fields_.end()) return f->second;
    throw ResolveError(name, pos);
  }

  static void requireAssignable(SubjectType to, SubjectType from, SourcePos pos) {
    if (!isAssignable(to, from)) throw TypeError(pos, toString(from), toString(to));
  }

  static void require(bool ok, SubjectType found, const std::string& expected, SourcePos pos) {
    if (!ok) throw TypeError(pos, toString(found), expected);
  }

  void condition(const ExprPtr& e) {
    SubjectType t = expr(*e);
    require(t == SubjectType::scalar(K::Boolean), t, "boolean", e->pos);
  }

  void stmt(const Stmt& s) {
    std::visit([&](const auto& n) { visitStmt(n, s); }, s.node);
  }

  void visitStmt(const DeclStmt& n, const Stmt& s) {
    if (n.init) requireAssignable(n.type, expr(*n.init), n.init->pos);
    declare(n.name, n.type, s.pos);
  }
  void visitStmt(const AssignStmt& n, const Stmt&) {
    SubjectType target = expr(*n.target);
    requireAssignable(target, expr(*n.value), n.value->pos);
  }
  void visitStmt(const IfStmt& n, const Stmt&) {
    condition(n.cond);
    scoped(*n.thenBranch);
    if (n.elseBranch) scoped(*n.elseBranch);
  }
  void visitStmt(const WhileStmt& n, const Stmt&) {
    condition(n.cond);
    scoped(*n.body);
  }
  void visitStmt(const DoWhileStmt& n, const Stmt&) {
    scoped(*n.body);
    condition(n.cond);
  }
  void visitStmt(const ForStmt& n, const Stmt&) {
    scopes_.emplace_back();
    if (n.init) stmt(*n.init);
    condition(n.cond);
    if (n.update) stmt(*n.update);
    scoped(*n.body);
    scopes_.pop_back();
  }
  void visitStmt(const ReturnStmt& n, const Stmt& s) {
    if (!fn_) return;
    if (fn_->returnType.isVoid()) {
      if (n.value) throw TypeError(n.value->pos, toString(expr(*n.value)), "no value in void function");
      return;
    }
    if (!n.value) throw TypeError(s.pos, "void", toString(fn_->returnType));
    requireAssignable(fn_->returnType, expr(*n.value), n.value->pos);
  }
  void visitStmt(const BlockStmt& n, const Stmt&) {
    scopes_.emplace_back();
    for (const auto& st : n.stmts) stmt(*st);
    scopes_.pop_back();
  }
  void visitStmt(const ExprStmt& n, const Stmt&) { expr(*n.expr); }
  void visitStmt(const AssertStmt& n, const Stmt&) { condition(n.cond); }

  void scoped(const Stmt& s) {
    scopes_.emplace_back();
    stmt(s);
    scopes_.pop_back();
  }

  SubjectType expr(const Expr& e) {
    SubjectType t = std::visit([&](const auto& n) { return visitExpr(n, e); }, e.node);
    if (e.id != kSyntheticNode) prog_.exprTypes[e.id] = t;
    return t;
  }

  SubjectType visitExpr(const IntLit&, const Expr&) { return SubjectType::scalar(K::Int); }
  SubjectType visitExpr(const DoubleLit&, const Expr&) { return SubjectType::scalar(K::Double); }
  SubjectType visitExpr(const BoolLit&, const Expr&) { return SubjectType::scalar(K::Boolean); }
  SubjectType visitExpr(const StringLit&, const Expr&) { return SubjectType::scalar(K::String); }
  SubjectType visitExpr(const CharLit&, const Expr&) { return SubjectType::scalar(K::Char); }
  SubjectType visitExpr(const VarRef& n, const Expr& e) { return lookup(n.name, e.pos); }

  SubjectType visitExpr(const Unary& n, const Expr& e) {
    SubjectType t = expr(*n.operand);
    if (n.op == UnaryOp::Not) {
      require(t == SubjectType::scalar(K::Boolean), t, "boolean", e.pos);
      return t;
    }
    require(t.isNumeric(), t, "numeric", e.pos);
    return t.kind == K::Double ? t : SubjectType::scalar(K::Int);
  }

  SubjectType visitExpr(const Binary& n, const Expr& e) {
    SubjectType l = expr(*n.lhs);
    SubjectType r = expr(*n.rhs);
    const SubjectType boolean = SubjectType::scalar(K::Boolean);
    auto arith = [&]() {
      require(l.isNumeric(), l, "numeric", n.lhs->pos);
      require(r.isNumeric(), r, "numeric", n.rhs->pos);
      return SubjectType::scalar(l.kind == K::Double || r.kind == K::Double ? K::Double : K::Int);
    };
    switch (n.op) {
      case BinaryOp::Add: {
        const SubjectType str = SubjectType::scalar(K::String);
        if (l == str || r == str) {
          require(!l.isArray && !l.isVoid(), l, "string operand", n.lhs->pos);
          require(!r.isArray && !r.isVoid(), r, "string operand", n.rhs->pos);
          return str;
        }
        return arith();
      }
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
        return arith();
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        arith();
        return boolean;
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        bool ok = (l.isNumeric() && r.isNumeric()) || (l == r && !l.isVoid());
        if (!ok) throw TypeError(e.pos, toString(r), toString(l));
        return boolean;
      }
      case BinaryOp::And:
      case BinaryOp::Or:
        require(l == boolean, l, "boolean", n.lhs->pos);
        require(r == boolean, r, "boolean", n.rhs->pos);
        return boolean;
    }
    return boolean;
  }

  std::vector<SubjectType> argTypes(const std::vector<ExprPtr>& args) {
    std::vector<SubjectType> out;
    for (const auto& a : args) out.push_back(expr(*a));
    return out;
  }

  static std::string signatureText(std::string_view name, const std::vector<SubjectType>& args) {
    std::string s(name);
    s += "(";
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (k > 0) s += ", ";
      s += toString(args[k]);
    }
    return s + ")";
  }

  SubjectType visitExpr(const Call& n, const Expr& e) {
    auto args = argTypes(n.args);
    if (const FunctionDecl* fn = prog_.findFunction(n.callee)) {
      if (fn->params.size() != args.size()) {
        throw TypeError(e.pos, signatureText(n.callee, args), std::to_string(fn->params.size()) + " arguments");
      }
      for (std::size_t k = 0; k < args.size(); ++k) requireAssignable(fn->params[k].type, args[k], n.args[k]->pos);
      return fn->returnType;
    }
    if (isFreeBuiltinName(n.callee)) {
      const BuiltinSignature* sig = resolveFreeFunction(n.callee, args);
      if (!sig) throw TypeError(e.pos, signatureText(n.callee, args), "a builtin overload");
      return sig->returnType;
    }
    throw ResolveError(n.callee, e.pos, "undeclared function");
  }

  SubjectType visitExpr(const MethodCall& n, const Expr& e) {
    SubjectType recv = expr(*n.receiver);
    require(recv == SubjectType::scalar(K::String), recv, "String receiver", n.receiver->pos);
    auto args = argTypes(n.args);
    if (!isStringMethodName(n.method)) throw ResolveError(n.method, e.pos, "unknown method");
    const BuiltinSignature* sig = resolveStringMethod(n.method, args);
    if (!sig) throw TypeError(e.pos, signatureText(n.method, args), "a String." + n.method + " overload");
    return sig->returnType;
  }

  SubjectType visitExpr(const Index& n, const Expr&) {
    SubjectType a = expr(*n.array);
    require(a.isArray, a, "array", n.array->pos);
    SubjectType i = expr(*n.index);
    requireAssignable(SubjectType::scalar(K::Int), i, n.index->pos);
    return a.element();
  }

  SubjectType visitExpr(const ArrayLen& n, const Expr&) {
    SubjectType a = expr(*n.array);
    require(a.isArray, a, "array", n.array->pos);
    return SubjectType::scalar(K::Int);
  }

  SubjectType visitExpr(const NewArray& n, const Expr&) {
    if (n.size) requireAssignable(SubjectType::scalar(K::Int), expr(*n.size), n.size->pos);
    for (const auto& el : n.elements) requireAssignable(n.elementType, expr(*el), el->pos);
    return SubjectType::arrayOf(n.elementType.kind);
  }

  SubjectProgram& prog_;
  const FunctionDecl* fn_ = nullptr;
  std::map<std::string, SubjectType> fields_;
  std::vector<std::map<std::string, SubjectType>> scopes_;
};

}  // namespace

void resolve(SubjectProgram& program) { Resolver(program).run(); }

}  // namespace palm
