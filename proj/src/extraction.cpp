#include "palm/extraction.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "palm/errors.hpp"
#include "palm/printer.hpp"
#include "palm/rewrite.hpp"

namespace palm {

std::string ExtractionConfig::entryName(const SubjectProgram& program) const {
  if (!entryFunction.empty()) return entryFunction;
  if (program.functions.empty()) throw ExtractionError("program declares no functions");
  return program.functions.front().name;
}

std::set<std::string> ExtractionConfig::effectiveSymbolic(const SubjectProgram& program) const {
  std::set<std::string> out = symbolicFunctions;
  out.insert(entryName(program));
  return out;
}

void ExtractionConfig::validate(const SubjectProgram& program) const {
  if (maxPaths < 1) throw ExtractionError("maxPaths must be at least 1");
  if (loopBound < 0 || recursionBound < 0) throw ExtractionError("bounds must be non-negative");
  std::string entry = entryName(program);
  if (!program.findFunction(entry)) throw ExtractionError("entry function '" + entry + "' is not declared");
  for (const auto& name : symbolicFunctions) {
    if (!program.findFunction(name)) throw CalleeNotFound(name);
  }
}

nlohmann::json toJson(const ExtractionConfig& cfg) {
  return {{"loopBound", cfg.loopBound},
          {"recursionBound", cfg.recursionBound},
          {"maxPaths", cfg.maxPaths},
          {"entryFunction", cfg.entryFunction},
          {"symbolicFunctions", cfg.symbolicFunctions}};
}

ExtractionConfig configFromJson(const nlohmann::json& j) {
  ExtractionConfig cfg;
  if (j.is_null()) return cfg;
  cfg.loopBound = j.value("loopBound", cfg.loopBound);
  cfg.recursionBound = j.value("recursionBound", cfg.recursionBound);
  cfg.maxPaths = j.value("maxPaths", cfg.maxPaths);
  cfg.entryFunction = j.value("entryFunction", std::string());
  if (j.contains("symbolicFunctions")) {
    cfg.symbolicFunctions = j.at("symbolicFunctions").get<std::set<std::string>>();
  }
  return cfg;
}

std::vector<std::pair<NodeId, bool>> PathVariant::outcomes() const {
  std::vector<std::pair<NodeId, bool>> out;
  for (const auto& s : steps) {
    if (const auto* a = s.assertion()) out.emplace_back(s.provenance, a->expected);
  }
  return out;
}

std::vector<std::string> PathVariant::assertTexts() const {
  std::vector<std::string> out;
  for (const auto& s : steps) {
    if (const auto* a = s.assertion(); a && !s.hidden) out.push_back(assertText(*a));
  }
  return out;
}

namespace {

enum class Ending { Normal, Returned, BoundExceeded };
using Steps = std::vector<Step>;
using Sink = std::function<bool(Steps, Ending)>;
using Cont = std::function<bool(Steps)>;

Steps with(Steps steps, Step s) {
  steps.push_back(std::move(s));
  return steps;
}

Step assertStep(const ExprPtr& cond, bool expected) {
  return {makeStmt(AssertStmt{cond, expected}, kSyntheticNode, cond->pos), cond->id, false};
}

/// Depth-first path walker over one function body. Each callback returns
/// false to stop the whole enumeration.
class IntraWalker {
 public:
  IntraWalker(int loopBound, Sink sink) : loopBound_(loopBound), sink_(std::move(sink)) {}

  void run(const FunctionDecl& fn) {
    walk(fn.body, {}, [this](Steps s) { return sink_(std::move(s), Ending::Normal); });
  }

 private:
  bool walk(const StmtPtr& s, Steps st, const Cont& k) {
    if (const auto* b = s->as<BlockStmt>()) return seq(b->stmts, 0, std::move(st), k);
    if (const auto* i = s->as<IfStmt>()) {
      if (!walk(i->thenBranch, with(st, assertStep(i->cond, true)), k)) return false;
      Steps f = with(std::move(st), assertStep(i->cond, false));
      return i->elseBranch ? walk(i->elseBranch, std::move(f), k) : k(std::move(f));
    }
    if (const auto* w = s->as<WhileStmt>()) return loop(w->cond, {w->body}, 0, std::move(st), k);
    if (const auto* d = s->as<DoWhileStmt>()) {
      std::vector<StmtPtr> body{d->body};
      return walk(d->body, std::move(st), [&, body](Steps after) {
        return loop(d->cond, body, 0, std::move(after), k);
      });
    }
    if (const auto* f = s->as<ForStmt>()) {
      std::vector<StmtPtr> body{f->body};
      if (f->update) body.push_back(f->update);
      auto rest = [&, body](Steps after) { return loop(f->cond, body, 0, std::move(after), k); };
      return f->init ? walk(f->init, std::move(st), rest) : rest(std::move(st));
    }
    if (s->is<ReturnStmt>()) return sink_(with(std::move(st), {s, s->id, false}), Ending::Returned);
    return k(with(std::move(st), {s, s->id, false}));
  }

  bool seq(const std::vector<StmtPtr>& stmts, std::size_t i, Steps st, const Cont& k) {
    if (i == stmts.size()) return k(std::move(st));
    return walk(stmts[i], std::move(st),
                [&, i](Steps after) { return seq(stmts, i + 1, std::move(after), k); });
  }

  // Exit after j iterations is explored before iteration j+1.
  bool loop(const ExprPtr& cond, const std::vector<StmtPtr>& body, int j, Steps st, const Cont& k) {
    if (!k(with(st, assertStep(cond, false)))) return false;
    if (j == loopBound_) return sink_(std::move(st), Ending::BoundExceeded);
    return seq(body, 0, with(std::move(st), assertStep(cond, true)),
               [&, j](Steps after) { return loop(cond, body, j + 1, std::move(after), k); });
  }

  int loopBound_;
  Sink sink_;
};

std::string baseName(const std::string& name) { return name.substr(0, name.find('#')); }

class Inliner {
 public:
  Inliner(const SubjectProgram& program, const ExtractionConfig& cfg)
      : program_(program), cfg_(cfg), symbolic_(cfg.effectiveSymbolic(program)) {}

  bool process(const Steps& steps, Ending ending, const Sink& sink) {
    std::vector<std::string> stack{cfg_.entryName(program_)};
    return seq(steps, 0, {}, stack, [&](Steps out) { return sink(std::move(out), ending); }, sink);
  }

  bool calleeTruncated() const { return calleeTruncated_; }

 private:
  struct CalleePath {
    Steps steps;
    Ending ending;
  };

  bool seq(const Steps& steps, std::size_t i, Steps out, const std::vector<std::string>& stack,
           const Cont& k, const Sink& sink) {
    if (i == steps.size()) return k(std::move(out));
    return step(steps[i], std::move(out), stack,
                [&, i](Steps o) { return seq(steps, i + 1, std::move(o), stack, k, sink); }, sink);
  }

  const Expr* firstSymbolicCall(const Stmt& s) const {
    const Expr* found = nullptr;
    for (const auto& e : directExprs(s)) {
      forEachUnconditionalCall(*e, [&](const Expr& call) {
        if (!found && symbolic_.count(call.as<Call>()->callee) > 0) found = &call;
      });
      if (found) break;
    }
    return found;
  }

  bool step(const Step& st, Steps out, const std::vector<std::string>& stack, const Cont& k,
            const Sink& sink) {
    const Expr* call = firstSymbolicCall(*st.stmt);
    if (!call) return k(with(std::move(out), st));

    StmtPtr stmt = hoistStmt(st.stmt, call, out);
    const auto& c = *call->as<Call>();
    auto depth = std::count(stack.begin(), stack.end(), c.callee);
    if (depth > cfg_.recursionBound) return sink(std::move(out), Ending::BoundExceeded);

    const FunctionDecl& callee = *program_.findFunction(c.callee);
    for (const auto& path : calleePaths(callee)) {
      std::string token = "#" + std::to_string(++tokens_);
      std::map<std::string, std::string> fresh;
      for (const auto& p : callee.params) fresh[p.name] = p.name + token;
      for (const auto& s : path.steps) {
        if (const auto* d = s.stmt->as<DeclStmt>()) fresh[d->name] = d->name + token;
      }

      Steps o = out;
      for (std::size_t i = 0; i < callee.params.size(); ++i) {
        const auto& p = callee.params[i];
        o.push_back({makeStmt(DeclStmt{p.type, fresh[p.name], c.args[i]}, kSyntheticNode, call->pos),
                     c.args[i]->id, false});
      }

      std::string result = callee.name + "_result" + token;
      Steps body;
      for (const auto& s : path.steps) {
        Step renamed{renameInStmt(s.stmt, fresh), s.provenance, s.hidden};
        if (const auto* r = renamed.stmt->as<ReturnStmt>()) {
          if (r->value) {
            body.push_back({makeStmt(DeclStmt{callee.returnType, result, r->value}, kSyntheticNode,
                                     renamed.stmt->pos),
                            s.provenance, false});
          }
          continue;
        }
        body.push_back(std::move(renamed));
      }
      if (path.ending == Ending::Normal && !callee.returnType.isVoid()) {
        body.push_back({makeStmt(DeclStmt{callee.returnType, result, nullptr}), kSyntheticNode, false});
      }

      std::vector<std::string> inner = stack;
      inner.push_back(callee.name);
      Cont after;
      if (path.ending == Ending::BoundExceeded) {
        after = [&](Steps o2) { return sink(std::move(o2), Ending::BoundExceeded); };
      } else {
        after = [&, stmt, result](Steps o2) {
          std::optional<Step> next = replaceCall(st, stmt, call, result);
          if (!next) return k(std::move(o2));
          return step(*next, std::move(o2), stack, k, sink);
        };
      }
      if (!seq(body, 0, std::move(o), inner, after, sink)) return false;
    }
    return true;
  }

  /// Statement with the call replaced by its result variable, or nothing when
  /// the statement was just the (void) call.
  std::optional<Step> replaceCall(const Step& original, const StmtPtr& stmt, const Expr* call,
                                  const std::string& result) const {
    if (const auto* x = stmt->as<ExprStmt>(); x && x->expr.get() == call) return std::nullopt;
    StmtPtr replaced = rewriteStmtExprs(stmt, [&](const ExprPtr& e) -> ExprPtr {
      if (e.get() == call) return makeExpr(VarRef{result}, e->id, e->pos);
      return nullptr;
    });
    return Step{replaced, original.provenance, original.hidden};
  }

  const std::vector<CalleePath>& calleePaths(const FunctionDecl& fn) {
    auto it = memo_.find(fn.name);
    if (it != memo_.end()) return it->second;
    std::vector<CalleePath> paths;
    IntraWalker walker(cfg_.loopBound, [&](Steps s, Ending e) {
      if (static_cast<int>(paths.size()) >= cfg_.maxPaths) {
        calleeTruncated_ = true;
        return false;
      }
      paths.push_back({std::move(s), e});
      return true;
    });
    walker.run(fn);
    return memo_.emplace(fn.name, std::move(paths)).first->second;
  }

  bool isVolatile(const Expr& e) const {
    bool v = false;
    forEachSubExpr(e, [&](const Expr& x) {
      if (const auto* r = x.as<VarRef>()) {
        if (program_.findField(r->name)) v = true;
      } else if (x.is<Index>()) {
        v = true;
      } else if (const auto* c = x.as<Call>()) {
        if (program_.findFunction(c->callee)) v = true;
      }
    });
    return v;
  }

  /// Moves a volatile operand evaluated before the spliced call into a
  /// temporary so that the callee cannot observe a reordered evaluation.
  ExprPtr hoistIfVolatile(const ExprPtr& e, Steps& pre) {
    if (!isVolatile(*e)) return e;
    auto type = program_.exprTypes.find(e->id);
    if (type == program_.exprTypes.end()) return e;
    std::string name = "tmp#" + std::to_string(++tokens_);
    pre.push_back({makeStmt(DeclStmt{type->second, name, e}, kSyntheticNode, e->pos), e->id, false});
    return makeExpr(VarRef{name}, e->id, e->pos);
  }

  /// Hoists operands of `list` evaluated before the element containing `call`.
  std::vector<ExprPtr> hoistList(const std::vector<ExprPtr>& list, const Expr* call, Steps& pre,
                                 bool& found) {
    std::vector<ExprPtr> out;
    for (const auto& e : list) {
      if (found) {
        out.push_back(e);
      } else if (containsExpr(*e, call)) {
        found = true;
        out.push_back(hoist(e, call, pre));
      } else {
        out.push_back(hoistIfVolatile(e, pre));
      }
    }
    return out;
  }

  ExprPtr hoist(const ExprPtr& e, const Expr* call, Steps& pre) {
    if (e.get() == call) return e;
    bool found = false;
    Expr::Node node = std::visit(
        [&](const auto& n) -> Expr::Node {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Unary>) {
            return Unary{n.op, hoist(n.operand, call, pre)};
          } else if constexpr (std::is_same_v<T, Binary>) {
            auto ops = hoistList({n.lhs, n.rhs}, call, pre, found);
            return Binary{n.op, ops[0], ops[1]};
          } else if constexpr (std::is_same_v<T, Call>) {
            return Call{n.callee, hoistList(n.args, call, pre, found)};
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            std::vector<ExprPtr> all{n.receiver};
            all.insert(all.end(), n.args.begin(), n.args.end());
            all = hoistList(all, call, pre, found);
            return MethodCall{all[0], n.method, std::vector<ExprPtr>(all.begin() + 1, all.end())};
          } else if constexpr (std::is_same_v<T, Index>) {
            auto ops = hoistList({n.array, n.index}, call, pre, found);
            return Index{ops[0], ops[1]};
          } else if constexpr (std::is_same_v<T, ArrayLen>) {
            return ArrayLen{hoist(n.array, call, pre)};
          } else if constexpr (std::is_same_v<T, NewArray>) {
            if (n.size) return NewArray{n.elementType, hoist(n.size, call, pre), {}, false};
            return NewArray{n.elementType, nullptr, hoistList(n.elements, call, pre, found), true};
          } else {
            return n;
          }
        },
        e->node);
    return makeExpr(std::move(node), e->id, e->pos);
  }

  StmtPtr hoistStmt(const StmtPtr& s, const Expr* call, Steps& pre) {
    if (const auto* a = s->as<AssignStmt>()) {
      if (containsExpr(*a->target, call)) {
        return makeStmt(AssignStmt{hoist(a->target, call, pre), a->value}, s->id, s->pos);
      }
      ExprPtr target = a->target;
      if (const auto* ix = target->as<Index>()) {
        ExprPtr array = hoistIfVolatile(ix->array, pre);
        ExprPtr index = hoistIfVolatile(ix->index, pre);
        target = makeExpr(Index{array, index}, target->id, target->pos);
      }
      return makeStmt(AssignStmt{target, hoist(a->value, call, pre)}, s->id, s->pos);
    }
    return rewriteStmtExprs(s, [&](const ExprPtr& e) -> ExprPtr {
      return containsExpr(*e, call) ? hoist(e, call, pre) : e;
    });
  }

  const SubjectProgram& program_;
  const ExtractionConfig& cfg_;
  std::set<std::string> symbolic_;
  std::map<std::string, std::vector<CalleePath>> memo_;
  int tokens_ = 0;
  bool calleeTruncated_ = false;
};

Ending endingOf(const PathVariant& p) {
  if (p.boundExceeded) return Ending::BoundExceeded;
  if (!p.steps.empty() && p.steps.back().stmt->is<ReturnStmt>()) return Ending::Returned;
  return Ending::Normal;
}

PathVariant variantShell(const FunctionDecl& fn) {
  PathVariant v;
  v.entry = fn.name;
  v.params = fn.params;
  v.returnType = fn.returnType;
  return v;
}

// Constant folding helpers.

bool isScalarLiteral(const Expr& e) {
  return e.is<IntLit>() || e.is<BoolLit>() || e.is<CharLit>();
}

std::optional<std::int64_t> intValue(const Expr& e) {
  if (const auto* i = e.as<IntLit>()) return i->value;
  if (const auto* c = e.as<CharLit>()) return c->value.code;
  return std::nullopt;
}

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::optional<Expr::Node> foldBinary(BinaryOp op, const Expr& l, const Expr& r) {
  if (const auto* a = l.as<BoolLit>()) {
    const auto* b = r.as<BoolLit>();
    if (!b) return std::nullopt;
    switch (op) {
      case BinaryOp::Eq: return BoolLit{a->value == b->value};
      case BinaryOp::Ne: return BoolLit{a->value != b->value};
      case BinaryOp::And: return BoolLit{a->value && b->value};
      case BinaryOp::Or: return BoolLit{a->value || b->value};
      default: return std::nullopt;
    }
  }
  auto x = intValue(l);
  auto y = intValue(r);
  if (!x || !y) return std::nullopt;
  auto ux = static_cast<std::uint64_t>(*x);
  auto uy = static_cast<std::uint64_t>(*y);
  switch (op) {
    case BinaryOp::Add: return IntLit{wrap(ux + uy)};
    case BinaryOp::Sub: return IntLit{wrap(ux - uy)};
    case BinaryOp::Mul: return IntLit{wrap(ux * uy)};
    case BinaryOp::Div:
      if (*y == 0) return std::nullopt;
      if (*y == -1) return IntLit{wrap(0 - ux)};
      return IntLit{*x / *y};
    case BinaryOp::Mod:
      if (*y == 0) return std::nullopt;
      if (*y == -1) return IntLit{0};
      return IntLit{*x % *y};
    case BinaryOp::Lt: return BoolLit{*x < *y};
    case BinaryOp::Le: return BoolLit{*x <= *y};
    case BinaryOp::Gt: return BoolLit{*x > *y};
    case BinaryOp::Ge: return BoolLit{*x >= *y};
    case BinaryOp::Eq: return BoolLit{*x == *y};
    case BinaryOp::Ne: return BoolLit{*x != *y};
    default: return std::nullopt;
  }
}

class Folder {
 public:
  ExprPtr fold(const ExprPtr& e) {
    if (const auto* v = e->as<VarRef>()) {
      auto it = env_.find(v->name);
      if (it != env_.end()) return makeExpr(it->second, e->id, e->pos);
      return e;
    }
    if (const auto* b = e->as<Binary>()) {
      ExprPtr l = fold(b->lhs);
      if (const auto* lb = l->as<BoolLit>(); lb && (b->op == BinaryOp::And || b->op == BinaryOp::Or)) {
        bool shortCircuits = (b->op == BinaryOp::And) != lb->value;
        if (shortCircuits) return makeExpr(BoolLit{lb->value}, e->id, e->pos);
        return fold(b->rhs);
      }
      ExprPtr r = fold(b->rhs);
      if (auto folded = foldBinary(b->op, *l, *r)) return makeExpr(*folded, e->id, e->pos);
      if (l == b->lhs && r == b->rhs) return e;
      return makeExpr(Binary{b->op, l, r}, e->id, e->pos);
    }
    if (const auto* u = e->as<Unary>()) {
      ExprPtr o = fold(u->operand);
      if (const auto* bl = o->as<BoolLit>(); bl && u->op == UnaryOp::Not) {
        return makeExpr(BoolLit{!bl->value}, e->id, e->pos);
      }
      if (auto iv = intValue(*o); iv && u->op == UnaryOp::Neg) {
        return makeExpr(IntLit{wrap(0 - static_cast<std::uint64_t>(*iv))}, e->id, e->pos);
      }
      if (o == u->operand) return e;
      return makeExpr(Unary{u->op, o}, e->id, e->pos);
    }
    return rewriteExpr(e, [&](const ExprPtr& x) -> ExprPtr { return x == e ? nullptr : fold(x); });
  }

  Step foldStep(const Step& st) {
    const Stmt& s = *st.stmt;
    auto f = [&](const ExprPtr& e) { return e ? fold(e) : e; };
    if (const auto* d = s.as<DeclStmt>()) {
      ExprPtr init = f(d->init);
      types_[d->name] = d->type;
      bind(d->name, init.get(), d->init == nullptr);
      return {makeStmt(DeclStmt{d->type, d->name, init}, s.id, s.pos), st.provenance, st.hidden};
    }
    if (const auto* a = s.as<AssignStmt>()) {
      ExprPtr target = a->target;
      if (const auto* ix = target->as<Index>()) {
        ExprPtr index = fold(ix->index);
        if (index != ix->index) target = makeExpr(Index{ix->array, index}, target->id, target->pos);
      }
      ExprPtr value = fold(a->value);
      if (const auto* v = target->as<VarRef>()) bind(v->name, value.get(), false);
      return {makeStmt(AssignStmt{target, value}, s.id, s.pos), st.provenance, st.hidden};
    }
    return {rewriteStmtExprs(st.stmt, [&](const ExprPtr& e) { return fold(e); }), st.provenance,
            st.hidden};
  }

 private:
  void bind(const std::string& name, const Expr* value, bool defaulted) {
    env_.erase(name);
    auto t = types_.find(name);
    if (t == types_.end() || t->second.isArray) return;
    using K = SubjectType::Kind;
    K kind = t->second.kind;
    if (kind != K::Int && kind != K::Boolean && kind != K::Char) return;
    if (defaulted) {
      if (kind == K::Int) env_[name] = IntLit{0};
      if (kind == K::Boolean) env_[name] = BoolLit{false};
      if (kind == K::Char) env_[name] = CharLit{Char{0}};
      return;
    }
    if (!value || !isScalarLiteral(*value)) return;
    if (kind == K::Int) {
      if (auto iv = intValue(*value)) env_[name] = IntLit{*iv};
    } else if (kind == K::Boolean) {
      if (value->is<BoolLit>()) env_[name] = value->node;
    } else if (value->is<CharLit>()) {
      env_[name] = value->node;
    }
  }

  std::map<std::string, Expr::Node> env_;
  std::map<std::string, SubjectType> types_;
};

bool sameSteps(const PathVariant& a, const PathVariant& b) {
  if (a.steps.size() != b.steps.size() || a.boundExceeded != b.boundExceeded ||
      a.prunedInfeasible != b.prunedInfeasible) {
    return false;
  }
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].provenance != b.steps[i].provenance ||
        !structurallyEqual(*a.steps[i].stmt, *b.steps[i].stmt)) {
      return false;
    }
  }
  return true;
}

std::string stepKind(const Stmt& s) {
  if (s.is<DeclStmt>()) return "decl";
  if (s.is<AssignStmt>()) return "assign";
  if (s.is<AssertStmt>()) return "assert";
  if (s.is<ReturnStmt>()) return "return";
  if (s.is<ExprStmt>()) return "expr";
  return "stmt";
}

}  // namespace

ExtractionResult enumerateIntra(const SubjectProgram& program, const FunctionDecl& fn,
                                int loopBound, int maxPaths) {
  (void)program;
  ExtractionResult result;
  IntraWalker walker(loopBound, [&](Steps s, Ending e) {
    if (static_cast<int>(result.paths.size()) >= maxPaths) {
      result.truncated = true;
      return false;
    }
    PathVariant v = variantShell(fn);
    v.id = static_cast<int>(result.paths.size());
    v.steps = std::move(s);
    v.boundExceeded = e == Ending::BoundExceeded;
    result.paths.push_back(std::move(v));
    return true;
  });
  walker.run(fn);
  return result;
}

std::vector<PathVariant> inlineSymbolicCalls(const std::vector<PathVariant>& paths,
                                             const SubjectProgram& program,
                                             const ExtractionConfig& cfg) {
  cfg.validate(program);
  Inliner inliner(program, cfg);
  std::vector<PathVariant> out;
  for (const auto& p : paths) {
    inliner.process(p.steps, endingOf(p), [&](Steps s, Ending e) {
      PathVariant v = p;
      v.id = static_cast<int>(out.size());
      v.steps = std::move(s);
      v.boundExceeded = e == Ending::BoundExceeded;
      out.push_back(std::move(v));
      return true;
    });
  }
  return out;
}

PathVariant renameVariables(const PathVariant& path) {
  struct Instance {
    std::string base;
    bool isParam = false;
  };
  std::vector<Instance> instances;
  std::map<std::string, std::string> current;  // source name -> placeholder
  auto placeholder = [](std::size_t i) { return "\x01" + std::to_string(i); };

  for (const auto& p : path.params) {
    current[p.name] = placeholder(instances.size());
    instances.push_back({p.name, true});
  }

  std::set<std::string> taken;
  PathVariant out = path;
  for (auto& step : out.steps) {
    StmtPtr s = rewriteStmtExprs(step.stmt, [&](const ExprPtr& e) -> ExprPtr {
      if (const auto* v = e->as<VarRef>()) {
        auto it = current.find(v->name);
        if (it != current.end()) return makeExpr(VarRef{it->second}, e->id, e->pos);
        taken.insert(v->name);
      }
      return nullptr;
    });
    if (const auto* d = s->as<DeclStmt>()) {
      std::string ph = placeholder(instances.size());
      instances.push_back({baseName(d->name), false});
      current[d->name] = ph;
      s = makeStmt(DeclStmt{d->type, ph, d->init}, s->id, s->pos);
    }
    step.stmt = s;
  }

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    groups[instances[i].base].push_back(i);
    taken.insert(instances[i].base);
  }
  std::map<std::string, std::string> finalNames;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& group = groups[instances[i].base];
    if (group.front() != i) continue;
    if (group.size() == 1) {
      finalNames[placeholder(i)] = instances[i].base;
      continue;
    }
    int counter = 0;
    for (std::size_t idx : group) {
      const std::string& base = instances[idx].base;
      if (instances[idx].isParam) {
        finalNames[placeholder(idx)] = base;
        counter = std::max(counter, 1);
        continue;
      }
      std::string candidate;
      do {
        candidate = base + "_" + std::to_string(counter++);
      } while (taken.count(candidate) > 0);
      taken.insert(candidate);
      finalNames[placeholder(idx)] = candidate;
    }
  }
  for (auto& step : out.steps) step.stmt = renameInStmt(step.stmt, finalNames);
  return out;
}

PathVariant foldConstants(const PathVariant& path) {
  PathVariant out = path;
  out.steps.clear();
  Folder folder;
  for (const auto& st : path.steps) {
    Step folded = folder.foldStep(st);
    if (const auto* a = folded.assertion()) {
      if (const auto* b = a->cond->as<BoolLit>()) {
        if (b->value == a->expected) {
          folded.hidden = true;
        } else {
          out.steps.push_back(std::move(folded));
          out.prunedInfeasible = true;
          out.boundExceeded = false;
          return out;
        }
      }
    }
    out.steps.push_back(std::move(folded));
  }
  return out;
}

ExtractionResult enumeratePaths(const SubjectProgram& program, const ExtractionConfig& cfg) {
  cfg.validate(program);
  const FunctionDecl& entry = *program.findFunction(cfg.entryName(program));
  Inliner inliner(program, cfg);
  ExtractionResult raw;
  Sink collect = [&](Steps s, Ending e) {
    if (static_cast<int>(raw.paths.size()) >= cfg.maxPaths) {
      raw.truncated = true;
      return false;
    }
    PathVariant v = variantShell(entry);
    v.steps = std::move(s);
    v.boundExceeded = e == Ending::BoundExceeded;
    raw.paths.push_back(std::move(v));
    return true;
  };
  IntraWalker walker(cfg.loopBound,
                     [&](Steps s, Ending e) { return inliner.process(s, e, collect); });
  walker.run(entry);

  ExtractionResult result;
  result.truncated = raw.truncated || inliner.calleeTruncated();
  for (const auto& p : raw.paths) {
    PathVariant v = foldConstants(renameVariables(p));
    if (v.prunedInfeasible) {
      bool dup = std::any_of(result.paths.begin(), result.paths.end(),
                             [&](const PathVariant& q) { return sameSteps(q, v); });
      if (dup) continue;
    }
    v.id = static_cast<int>(result.paths.size());
    result.paths.push_back(std::move(v));
  }
  return result;
}

std::set<NodeId> inlinedCallSites(const SubjectProgram& program, const ExtractionConfig& cfg) {
  std::set<NodeId> out;
  auto symbolic = cfg.effectiveSymbolic(program);
  for (const auto& name : symbolic) {
    const FunctionDecl* fn = program.findFunction(name);
    if (!fn) continue;
    forEachStmt(*fn->body, [&](const Stmt& s) {
      for (const auto& e : directExprs(s)) {
        forEachUnconditionalCall(*e, [&](const Expr& call) {
          if (symbolic.count(call.as<Call>()->callee) > 0) out.insert(call.id);
        });
      }
    });
  }
  return out;
}

std::string variantText(const PathVariant& path) {
  std::string out = toString(path.returnType) + " " + path.entry + "(";
  for (std::size_t i = 0; i < path.params.size(); ++i) {
    if (i > 0) out += ", ";
    out += toString(path.params[i].type) + " " + path.params[i].name;
  }
  out += ") {\n";
  for (const auto& s : path.steps) {
    if (!s.hidden) out += "  " + printStmt(*s.stmt, 1) + "\n";
  }
  if (path.boundExceeded) out += "  // path truncated at loop or recursion bound\n";
  if (path.prunedInfeasible) out += "  // path is infeasible: the last assertion is always violated\n";
  return out + "}\n";
}

nlohmann::json toJson(const PathVariant& path) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : path.steps) {
    nlohmann::json j = {{"kind", stepKind(*s.stmt)},
                        {"text", printStmt(*s.stmt)},
                        {"provenanceNodeId", s.provenance}};
    if (const auto* a = s.assertion()) j["assertExpected"] = a->expected;
    if (s.hidden) j["hidden"] = true;
    steps.push_back(std::move(j));
  }
  return {{"id", path.id},
          {"entry", path.entry},
          {"steps", std::move(steps)},
          {"boundExceeded", path.boundExceeded},
          {"prunedInfeasible", path.prunedInfeasible}};
}

nlohmann::json toJson(const ExtractionResult& result) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : result.paths) paths.push_back(toJson(p));
  return {{"paths", std::move(paths)}, {"truncated", result.truncated}};
}

}  // namespace palm
