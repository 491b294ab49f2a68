#include "palm/symtree.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <tuple>

#include "palm/printer.hpp"

namespace palm {

std::string toString(NodeKind k) {
  switch (k) {
    case NodeKind::Root: return "root";
    case NodeKind::Statement: return "statement";
    case NodeKind::Condition: return "condition";
    case NodeKind::Terminal: return "terminal";
  }
  return "statement";
}

namespace {

NodeKind kindFromString(const std::string& s) {
  if (s == "root") return NodeKind::Root;
  if (s == "condition") return NodeKind::Condition;
  if (s == "terminal") return NodeKind::Terminal;
  if (s == "statement") return NodeKind::Statement;
  throw PalmError("unknown node kind '" + s + "'");
}

}  // namespace

std::string toString(NodeStatus s) {
  switch (s) {
    case NodeStatus::Covered: return "covered";
    case NodeStatus::Uncovered: return "uncovered";
    case NodeStatus::Infeasible: return "infeasible";
    case NodeStatus::BoundExceeded: return "bound-exceeded";
  }
  return "uncovered";
}

NodeStatus statusFromString(const std::string& s) {
  if (s == "covered") return NodeStatus::Covered;
  if (s == "uncovered") return NodeStatus::Uncovered;
  if (s == "infeasible") return NodeStatus::Infeasible;
  if (s == "bound-exceeded") return NodeStatus::BoundExceeded;
  throw PalmError("unknown status '" + s + "'");
}

namespace {

const char* kEndLabel = "end";
const char* kBoundLabel = "bound exceeded";
const char* kInfeasibleLabel = "infeasible";

struct Builder {
  std::vector<SymNode> nodes;

  int add(int parent, SymNode n) {
    n.id = static_cast<int>(nodes.size());
    n.parent = parent;
    nodes.push_back(std::move(n));
    nodes[static_cast<std::size_t>(parent)].children.push_back(nodes.back().id);
    return nodes.back().id;
  }

  SymNode& at(int id) { return nodes[static_cast<std::size_t>(id)]; }

  static bool sameKey(const SymNode& a, const SymNode& b) {
    return a.kind == b.kind && a.provenance == b.provenance && a.outcome == b.outcome &&
           a.label == b.label;
  }

  /// Moves a path that ended on `id` onto an "end" marker below it.
  void demoteLeaf(int id) {
    SymNode& n = at(id);
    if (!n.pathId) return;
    SymNode marker;
    marker.kind = NodeKind::Terminal;
    marker.label = kEndLabel;
    marker.pathId = n.pathId;
    marker.status = n.status;
    n.pathId.reset();
    add(id, std::move(marker));
  }

  int child(int parent, SymNode proto) {
    for (int c : at(parent).children) {
      if (sameKey(at(c), proto)) return c;
    }
    demoteLeaf(parent);
    return add(parent, std::move(proto));
  }
};

}  // namespace

SymTree SymTree::build(const std::vector<PathVariant>& paths) {
  Builder b;
  SymNode root;
  root.kind = NodeKind::Root;
  if (!paths.empty()) {
    const auto& p = paths.front();
    std::string sig = toString(p.returnType) + " " + p.entry + "(";
    for (std::size_t i = 0; i < p.params.size(); ++i) {
      if (i > 0) sig += ", ";
      sig += toString(p.params[i].type) + " " + p.params[i].name;
    }
    root.label = sig + ")";
  }
  b.nodes.push_back(root);

  std::map<std::string, int> seen;
  for (const auto& path : paths) {
    std::string key = path.prunedInfeasible ? "I" : path.boundExceeded ? "B" : "N";
    for (const auto& step : path.steps) {
      key += "|" + std::to_string(step.provenance) + ":" + printStmt(*step.stmt);
    }
    if (auto [it, fresh] = seen.emplace(key, path.id); !fresh) throw DuplicatePath(it->second, path.id);
    int cur = 0;
    std::optional<bool> pending;
    for (const auto& step : path.steps) {
      SymNode n;
      n.outcome = pending;
      n.provenance = step.provenance;
      n.hidden = step.hidden;
      if (const auto* a = step.assertion()) {
        n.kind = NodeKind::Condition;
        n.label = printExpr(*a->cond);
        pending = a->expected;
      } else {
        n.kind = NodeKind::Statement;
        n.label = printStmt(*step.stmt);
        pending.reset();
      }
      cur = b.child(cur, std::move(n));
    }

    const char* marker = nullptr;
    if (path.prunedInfeasible) {
      marker = kInfeasibleLabel;
    } else if (path.boundExceeded) {
      marker = kBoundLabel;
    } else if (pending || !b.at(cur).children.empty() || b.at(cur).pathId || cur == 0) {
      marker = kEndLabel;
    }
    if (marker) {
      SymNode m;
      m.kind = NodeKind::Terminal;
      m.label = marker;
      m.outcome = pending;
      int before = static_cast<int>(b.nodes.size());
      cur = b.child(cur, std::move(m));
      if (cur < before) throw DuplicatePath(*b.at(cur).pathId, path.id);
    }
    SymNode& leaf = b.at(cur);
    if (leaf.pathId) throw DuplicatePath(*leaf.pathId, path.id);
    leaf.pathId = path.id;
    leaf.status = path.prunedInfeasible ? NodeStatus::Infeasible
                  : path.boundExceeded  ? NodeStatus::BoundExceeded
                                        : NodeStatus::Uncovered;
  }

  // Order children by the smallest path id below them, then renumber in
  // preorder so that the layout does not depend on input order.
  std::vector<int> minPath(b.nodes.size(), std::numeric_limits<int>::max());
  std::function<int(int)> fill = [&](int id) {
    int m = b.at(id).pathId.value_or(std::numeric_limits<int>::max());
    for (int c : b.at(id).children) m = std::min(m, fill(c));
    return minPath[static_cast<std::size_t>(id)] = m;
  };
  fill(0);
  for (auto& n : b.nodes) {
    std::stable_sort(n.children.begin(), n.children.end(), [&](int x, int y) {
      return minPath[static_cast<std::size_t>(x)] < minPath[static_cast<std::size_t>(y)];
    });
  }

  SymTree tree;
  std::vector<int> order;
  std::function<void(int)> visit = [&](int id) {
    order.push_back(id);
    for (int c : b.at(id).children) visit(c);
  };
  visit(0);
  std::vector<int> newId(b.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) newId[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  for (int old : order) {
    SymNode n = b.at(old);
    n.id = newId[static_cast<std::size_t>(old)];
    n.parent = n.parent < 0 ? -1 : newId[static_cast<std::size_t>(n.parent)];
    for (int& c : n.children) c = newId[static_cast<std::size_t>(c)];
    if (n.pathId) tree.leaves_[*n.pathId] = n.id;
    tree.nodes_.push_back(std::move(n));
  }
  return tree;
}

int SymTree::leafOf(int pathId) const {
  auto it = leaves_.find(pathId);
  if (it == leaves_.end()) throw UnknownPath(pathId);
  return it->second;
}

NodeStatus SymTree::summary(int nodeId) const {
  const SymNode& n = node(nodeId);
  if (n.children.empty()) return n.status;
  bool uncovered = false, infeasible = false, bound = false;
  if (n.pathId) {
    if (n.status == NodeStatus::Covered) return NodeStatus::Covered;
  }
  for (int c : n.children) {
    switch (summary(c)) {
      case NodeStatus::Covered: return NodeStatus::Covered;
      case NodeStatus::Uncovered: uncovered = true; break;
      case NodeStatus::Infeasible: infeasible = true; break;
      case NodeStatus::BoundExceeded: bound = true; break;
    }
  }
  if (uncovered) return NodeStatus::Uncovered;
  if (infeasible) return NodeStatus::Infeasible;
  (void)bound;
  return NodeStatus::BoundExceeded;
}

void SymTree::markStatus(int pathId, NodeStatus status) {
  SymNode& leaf = nodes_[static_cast<std::size_t>(leafOf(pathId))];
  if (leaf.status == NodeStatus::Covered) return;
  leaf.status = status;
}

nlohmann::json SymTree::toJson() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json j = {{"id", n.id},
                        {"kind", toString(n.kind)},
                        {"label", n.label},
                        {"status", toString(n.pathId ? n.status : summary(n.id))},
                        {"children", n.children}};
    if (n.outcome) j["outcome"] = *n.outcome;
    if (n.provenance != kSyntheticNode) j["provenance"] = n.provenance;
    if (n.hidden) j["hidden"] = true;
    if (n.pathId) j["pathId"] = *n.pathId;
    nodes.push_back(std::move(j));
  }
  nlohmann::json leaves = nlohmann::json::object();
  for (const auto& [path, node] : leaves_) leaves[std::to_string(path)] = node;
  return {{"nodes", std::move(nodes)}, {"rootId", 0}, {"leaves", std::move(leaves)}};
}

SymTree SymTree::fromJson(const nlohmann::json& j) {
  SymTree tree;
  for (const auto& jn : j.at("nodes")) {
    SymNode n;
    n.id = jn.at("id").get<int>();
    n.kind = kindFromString(jn.at("kind").get<std::string>());
    n.label = jn.at("label").get<std::string>();
    if (jn.contains("outcome")) n.outcome = jn.at("outcome").get<bool>();
    n.provenance = jn.value("provenance", kSyntheticNode);
    n.hidden = jn.value("hidden", false);
    n.children = jn.at("children").get<std::vector<int>>();
    if (jn.contains("pathId")) n.pathId = jn.at("pathId").get<int>();
    if (n.pathId) n.status = statusFromString(jn.at("status").get<std::string>());
    if (n.id != static_cast<int>(tree.nodes_.size())) throw PalmError("tree nodes must be listed in id order");
    tree.nodes_.push_back(std::move(n));
  }
  for (const auto& n : tree.nodes_) {
    for (int c : n.children) tree.nodes_.at(static_cast<std::size_t>(c)).parent = n.id;
  }
  for (const auto& [path, node] : j.at("leaves").items()) tree.leaves_[std::stoi(path)] = node.get<int>();
  return tree;
}

std::string SymTree::toDot() const {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c == '\n' ? ' ' : c;
    }
    return out;
  };
  auto color = [](NodeStatus s) {
    switch (s) {
      case NodeStatus::Covered: return "green";
      case NodeStatus::Uncovered: return "red";
      default: return "gray";
    }
  };
  std::string out = "digraph symtree {\n  node [fontname=\"monospace\"];\n";
  for (const auto& n : nodes_) {
    std::string shape = n.kind == NodeKind::Condition ? "diamond" : n.kind == NodeKind::Statement ? "box" : "ellipse";
    out += "  n" + std::to_string(n.id) + " [shape=" + shape + ", label=\"" + escape(n.label) + "\"";
    if (n.pathId) out += ", style=filled, fillcolor=" + std::string(color(n.status));
    out += "];\n";
    for (int c : n.children) {
      out += "  n" + std::to_string(n.id) + " -> n" + std::to_string(c);
      const auto& child = node(c);
      if (child.outcome) out += std::string(" [label=\"") + (*child.outcome ? "T" : "F") + "\"]";
      out += ";\n";
    }
  }
  return out + "}\n";
}

}  // namespace palm
