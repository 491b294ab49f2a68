#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "palm/errors.hpp"
#include "palm/extraction.hpp"

namespace palm {

class DuplicatePath : public PalmError {
 public:
  explicit DuplicatePath(int a, int b)
      : PalmError("paths " + std::to_string(a) + " and " + std::to_string(b) + " have identical steps") {}
};

class UnknownPath : public PalmError {
 public:
  explicit UnknownPath(int id) : PalmError("unknown path " + std::to_string(id)) {}
};

enum class NodeKind { Root, Statement, Condition, Terminal };
enum class NodeStatus { Covered, Uncovered, Infeasible, BoundExceeded };

std::string toString(NodeKind k);
std::string toString(NodeStatus s);
NodeStatus statusFromString(const std::string& s);

struct SymNode {
  int id = 0;
  NodeKind kind = NodeKind::Statement;
  std::string label;
  /// Outcome of the condition edge leading into this node, if any.
  std::optional<bool> outcome;
  NodeId provenance = kSyntheticNode;
  bool hidden = false;
  std::vector<int> children;
  int parent = -1;
  /// Set on leaves.
  std::optional<int> pathId;
  NodeStatus status = NodeStatus::Uncovered;

  bool operator==(const SymNode&) const = default;
};

/// Prefix-sharing tree over path variants. A condition node is shared by the
/// paths asserting either outcome; the node after it carries the outcome.
/// Paths that end on an assertion, a bound or an infeasible assertion get a
/// terminal marker node as their leaf.
class SymTree {
 public:
  static SymTree build(const std::vector<PathVariant>& paths);
  static SymTree fromJson(const nlohmann::json& j);

  const std::vector<SymNode>& nodes() const { return nodes_; }
  const SymNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  int rootId() const { return 0; }
  const std::map<int, int>& leaves() const { return leaves_; }
  int leafOf(int pathId) const;

  NodeStatus leafStatus(int pathId) const { return node(leafOf(pathId)).status; }
  /// Leaf status for leaves; for internal nodes covered if any descendant
  /// leaf is covered, else uncovered if any is, else infeasible, else
  /// bound-exceeded.
  NodeStatus summary(int nodeId) const;
  /// Never downgrades a covered leaf.
  void markStatus(int pathId, NodeStatus status);

  nlohmann::json toJson() const;
  std::string toDot() const;

  bool operator==(const SymTree&) const = default;

 private:
  std::vector<SymNode> nodes_;
  std::map<int, int> leaves_;
};

}  // namespace palm
