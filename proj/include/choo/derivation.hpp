#pragma once

#include <string>
#include <vector>

namespace choo {

/// Rule numbers of the execution relation, one per evaluator case.
enum class Rule : int {
  Backchain = 1,     // (A = G1);P |- A   if  P |- G1
  Instantiate = 2,   // forall x D;P |- A  if  [s/x]D;P |- A
  CallClause = 3,    // P |- A  if  D in P and D;P |- A
  Condition = 4,
  Assignment = 5,
  Sequence = 6,
  Choose = 7,
  BoundedChoose = 8,
};

inline int rule_number(Rule r) { return static_cast<int>(r); }

struct DerivationNode {
  Rule rule;
  std::string conclusion;
  std::vector<DerivationNode> children;

  bool operator==(const DerivationNode&) const = default;
};

/// Number of premises each rule takes that are themselves derivations.
std::size_t premise_count(Rule r);

/// Checks every node's child count against its rule. Returns an empty string
/// when the tree is well formed, otherwise a description of the first
/// offending node.
std::string check_shape(const DerivationNode& root);

/// Two-space indented rendering, one `[rule N] conclusion` line per node.
std::string render(const DerivationNode& root);

/// Rebuilds a tree from a pre-order list of (depth, node) entries in which
/// every child sits exactly one level below its parent.
struct DerivationStep {
  std::size_t depth;
  Rule rule;
  std::string conclusion;
};
DerivationNode build_tree(const std::vector<DerivationStep>& preorder);

}  // namespace choo
