#include "choo/derivation.hpp"

#include <stdexcept>

namespace choo {

std::size_t premise_count(Rule r) {
  switch (r) {
    case Rule::Condition:
    case Rule::Assignment:
      return 0;
    case Rule::Sequence:
      return 2;
    default:
      return 1;
  }
}

std::string check_shape(const DerivationNode& root) {
  if (root.children.size() != premise_count(root.rule)) {
    return "rule " + std::to_string(rule_number(root.rule)) + " at '" + root.conclusion +
           "' has " + std::to_string(root.children.size()) + " premises, expected " +
           std::to_string(premise_count(root.rule));
  }
  for (const auto& c : root.children) {
    auto err = check_shape(c);
    if (!err.empty()) return err;
  }
  return {};
}

namespace {

void render_into(const DerivationNode& n, std::size_t indent, std::string& out) {
  out.append(indent * 2, ' ');
  out += "[rule " + std::to_string(rule_number(n.rule)) + "] " + n.conclusion + "\n";
  for (const auto& c : n.children) render_into(c, indent + 1, out);
}

}  // namespace

std::string render(const DerivationNode& root) {
  std::string out;
  render_into(root, 0, out);
  return out;
}

DerivationNode build_tree(const std::vector<DerivationStep>& preorder) {
  if (preorder.empty()) throw std::invalid_argument("empty derivation");
  const std::size_t base = preorder.front().depth;
  DerivationNode root{preorder.front().rule, preorder.front().conclusion, {}};
  // Path from the root to the most recently placed node.
  std::vector<DerivationNode*> path{&root};
  for (std::size_t i = 1; i < preorder.size(); ++i) {
    const auto& step = preorder[i];
    if (step.depth <= base || step.depth - base > path.size()) {
      throw std::invalid_argument("derivation steps are not a pre-order walk");
    }
    path.resize(step.depth - base);
    auto& siblings = path.back()->children;
    siblings.push_back(DerivationNode{step.rule, step.conclusion, {}});
    path.push_back(&siblings.back());
  }
  return root;
}

}  // namespace choo
