// Walks three bridges side by side: a finite backward bridge from a fixed
// endpoint, the zig-zag bridge, and the interval model driven through the
// left-right seed machinery.  Prints each trajectory in Newick form.

#include <iostream>

#include "patricia/bridges.hpp"
#include "patricia/serialize.hpp"

using namespace patricia;

int main() {
  const FullBinaryTree endpoint(span_tree({Word("000"), Word("001"), Word("01"), Word("1")}));
  std::cout << "backward bridge from " << to_newick(endpoint) << "\n";
  for (const auto& t : finite_bridge(endpoint, 7)) std::cout << "  " << to_newick(t) << "\n";

  std::cout << "zig-zag bridge, 8 steps\n";
  ZigzagBridge z(8, 7);
  for (const auto& t : z.trajectory()) std::cout << "  " << to_newick(t) << "\n";

  std::cout << "interval model bridge, 6 steps\n";
  IntervalZigzagModel m;
  for (const auto& lt : rtree_bridge(m, 6, 7).labeled)
    std::cout << "  " << to_newick(lt) << "\n";
  return 0;
}
