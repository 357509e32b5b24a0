// Prints the exact one-step backward kernel for every four-leaf endpoint:
// which three-leaf trees it can step down to, with exact masses.

#include <iostream>

#include "patricia/kernels.hpp"
#include "patricia/serialize.hpp"
#include "patricia/stats.hpp"

using namespace patricia;

int main() {
  for (const auto& t : enumerate_full_trees(4)) {
    std::cout << "endpoint " << to_newick(t) << "\n";
    for (const auto& [s, q] : exact_backward_kernel(t).masses)
      std::cout << "  -> " << to_newick(s) << "  mass " << to_string(q) << "\n";
  }
  return 0;
}
