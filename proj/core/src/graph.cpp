// Copyright 2026 The gain-index Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graph.hpp"

#include <algorithm>
#include <utility>

namespace uoi::internal {

std::vector<int> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency, int* n_components) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  // (node, next edge position) frames of the iterative Tarjan walk.
  std::vector<std::pair<int, int>> frames;
  int counter = 0;
  int components = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < static_cast<int>(adjacency[v].size())) {
        const int w = adjacency[v][pos++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = components;
        } while (w != v);
        ++components;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  if (n_components != nullptr) *n_components = components;
  return comp;
}

int count_closed_classes(const std::vector<std::vector<int>>& adjacency) {
  int n_components = 0;
  const std::vector<int> comp =
      strongly_connected_components(adjacency, &n_components);
  std::vector<char> leaks(n_components, 0);
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    for (int w : adjacency[v]) {
      if (comp[w] != comp[v]) leaks[comp[v]] = 1;
    }
  }
  return static_cast<int>(std::count(leaks.begin(), leaks.end(), 0));
}

}  // namespace uoi::internal
