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

#ifndef UOI_SRC_GRAPH_HPP_
#define UOI_SRC_GRAPH_HPP_

#include <vector>

namespace uoi::internal {

// Strongly connected components of a digraph given as adjacency lists.
// Returns the component id of every node.
std::vector<int> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency, int* n_components);

// Number of components with no edge leaving them (closed classes of a Markov
// chain when the graph is its positive-probability digraph).
int count_closed_classes(const std::vector<std::vector<int>>& adjacency);

}  // namespace uoi::internal

#endif  // UOI_SRC_GRAPH_HPP_
