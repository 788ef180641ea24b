#pragma once

#include <cstdint>
#include <vector>

#include "rankpref/ratings.hpp"

namespace rankpref {

/// Connected components of the bipartite user/item graph whose edges are the
/// filled cells. A user or item with no ratings forms its own component.
struct ComponentLabeling {
    std::vector<std::uint32_t> component_of_user;
    std::vector<std::uint32_t> component_of_item;
    std::size_t n_components = 0;

    bool connected(Index u, Index i) const {
        return component_of_user[u] == component_of_item[i];
    }
};

/// Union-find over n_users + n_items vertices. Labels are assigned in order of
/// first appearance (users first, then items), so they are deterministic.
ComponentLabeling connected_components(const SparseRatingMatrix& matrix);

}  // namespace rankpref
