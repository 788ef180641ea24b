#include "rankpref/components.hpp"

#include <numeric>

namespace rankpref {

namespace {

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> rank_;
};

}  // namespace

ComponentLabeling connected_components(const SparseRatingMatrix& matrix) {
    const auto nu = matrix.n_users();
    const auto ni = matrix.n_items();
    DisjointSet sets(nu + ni);
    for (const auto& e : matrix.entries())
        sets.unite(e.user, static_cast<std::uint32_t>(nu + e.item));

    constexpr auto unset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> label(nu + ni, unset);
    ComponentLabeling out;
    out.component_of_user.resize(nu);
    out.component_of_item.resize(ni);
    std::uint32_t next = 0;
    for (std::size_t v = 0; v < nu + ni; ++v) {
        auto root = sets.find(static_cast<std::uint32_t>(v));
        if (label[root] == unset) label[root] = next++;
        if (v < nu)
            out.component_of_user[v] = label[root];
        else
            out.component_of_item[v - nu] = label[root];
    }
    out.n_components = next;
    return out;
}

}  // namespace rankpref
