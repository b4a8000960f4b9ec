#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mree {

// A partition of the state indices {0, ..., n-1}. Blocks are kept in
// canonical form: each block sorted, blocks ordered by their first element.
class Partition {
public:
    Partition() = default;
    // Throws std::invalid_argument unless blocks cover 0..n-1 exactly once.
    Partition(std::vector<std::vector<std::size_t>> blocks, std::size_t n);

    static Partition trivial(std::size_t n);  // one block
    static Partition discrete(std::size_t n); // singletons

    std::size_t universe() const { return n_; }
    const std::vector<std::vector<std::size_t>> &blocks() const { return blocks_; }
    std::size_t block_index(std::size_t state) const { return owner_.at(state); }
    const std::vector<std::size_t> &block_of(std::size_t state) const { return blocks_[owner_.at(state)]; }

    bool is_discrete() const { return blocks_.size() == n_; }
    // True iff every block of *this lies inside one block of other.
    bool refines(const Partition &other) const;

    bool operator==(const Partition &o) const { return n_ == o.n_ && blocks_ == o.blocks_; }

private:
    std::size_t n_ = 0;
    std::vector<std::vector<std::size_t>> blocks_;
    std::vector<std::size_t> owner_;
};

// Coarsest common refinement: the nonempty pairwise block intersections.
Partition join_partitions(const Partition &a, const Partition &b);

} // namespace mree
