#include "mree/partition.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mree {

namespace {
constexpr std::size_t unowned = std::numeric_limits<std::size_t>::max();
}

Partition::Partition(std::vector<std::vector<std::size_t>> blocks, std::size_t n)
    : n_(n), owner_(n, unowned) {
    for (auto &b : blocks) {
        if (b.empty()) throw std::invalid_argument("partition block is empty");
        std::sort(b.begin(), b.end());
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto &x, const auto &y) { return x.front() < y.front(); });
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        for (std::size_t s : blocks[k]) {
            if (s >= n) throw std::invalid_argument("state index " + std::to_string(s) + " out of range");
            if (owner_[s] != unowned)
                throw std::invalid_argument("state index " + std::to_string(s) + " appears in two blocks");
            owner_[s] = k;
        }
    }
    for (std::size_t s = 0; s < n; ++s)
        if (owner_[s] == unowned) throw std::invalid_argument("state index " + std::to_string(s) + " not covered");
    blocks_ = std::move(blocks);
}

Partition Partition::trivial(std::size_t n) {
    std::vector<std::size_t> all(n);
    for (std::size_t s = 0; s < n; ++s) all[s] = s;
    return Partition({all}, n);
}

Partition Partition::discrete(std::size_t n) {
    std::vector<std::vector<std::size_t>> b(n);
    for (std::size_t s = 0; s < n; ++s) b[s] = {s};
    return Partition(std::move(b), n);
}

bool Partition::refines(const Partition &other) const {
    if (other.n_ != n_) return false;
    for (const auto &b : blocks_) {
        std::size_t k = other.block_index(b.front());
        for (std::size_t s : b)
            if (other.block_index(s) != k) return false;
    }
    return true;
}

Partition join_partitions(const Partition &a, const Partition &b) {
    if (a.universe() != b.universe()) throw std::invalid_argument("join of partitions over different state spaces");
    std::vector<std::vector<std::size_t>> out;
    for (const auto &x : a.blocks()) {
        for (const auto &y : b.blocks()) {
            std::vector<std::size_t> meet;
            std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(meet));
            if (!meet.empty()) out.push_back(std::move(meet));
        }
    }
    return Partition(std::move(out), a.universe());
}

} // namespace mree
