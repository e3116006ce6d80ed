#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace hydro {

// Binary indexed tree over nonnegative integer weights.
class Fenwick {
 public:
  explicit Fenwick(std::size_t size = 0) : tree_(size + 1, 0) {}

  std::size_t size() const { return tree_.size() - 1; }
  std::int64_t total() const { return total_; }

  void add(std::size_t index, std::int64_t delta) {
    total_ += delta;
    for (std::size_t i = index + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  std::int64_t prefix(std::size_t count) const {
    std::int64_t s = 0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

  // Smallest index whose inclusive prefix sum exceeds k, for 0 <= k < total().
  std::size_t find(std::int64_t k) const {
    std::size_t pos = 0;
    for (std::size_t step = std::bit_floor(size()); step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] <= k) {
        pos += step;
        k -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
  std::int64_t total_ = 0;
};

}  // namespace hydro
