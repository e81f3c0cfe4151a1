#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lexfp {

using DocIndex = std::uint32_t;

/// Fixed-universe bitset of document indices.
class DocSet {
 public:
  DocSet() = default;
  explicit DocSet(std::size_t universe_size);
  DocSet(std::size_t universe_size, std::span<const DocIndex> members);

  static DocSet full(std::size_t universe_size);

  std::size_t universe_size() const { return size_; }
  bool contains(DocIndex d) const { return d < size_ && (words_[d >> 6] >> (d & 63)) & 1u; }
  void insert(DocIndex d);

  std::size_t count() const;
  std::size_t intersection_count(const DocSet& other) const;
  bool is_subset_of(const DocSet& other) const;

  std::vector<DocIndex> members() const;
  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const DocSet&, const DocSet&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// |a ∩ b| / |a ∪ b|, defined as 0 when both are empty.
double jaccard(const DocSet& a, const DocSet& b);

}  // namespace lexfp
