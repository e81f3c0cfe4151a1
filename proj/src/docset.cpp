#include "lexfp/docset.hpp"

#include <bit>
#include <stdexcept>

#include "lexfp/simd.hpp"

namespace lexfp {

DocSet::DocSet(std::size_t universe_size) : size_(universe_size), words_((universe_size + 63) / 64, 0) {}

DocSet::DocSet(std::size_t universe_size, std::span<const DocIndex> members) : DocSet(universe_size) {
  for (DocIndex d : members) insert(d);
}

DocSet DocSet::full(std::size_t universe_size) {
  DocSet s(universe_size);
  for (auto& w : s.words_) w = ~std::uint64_t{0};
  if (const std::size_t tail = universe_size & 63; tail != 0) {
    s.words_.back() = (std::uint64_t{1} << tail) - 1;
  }
  return s;
}

void DocSet::insert(DocIndex d) {
  if (d >= size_) throw std::out_of_range("document index outside DocSet universe");
  words_[d >> 6] |= std::uint64_t{1} << (d & 63);
}

std::size_t DocSet::count() const { return simd::popcount(words_); }

std::size_t DocSet::intersection_count(const DocSet& other) const {
  if (other.size_ != size_) throw std::invalid_argument("DocSet universe mismatch");
  return simd::and_popcount(words_, other.words_);
}

bool DocSet::is_subset_of(const DocSet& other) const { return intersection_count(other) == count(); }

std::vector<DocIndex> DocSet::members() const {
  std::vector<DocIndex> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(static_cast<DocIndex>(w * 64 + std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

double jaccard(const DocSet& a, const DocSet& b) {
  const std::size_t inter = a.intersection_count(b);
  const std::size_t uni = a.count() + b.count() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace lexfp
