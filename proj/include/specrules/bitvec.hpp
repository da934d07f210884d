#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace specrules {

// Fixed-length bit vector packed into 64-bit words, little-endian within a
// word. Dataset columns and antecedent covers live in these; every support
// count in the engine reduces to AND + popcount over word arrays.
//
// Invariant: bits at positions >= size() are zero, so count() never needs a
// tail mask.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }

  void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  void and_with(const BitVec& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  }

  // Flip every bit in [0, size()), keeping the tail zero.
  BitVec complemented() const {
    BitVec out(nbits_);
    for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = ~words_[w];
    const std::size_t tail = nbits_ & 63;
    if (tail != 0 && !out.words_.empty())
      out.words_.back() &= (std::uint64_t{1} << tail) - 1;
    return out;
  }

  static std::uint64_t and_count(const BitVec& a, const BitVec& b) {
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < a.words_.size(); ++w)
      c += std::popcount(a.words_[w] & b.words_[w]);
    return c;
  }

  static std::uint64_t and_count(const BitVec& a, const BitVec& b, const BitVec& c) {
    std::uint64_t n = 0;
    for (std::size_t w = 0; w < a.words_.size(); ++w)
      n += std::popcount(a.words_[w] & b.words_[w] & c.words_[w]);
    return n;
  }

  bool operator==(const BitVec&) const = default;

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace specrules
