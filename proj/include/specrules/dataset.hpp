#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specrules/bitvec.hpp"
#include "specrules/counts.hpp"

namespace specrules {

using AttrId = std::uint32_t;

// Strictly increasing set of attribute ids — the canonical antecedent form.
class AttributeSet {
 public:
  AttributeSet() = default;
  // Sorts and rejects duplicates.
  explicit AttributeSet(std::vector<AttrId> members);
  static AttributeSet singleton(AttrId a) { return AttributeSet({a}); }

  const std::vector<AttrId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(AttrId a) const;
  bool is_subset_of(const AttributeSet& other) const;
  bool is_proper_subset_of(const AttributeSet& other) const {
    return size() < other.size() && is_subset_of(other);
  }
  AttributeSet with(AttrId a) const;

  bool operator==(const AttributeSet&) const = default;
  // Lexicographic on the sorted members; shorter prefixes first.
  auto operator<=>(const AttributeSet&) const = default;

 private:
  std::vector<AttrId> members_;
};

// Binary transaction table in column-major bit-vector form. Immutable after
// construction; all mining and detection reads go through covers and counts.
class Dataset {
 public:
  // FIMI transaction format: one row per line, whitespace-separated
  // non-negative integer item ids; duplicate ids within a line collapse.
  // Attributes are indexed in increasing numeric id order.
  static Dataset load_fimi(const std::string& path);

  // Header line of attribute names, then one row of 0/1 cells per line,
  // comma-separated. Attributes are indexed in header order after sorting by
  // name, so loading is invariant to column permutations of the same table.
  static Dataset load_csv(const std::string& path);

  Dataset(std::vector<std::string> names, std::vector<BitVec> columns,
          std::uint64_t n);

  void write_fimi(const std::string& path) const;
  void write_csv(const std::string& path) const;

  std::uint64_t n() const { return n_; }
  std::size_t attr_count() const { return columns_.size(); }
  const std::string& attr_name(AttrId a) const { return names_[a]; }
  std::optional<AttrId> attr_index(const std::string& name) const;
  const BitVec& column(AttrId a) const { return columns_[a]; }
  std::uint64_t attr_support(AttrId a) const { return supports_[a]; }

  // Support 0 or n: carries no dependency information, excluded from search.
  bool degenerate(AttrId a) const {
    return supports_[a] == 0 || supports_[a] == n_;
  }
  // Mining needs at least two rows and two non-degenerate attributes.
  bool usable_for_mining() const;

  double mean_transaction_length() const;

  std::uint64_t support(const AttributeSet& s) const;
  BitVec cover(const AttributeSet& s) const;

  // Counts for the aligned pair (X, Q, consequent attr c at `polarity`).
  // Both polarity fields of the result are set to `polarity`; callers judging
  // a pair of rules with differing consequent values adjust polarity_x.
  PairCounts pair_counts(const AttributeSet& x, const AttributeSet& q,
                         AttrId c, int polarity) const;

 private:
  Dataset() = default;
  void finish_init();

  std::uint64_t n_ = 0;
  std::vector<std::string> names_;
  std::vector<BitVec> columns_;
  std::vector<std::uint64_t> supports_;
};

}  // namespace specrules
