#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "specrules/dataset.hpp"
#include "specrules/errors.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace specrules;
using testsupport::TempDir;
using testsupport::write_text;

namespace {

bool row_covered(const Dataset& d, const AttributeSet& s, std::uint64_t r) {
  return std::all_of(s.members().begin(), s.members().end(),
                     [&](AttrId a) { return d.column(a).test(r); });
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("attribute sets canonicalize, compare, and extend") {
  const AttributeSet s({3, 1, 2});
  CHECK(s.members() == std::vector<AttrId>{1, 2, 3});
  CHECK(s.contains(2));
  CHECK_FALSE(s.contains(4));
  CHECK_THROWS_AS(AttributeSet({1, 1}), std::invalid_argument);

  const AttributeSet sub({1, 3});
  CHECK(sub.is_subset_of(s));
  CHECK(sub.is_proper_subset_of(s));
  CHECK(s.is_subset_of(s));
  CHECK_FALSE(s.is_proper_subset_of(s));
  CHECK_FALSE(s.is_subset_of(sub));

  CHECK(sub.with(2) == s);
  CHECK_THROWS_AS(sub.with(1), std::invalid_argument);

  // Lexicographic on sorted members, shorter prefixes first.
  CHECK(AttributeSet({1}) < AttributeSet({1, 2}));
  CHECK(AttributeSet({1, 2}) < AttributeSet({2}));
  CHECK(AttributeSet() < AttributeSet({0}));
}

TEST_CASE("transaction input: small fixture") {
  TempDir tmp;
  const auto path = write_text(tmp.file("t.fimi"), "1 2\n2 3\n1 2 3\n");
  const Dataset d = Dataset::load_fimi(path);
  REQUIRE(d.n() == 3);
  REQUIRE(d.attr_count() == 3);
  CHECK(d.attr_name(0) == "1");
  CHECK(d.attr_name(1) == "2");
  CHECK(d.attr_name(2) == "3");
  CHECK(d.attr_support(0) == 2);
  CHECK(d.attr_support(1) == 3);
  CHECK(d.attr_support(2) == 2);
  CHECK(d.attr_index("3") == AttrId{2});
  CHECK_FALSE(d.attr_index("7").has_value());
  CHECK(d.support(AttributeSet({0, 1})) == 2);
  CHECK(d.support(AttributeSet({0, 2})) == 1);
  CHECK(d.mean_transaction_length() == doctest::Approx(7.0 / 3.0));
  CHECK(d.usable_for_mining());
  CHECK(d.degenerate(1));  // full column
  CHECK_FALSE(d.degenerate(0));
}

TEST_CASE("transaction input: id order, duplicates, blanks, whitespace") {
  TempDir tmp;
  const auto path =
      write_text(tmp.file("t.fimi"), "10 2\n\n2 2 10\n\t2  \n");
  const Dataset d = Dataset::load_fimi(path);
  REQUIRE(d.n() == 4);  // the blank line is an empty transaction
  REQUIRE(d.attr_count() == 2);
  // Attributes follow numeric id order, not string order.
  CHECK(d.attr_name(0) == "2");
  CHECK(d.attr_name(1) == "10");
  CHECK(d.attr_support(0) == 3);  // the duplicated "2 2" counts once
  CHECK(d.attr_support(1) == 2);
}

TEST_CASE("transaction input: empty file loads as an unusable dataset") {
  TempDir tmp;
  const Dataset d = Dataset::load_fimi(write_text(tmp.file("e.fimi"), ""));
  CHECK(d.n() == 0);
  CHECK(d.attr_count() == 0);
  CHECK_FALSE(d.usable_for_mining());
  CHECK(d.mean_transaction_length() == 0.0);
}

TEST_CASE("transaction input: malformed lines and missing files") {
  TempDir tmp;
  const auto junk = write_text(tmp.file("j.fimi"), "1 2\n1 x 2\n");
  CHECK_THROWS_AS(Dataset::load_fimi(junk), DataError);
  const std::string msg =
      message_of([&] { Dataset::load_fimi(junk); });
  CHECK(msg.find(":2:") != std::string::npos);  // errors carry line numbers

  const auto wide =
      write_text(tmp.file("w.fimi"), "1 4294967296\n");
  CHECK_THROWS_AS(Dataset::load_fimi(wide), DataError);
  const auto negative = write_text(tmp.file("n.fimi"), "1 -2\n");
  CHECK_THROWS_AS(Dataset::load_fimi(negative), DataError);

  CHECK_THROWS_AS(Dataset::load_fimi(tmp.file("absent.fimi")), IoError);
}

TEST_CASE("table input: header order never matters") {
  TempDir tmp;
  const auto ab =
      write_text(tmp.file("ab.csv"), "a,b\n0,1\n1,0\n1,1\n");
  const auto ba =
      write_text(tmp.file("ba.csv"), "b,a\n1,0\n0,1\n1,1\n");
  const Dataset d1 = Dataset::load_csv(ab);
  const Dataset d2 = Dataset::load_csv(ba);
  REQUIRE(d1.n() == 3);
  REQUIRE(d1.attr_count() == 2);
  CHECK(d1.attr_name(0) == "a");
  CHECK(d1.attr_name(1) == "b");
  REQUIRE(d2.attr_count() == 2);
  for (AttrId a = 0; a < 2; ++a) {
    CHECK(d1.attr_name(a) == d2.attr_name(a));
    CHECK(d1.column(a) == d2.column(a));
  }
  CHECK(d1.attr_support(0) == 2);
  CHECK(d1.attr_support(1) == 2);
  // Cells may carry spaces around them.
  const auto spaced = write_text(tmp.file("s.csv"), "a, b\n 1 ,0\n");
  const Dataset d3 = Dataset::load_csv(spaced);
  CHECK(d3.attr_support(0) == 1);
  CHECK(d3.attr_support(1) == 0);
}

TEST_CASE("table input: header-only file has zero rows") {
  TempDir tmp;
  const Dataset d =
      Dataset::load_csv(write_text(tmp.file("h.csv"), "a,b\n"));
  CHECK(d.n() == 0);
  CHECK(d.attr_count() == 2);
  CHECK_FALSE(d.usable_for_mining());
}

TEST_CASE("table input: malformed content is rejected with positions") {
  TempDir tmp;
  CHECK_THROWS_AS(Dataset::load_csv(write_text(tmp.file("e.csv"), "")),
                  DataError);
  CHECK_THROWS_AS(
      Dataset::load_csv(write_text(tmp.file("dup.csv"), "a,a\n0,1\n")),
      DataError);
  CHECK_THROWS_AS(
      Dataset::load_csv(write_text(tmp.file("noname.csv"), "a,,b\n0,1,0\n")),
      DataError);

  const auto badcell =
      write_text(tmp.file("cell.csv"), "a,b\n0,1\n0,2\n");
  CHECK_THROWS_AS(Dataset::load_csv(badcell), DataError);
  CHECK(message_of([&] { Dataset::load_csv(badcell); })
            .find(":3:") != std::string::npos);

  const auto ragged = write_text(tmp.file("ragged.csv"), "a,b\n0,1,1\n");
  CHECK_THROWS_AS(Dataset::load_csv(ragged), DataError);
  const auto trailing = write_text(tmp.file("trail.csv"), "a,b\n0,1,\n");
  CHECK_THROWS_AS(Dataset::load_csv(trailing), DataError);

  CHECK_THROWS_AS(Dataset::load_csv(tmp.file("absent.csv")), IoError);
}

TEST_CASE("direct construction validates shapes") {
  BitVec c0(3), c1(3);
  c0.set(0);
  c1.set(1);
  c1.set(2);
  const Dataset d({"p", "q"}, {c0, c1}, 3);
  CHECK(d.attr_support(0) == 1);
  CHECK(d.attr_support(1) == 2);
  CHECK_THROWS_AS(Dataset({"p"}, {c0, c1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({"p", "q"}, {c0, BitVec(4)}, 3),
                  std::invalid_argument);
}

TEST_CASE("round-trips through both formats preserve the table") {
  testsupport::Rng rng(9001);
  TempDir tmp;
  for (int it = 0; it < 25; ++it) {
    const Dataset d = testsupport::random_dataset(rng, 9, 120);

    // The table format keeps every column, including empty ones.
    const auto csv = tmp.file("r.csv");
    d.write_csv(csv);
    const Dataset dc = Dataset::load_csv(csv);
    REQUIRE(dc.n() == d.n());
    REQUIRE(dc.attr_count() == d.attr_count());
    for (AttrId a = 0; a < d.attr_count(); ++a) {
      const auto idx = dc.attr_index(d.attr_name(a));
      REQUIRE(idx.has_value());
      CHECK(dc.column(*idx) == d.column(a));
    }

    // The transaction format stores only set bits, so unused attributes
    // disappear; everything else survives.
    const auto fimi = tmp.file("r.fimi");
    d.write_fimi(fimi);
    const Dataset df = Dataset::load_fimi(fimi);
    REQUIRE(df.n() == d.n());
    std::size_t live = 0;
    for (AttrId a = 0; a < d.attr_count(); ++a) {
      if (d.attr_support(a) == 0) continue;
      ++live;
      const auto idx = df.attr_index(d.attr_name(a));
      REQUIRE(idx.has_value());
      CHECK(df.column(*idx) == d.column(a));
    }
    CHECK(df.attr_count() == live);
  }

  // Transaction output requires integer attribute names.
  BitVec one(1);
  one.set(0);
  const Dataset named({"width"}, {one}, 1);
  CHECK_THROWS_AS(named.write_fimi(tmp.file("x.fimi")), DataError);
}

TEST_CASE("support queries match a row census and are anti-monotone") {
  testsupport::Rng rng(9002);
  for (int it = 0; it < 40; ++it) {
    const Dataset d = testsupport::random_dataset(rng, 10, 150);
    CHECK(d.support(AttributeSet()) == d.n());
    CHECK(d.cover(AttributeSet()).count() == d.n());
    for (int probe = 0; probe < 30; ++probe) {
      std::vector<AttrId> m;
      for (AttrId a = 0; a < d.attr_count(); ++a)
        if (rng() % 3 == 0) m.push_back(a);
      const AttributeSet s(std::move(m));
      std::uint64_t census = 0;
      for (std::uint64_t r = 0; r < d.n(); ++r)
        if (row_covered(d, s, r)) ++census;
      CHECK(d.support(s) == census);
      CHECK(d.cover(s).count() == census);
      if (!s.empty()) {
        // Dropping a member can only widen the cover.
        std::vector<AttrId> fewer(s.members().begin(),
                                  s.members().end() - 1);
        CHECK(d.support(AttributeSet(std::move(fewer))) >= census);
      }
    }
  }
  const Dataset d = testsupport::random_dataset(rng, 5, 50);
  CHECK_THROWS_AS(d.support(AttributeSet({AttrId(99)})), std::invalid_argument);
}

TEST_CASE("pair counts match a row-by-row census at both polarities") {
  testsupport::Rng rng(9003);
  for (int it = 0; it < 30; ++it) {
    const Dataset d = testsupport::random_dataset(rng, 8, 120);
    for (int probe = 0; probe < 20; ++probe) {
      std::vector<AttrId> xm, qm;
      for (AttrId a = 0; a < d.attr_count(); ++a) {
        if (rng() % 3 == 0) xm.push_back(a);
        if (rng() % 3 == 0) qm.push_back(a);
      }
      const AttributeSet x(std::move(xm)), q(std::move(qm));
      const AttrId c = static_cast<AttrId>(rng() % d.attr_count());
      for (int polarity : {1, 0}) {
        const PairCounts pc = d.pair_counts(x, q, c, polarity);
        REQUIRE(pc.consistent());
        CHECK(pc.polarity_q == polarity);
        CHECK(pc.polarity_x == polarity);
        PairCounts ref;
        ref.n = d.n();
        for (std::uint64_t r = 0; r < d.n(); ++r) {
          const bool in_x = row_covered(d, x, r);
          const bool in_q = row_covered(d, q, r);
          const bool lit = d.column(c).test(r) == (polarity == 1);
          ref.n_x += in_x;
          ref.n_q += in_q;
          ref.n_c += lit;
          ref.n_xq += in_x && in_q;
          ref.n_xc += in_x && lit;
          ref.n_qc += in_q && lit;
          ref.n_xqc += in_x && in_q && lit;
        }
        CHECK(pc.n_x == ref.n_x);
        CHECK(pc.n_q == ref.n_q);
        CHECK(pc.n_c == ref.n_c);
        CHECK(pc.n_xq == ref.n_xq);
        CHECK(pc.n_xc == ref.n_xc);
        CHECK(pc.n_qc == ref.n_qc);
        CHECK(pc.n_xqc == ref.n_xqc);
      }
    }
    // Identical antecedents collapse the X/Q distinction.
    const AttributeSet s({0});
    const PairCounts same = d.pair_counts(s, s, 1, 1);
    CHECK(same.n_x == same.n_q);
    CHECK(same.n_x == same.n_xq);
    CHECK(same.n_xc == same.n_qc);
  }
  const Dataset d = testsupport::random_dataset(rng, 5, 50);
  CHECK_THROWS_AS(d.pair_counts(AttributeSet(), AttributeSet(), 99, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(d.pair_counts(AttributeSet(), AttributeSet(), 0, 2),
                  std::invalid_argument);
}

TEST_CASE("mining usability needs rows and two live attributes") {
  BitVec half2(2), full2(2), empty2(2);
  half2.set(0);
  full2.set(0);
  full2.set(1);
  CHECK_FALSE(Dataset({"a", "b"}, {BitVec(1), BitVec(1)}, 1)
                  .usable_for_mining());  // one row
  CHECK_FALSE(Dataset({"a", "b"}, {full2, empty2}, 2)
                  .usable_for_mining());  // only degenerate columns
  CHECK_FALSE(Dataset({"a", "b"}, {half2, full2}, 2)
                  .usable_for_mining());  // one live column
  BitVec other(2);
  other.set(1);
  CHECK(Dataset({"a", "b"}, {half2, other}, 2).usable_for_mining());
}
