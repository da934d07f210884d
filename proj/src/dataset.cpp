#include "specrules/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "specrules/errors.hpp"

namespace specrules {

AttributeSet::AttributeSet(std::vector<AttrId> members)
    : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw std::invalid_argument("attribute set with duplicate member");
}

bool AttributeSet::contains(AttrId a) const {
  return std::binary_search(members_.begin(), members_.end(), a);
}

bool AttributeSet::is_subset_of(const AttributeSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(),
                       members_.begin(), members_.end());
}

AttributeSet AttributeSet::with(AttrId a) const {
  std::vector<AttrId> m = members_;
  m.push_back(a);
  return AttributeSet(std::move(m));
}

Dataset::Dataset(std::vector<std::string> names, std::vector<BitVec> columns,
                 std::uint64_t n)
    : n_(n), names_(std::move(names)), columns_(std::move(columns)) {
  if (names_.size() != columns_.size())
    throw std::invalid_argument("names/columns size mismatch");
  for (const BitVec& c : columns_)
    if (c.size() != n_) throw std::invalid_argument("column length != n");
  finish_init();
}

void Dataset::finish_init() {
  supports_.resize(columns_.size());
  for (std::size_t a = 0; a < columns_.size(); ++a)
    supports_[a] = columns_[a].count();
}

namespace {

// Whole-line whitespace split into unsigned ints; returns false on junk.
bool parse_items(const std::string& line, std::vector<std::uint64_t>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (p != end) {
    while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    std::uint64_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || next == p) return false;
    p = next;
    if (p != end && *p != ' ' && *p != '\t' && *p != '\r') return false;
    out.push_back(v);
  }
  return true;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset Dataset::load_fimi(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file: " + path);

  std::vector<std::vector<std::uint64_t>> rows;
  std::vector<std::uint64_t> items;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::uint64_t, AttrId> id_index;  // ordered: numeric id order
  while (std::getline(in, line)) {
    ++lineno;
    if (!parse_items(line, items))
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected whitespace-separated non-negative item ids");
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    for (std::uint64_t v : items) {
      if (v > 0xffffffffull)
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": item id out of range: " + std::to_string(v));
      id_index.emplace(v, 0);
    }
    rows.push_back(items);
  }
  if (in.bad()) throw IoError("read error on " + path);

  Dataset d;
  d.n_ = rows.size();
  AttrId next = 0;
  for (auto& [id, idx] : id_index) {
    idx = next++;
    d.names_.push_back(std::to_string(id));
  }
  d.columns_.assign(id_index.size(), BitVec(d.n_));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::uint64_t v : rows[r]) d.columns_[id_index[v]].set(r);
  d.finish_init();
  return d;
}

Dataset Dataset::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing CSV header");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') header.push_back("");
  }
  for (const std::string& h : header)
    if (h.empty()) throw DataError(path + ": empty attribute name in header");

  // Index attributes by sorted name so column order in the file is irrelevant.
  std::vector<std::size_t> order(header.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return header[a] < header[b];
  });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (header[order[i - 1]] == header[order[i]])
      throw DataError(path + ": duplicate attribute name: " + header[order[i]]);

  std::vector<std::vector<bool>> rows;  // file column order
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<bool> row;
    row.reserve(header.size());
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const std::string t = trim(cell);
      if (t == "0")
        row.push_back(false);
      else if (t == "1")
        row.push_back(true);
      else
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": cell must be 0 or 1, got '" + t + "'");
    }
    if (!line.empty() && line.back() == ',')
      throw DataError(path + ":" + std::to_string(lineno) + ": empty cell");
    if (row.size() != header.size())
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("read error on " + path);

  Dataset d;
  d.n_ = rows.size();
  d.names_.reserve(header.size());
  d.columns_.assign(header.size(), BitVec(d.n_));
  for (std::size_t a = 0; a < order.size(); ++a) {
    d.names_.push_back(header[order[a]]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (rows[r][order[a]]) d.columns_[a].set(r);
  }
  d.finish_init();
  return d;
}

void Dataset::write_fimi(const std::string& path) const {
  std::vector<std::uint64_t> ids(names_.size());
  for (std::size_t a = 0; a < names_.size(); ++a) {
    std::uint64_t v = 0;
    auto [next, ec] =
        std::from_chars(names_[a].data(), names_[a].data() + names_[a].size(), v);
    if (ec != std::errc() || next != names_[a].data() + names_[a].size())
      throw DataError("attribute name '" + names_[a] +
                      "' is not an integer id; transaction output needs "
                      "integer-named attributes");
    ids[a] = v;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  for (std::uint64_t r = 0; r < n_; ++r) {
    bool first = true;
    for (std::size_t a = 0; a < columns_.size(); ++a) {
      if (!columns_[a].test(r)) continue;
      if (!first) out << ' ';
      out << ids[a];
      first = false;
    }
    out << '\n';
  }
  if (!out) throw IoError("write error on " + path);
}

void Dataset::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  for (std::size_t a = 0; a < names_.size(); ++a)
    out << (a ? "," : "") << names_[a];
  out << '\n';
  for (std::uint64_t r = 0; r < n_; ++r) {
    for (std::size_t a = 0; a < columns_.size(); ++a)
      out << (a ? "," : "") << (columns_[a].test(r) ? '1' : '0');
    out << '\n';
  }
  if (!out) throw IoError("write error on " + path);
}

std::optional<AttrId> Dataset::attr_index(const std::string& name) const {
  for (std::size_t a = 0; a < names_.size(); ++a)
    if (names_[a] == name) return static_cast<AttrId>(a);
  return std::nullopt;
}

bool Dataset::usable_for_mining() const {
  if (n_ < 2) return false;
  std::size_t live = 0;
  for (std::size_t a = 0; a < columns_.size(); ++a)
    if (!degenerate(static_cast<AttrId>(a))) ++live;
  return live >= 2;
}

double Dataset::mean_transaction_length() const {
  if (n_ == 0) return 0.0;
  std::uint64_t total = 0;
  for (std::uint64_t s : supports_) total += s;
  return static_cast<double>(total) / static_cast<double>(n_);
}

std::uint64_t Dataset::support(const AttributeSet& s) const {
  if (s.empty()) return n_;
  for (AttrId a : s.members())
    if (a >= columns_.size()) throw std::invalid_argument("attribute id out of range");
  if (s.size() == 1) return supports_[s.members()[0]];
  if (s.size() == 2)
    return BitVec::and_count(columns_[s.members()[0]], columns_[s.members()[1]]);
  return cover(s).count();
}

BitVec Dataset::cover(const AttributeSet& s) const {
  for (AttrId a : s.members())
    if (a >= columns_.size()) throw std::invalid_argument("attribute id out of range");
  if (s.empty()) {
    BitVec all(n_);
    return all.complemented();  // all ones
  }
  BitVec acc = columns_[s.members()[0]];
  for (std::size_t i = 1; i < s.size(); ++i) acc.and_with(columns_[s.members()[i]]);
  return acc;
}

PairCounts Dataset::pair_counts(const AttributeSet& x, const AttributeSet& q,
                                AttrId c, int polarity) const {
  if (c >= columns_.size()) throw std::invalid_argument("consequent id out of range");
  if (polarity != 0 && polarity != 1)
    throw std::invalid_argument("polarity must be 0 or 1");

  const BitVec cx = cover(x);
  const BitVec cq = cover(q);
  const BitVec& cc = columns_[c];

  PairCounts pc;
  pc.n = n_;
  pc.n_x = cx.count();
  pc.n_q = cq.count();
  pc.n_xq = BitVec::and_count(cx, cq);
  const std::uint64_t c1 = supports_[c];
  const std::uint64_t xc1 = BitVec::and_count(cx, cc);
  const std::uint64_t qc1 = BitVec::and_count(cq, cc);
  const std::uint64_t xqc1 = BitVec::and_count(cx, cq, cc);
  if (polarity == 1) {
    pc.n_c = c1;
    pc.n_xc = xc1;
    pc.n_qc = qc1;
    pc.n_xqc = xqc1;
  } else {
    pc.n_c = n_ - c1;
    pc.n_xc = pc.n_x - xc1;
    pc.n_qc = pc.n_q - qc1;
    pc.n_xqc = pc.n_xq - xqc1;
  }
  pc.polarity_q = polarity;
  pc.polarity_x = polarity;
  return pc;
}

}  // namespace specrules
