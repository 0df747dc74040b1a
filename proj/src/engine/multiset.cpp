#include "psys/multiset.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace psys {

SymbolId Alphabet::intern(std::string_view name) {
  if (auto found = find(name)) return *found;
  SymbolId id{static_cast<std::uint32_t>(names_.size())};
  names_.emplace_back(name);
  index_.emplace(names_.back(), id.value);
  return id;
}

std::optional<SymbolId> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return SymbolId{it->second};
}

Multiset::Multiset(std::initializer_list<Entry> entries) {
  for (const auto& [s, n] : entries) add(s, n);
}

namespace {
auto lower(std::vector<Multiset::Entry>& v, SymbolId s) {
  return std::lower_bound(v.begin(), v.end(), s,
                          [](const Multiset::Entry& e, SymbolId key) { return e.first < key; });
}
auto lower(const std::vector<Multiset::Entry>& v, SymbolId s) {
  return std::lower_bound(v.begin(), v.end(), s,
                          [](const Multiset::Entry& e, SymbolId key) { return e.first < key; });
}
}  // namespace

Count Multiset::count(SymbolId s) const {
  auto it = lower(entries_, s);
  return (it != entries_.end() && it->first == s) ? it->second : Count{0};
}

Count Multiset::total() const {
  Count t = 0;
  for (const auto& e : entries_) t = checked_add(t, e.second);
  return t;
}

void Multiset::add(SymbolId s, Count n) {
  if (n == 0) return;
  auto it = lower(entries_, s);
  if (it != entries_.end() && it->first == s) {
    it->second = checked_add(it->second, n);
  } else {
    entries_.insert(it, {s, n});
  }
}

void Multiset::add(const Multiset& other, Count times) {
  if (times == 0) return;
  for (const auto& [s, n] : other.entries_) add(s, checked_mul(n, times));
}

void Multiset::subtract(SymbolId s, Count n) {
  if (n == 0) return;
  auto it = lower(entries_, s);
  if (it == entries_.end() || it->first != s || it->second < n) {
    throw std::logic_error("multiset subtraction below zero");
  }
  it->second -= n;
  if (it->second == 0) entries_.erase(it);
}

void Multiset::subtract(const Multiset& other, Count times) {
  if (times == 0) return;
  for (const auto& [s, n] : other.entries_) subtract(s, checked_mul(n, times));
}

bool Multiset::covers(const Multiset& need) const {
  for (const auto& [s, n] : need.entries_) {
    if (count(s) < n) return false;
  }
  return true;
}

Count Multiset::max_copies(const Multiset& need) const {
  if (need.empty()) throw std::logic_error("max_copies of empty multiset");
  Count best = std::numeric_limits<Count>::max();
  for (const auto& [s, n] : need.entries_) {
    Count k = count(s) / n;
    if (k < best) best = k;
    if (best == 0) break;
  }
  return best;
}

std::string format_multiset(const Multiset& m, const Alphabet& alphabet) {
  std::string out;
  for (const auto& [s, n] : m) {
    if (!out.empty()) out.push_back(' ');
    out += alphabet.name(s);
    if (n != 1) {
      out.push_back('^');
      out += to_string(n);
    }
  }
  return out;
}

}  // namespace psys
