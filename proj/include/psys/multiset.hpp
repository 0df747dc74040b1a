#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psys/count.hpp"

namespace psys {

struct SymbolId {
  std::uint32_t value = 0;
  friend auto operator<=>(SymbolId, SymbolId) = default;
};

/// Interning table for object names (the alphabet Γ). Ids are dense and
/// assigned in registration order.
class Alphabet {
 public:
  SymbolId intern(std::string_view name);
  std::optional<SymbolId> find(std::string_view name) const;
  const std::string& name(SymbolId id) const { return names_.at(id.value); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Symbol -> count map kept sorted by id with no zero entries.
class Multiset {
 public:
  using Entry = std::pair<SymbolId, Count>;

  Multiset() = default;
  Multiset(std::initializer_list<Entry> entries);

  Count count(SymbolId s) const;
  bool empty() const { return entries_.empty(); }
  std::size_t distinct() const { return entries_.size(); }
  Count total() const;

  void add(SymbolId s, Count n);
  void add(const Multiset& other, Count times = 1);
  /// Removing more than is present is a contract violation (std::logic_error).
  void subtract(SymbolId s, Count n);
  void subtract(const Multiset& other, Count times = 1);

  bool covers(const Multiset& need) const;
  /// Largest k with k*need <= *this. `need` must be non-empty.
  Count max_copies(const Multiset& need) const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const Multiset&, const Multiset&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Human-readable `a^3 d` rendering (empty multiset renders as "").
std::string format_multiset(const Multiset& m, const Alphabet& alphabet);

}  // namespace psys
