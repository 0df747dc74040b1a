#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "psys/multiset.hpp"

namespace psys {

enum class Polarization : std::uint8_t { neutral, positive, negative };

/// '0', '+' or '-'.
char polarization_char(Polarization p);

enum class RuleKind : std::uint8_t { evolution, send_out, send_in };

using MembraneIndex = std::size_t;
using RuleIndex = std::size_t;

struct Membrane {
  std::string label;
  std::optional<MembraneIndex> parent;  // nullopt only for the skin
  std::vector<MembraneIndex> children;
};

/// One rule attached to membrane `membrane`.
///
/// - evolution: consumes `lhs` in h, produces `inside` in h; polarization kept.
/// - send_out: consumes `lhs` in h, produces `outside` in the parent region
///   (environment for the skin) and `inside` in h; h becomes `beta`.
/// - send_in: consumes `lhs` in the parent region, produces `inside` in h and
///   `outside` in the parent; h becomes `beta`. Not allowed on the skin.
///
/// `inside` on send_out and `outside` on send_in cover the relief-system rules that
/// leave a marker object on the other side of the membrane.
struct Rule {
  std::string id;
  RuleKind kind = RuleKind::evolution;
  MembraneIndex membrane = 0;
  Multiset lhs;
  Multiset inside;
  Multiset outside;
  Polarization alpha = Polarization::neutral;
  Polarization beta = Polarization::neutral;
};

/// (higher, lower): `lower` may only use what is left once `higher` cannot
/// fire any more times.
struct PriorityPair {
  RuleIndex higher = 0;
  RuleIndex lower = 0;
};

class DefinitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Static description of a transition P system with membrane polarization.
/// Membrane 0 is the skin. Rules keep declaration order, which the
/// deterministic scheduler uses as its tie-break.
class PSystemDef {
 public:
  Alphabet alphabet;
  std::vector<Membrane> membranes;
  std::vector<Multiset> initial;  // parallel to membranes
  std::vector<Rule> rules;
  std::vector<PriorityPair> priorities;
  std::optional<MembraneIndex> output;  // nullopt: the environment

  MembraneIndex add_skin(std::string label);
  MembraneIndex add_membrane(std::string label, MembraneIndex parent);
  RuleIndex add_rule(Rule rule);
  void add_priority(std::string_view higher_id, std::string_view lower_id);

  std::optional<MembraneIndex> find_membrane(std::string_view label) const;
  std::optional<RuleIndex> find_rule(std::string_view id) const;
  MembraneIndex membrane(std::string_view label) const;  // throws DefinitionError
  const std::string& label(MembraneIndex m) const { return membranes.at(m).label; }

  /// Region that `rule` consumes from: h itself, or h's parent for send_in.
  MembraneIndex source_region(const Rule& rule) const;

  /// All invariant violations; empty when the definition is well formed.
  std::vector<std::string> problems() const;
  /// Throws DefinitionError listing every problem.
  void validate() const;
};

/// Name-based structural equality (symbol ids may differ between the two).
bool structurally_equal(const PSystemDef& a, const PSystemDef& b);

}  // namespace psys
