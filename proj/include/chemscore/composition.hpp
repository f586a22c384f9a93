#ifndef CHEMSCORE_COMPOSITION_HPP
#define CHEMSCORE_COMPOSITION_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chemscore/elements.hpp"

namespace chemscore::chem {

enum class CompositionErrorKind {
  MissingMaterialTags,
  UnknownElement,
  BadSpaceGroup,
};

class CompositionError : public std::runtime_error {
 public:
  CompositionError(CompositionErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  CompositionErrorKind kind() const { return kind_; }

 private:
  CompositionErrorKind kind_;
};

// Flattened crystal spec: element tokens plus a space-group tag, as in
// "O O Te Tm Tm Te <sg127>".
struct CompositionSequence {
  std::vector<std::string> elements;  // in written order; multiset semantics
  int space_group = 0;

  std::map<std::string, int> counts() const;
  // Sorted elements with gcd-reduced multiplicities plus the space group;
  // the identity used for novelty checks.
  std::string normalized_key() const;
};

// Parses the payload of a "<material> ... <sgN> </material>" block.
CompositionSequence parse_composition(std::string_view s);

// Parses a bare "A B A <sgN>" token line (no material tags).
CompositionSequence parse_composition_sequence(std::string_view s);

// True iff one common oxidation state per element (from the bundled table)
// can be assigned so the stoichiometry-weighted charges sum to zero.
bool charge_neutral_valid(const CompositionSequence& c,
                          const PeriodicTable& table = PeriodicTable::bundled());

}  // namespace chemscore::chem

#endif  // CHEMSCORE_COMPOSITION_HPP
