#ifndef CHEMSCORE_CANONICAL_HPP
#define CHEMSCORE_CANONICAL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chemscore/smiles.hpp"

namespace chemscore::chem {

// Deterministic canonical spelling: iterative neighborhood-rank refinement
// with lexicographic tie-breaking, then DFS emission. Equality of two
// molecules is defined as equality of these strings; stereo annotations and
// isotopes are dropped.
std::string canonical_form(const MolecularGraph& g);

// True iff both parse and have equal canonical forms. Never throws.
bool same_molecule(std::string_view a, std::string_view b) noexcept;

// Emits a SMILES spelling that starts from the lowest-priority atom and
// visits neighbors in priority order. priority must be a permutation of
// 0..n-1.
std::string write_smiles(const MolecularGraph& g,
                         const std::vector<int>& priority);

// A valid respelling of g under a seeded random atom order.
std::string random_spelling(const MolecularGraph& g, std::uint64_t seed);

}  // namespace chemscore::chem

#endif  // CHEMSCORE_CANONICAL_HPP
