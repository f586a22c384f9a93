#ifndef CHEMSCORE_SMILES_HPP
#define CHEMSCORE_SMILES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemscore::chem {

enum class BondOrder : std::uint8_t { Single, Double, Triple, Aromatic };

// Kept as written; ignored for equality and fingerprints.
enum class Chirality : std::uint8_t { None, Anticlockwise, Clockwise };

struct Atom {
  std::string element;   // normalized symbol, e.g. "C", "Cl"
  int charge = 0;
  int explicit_h = 0;    // bracket-specified, or valence-derived for bare atoms
  bool aromatic = false; // parsed from a lowercase token
  bool in_bracket = false;
  int isotope = 0;       // 0 = unspecified
  Chirality chirality = Chirality::None;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
  // Directional annotation from '/' (+1) or '\' (-1), relative to atom a.
  int stereo_dir = 0;
};

struct MolecularGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  std::size_t size() const { return atoms.size(); }
  std::vector<std::vector<int>> adjacency() const;  // bond indices per atom
};

enum class SmilesErrorKind {
  EmptyInput,
  UnbalancedBranch,
  UnbalancedBracket,
  UnmatchedRingClosure,
  UnknownToken,
};

class SmilesError : public std::runtime_error {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t position, const std::string& what)
      : std::runtime_error(what), kind_(kind), position_(position) {}

  SmilesErrorKind kind() const { return kind_; }
  // Offset of the first offending character.
  std::size_t position() const { return position_; }

 private:
  SmilesErrorKind kind_;
  std::size_t position_;
};

const char* to_string(SmilesErrorKind kind);

// Parses the organic subset plus bracket atoms (isotope, chirality, H count,
// charge, atom class), bonds - = # : / \, branches, ring closures 0-9 and
// %nn, aromatic lowercase, and dot disconnection. Aromaticity is taken as
// written; no Kekule re-derivation.
MolecularGraph parse_smiles(std::string_view s);

bool is_valid_smiles(std::string_view s) noexcept;

// Hydrogens a bare (non-bracket) atom of this element would carry given the
// incident bond orders, following the default-valence rule the parser uses.
// bond_order_sum_x2 counts single=2, double=4, triple=6, aromatic=3.
int implied_hydrogens(const std::string& element, bool aromatic,
                      int bond_order_sum_x2);

bool is_organic_subset(const std::string& element);

}  // namespace chemscore::chem

#endif  // CHEMSCORE_SMILES_HPP
