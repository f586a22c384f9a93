#ifndef CHEMSCORE_FINGERPRINT_HPP
#define CHEMSCORE_FINGERPRINT_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "chemscore/smiles.hpp"

namespace chemscore::chem {

class WidthMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Fingerprint {
  std::vector<std::uint64_t> words;
  int width = 0;
  int radius = 0;

  static Fingerprint zeros(int width, int radius = 0);

  void set(int bit) { words[bit >> 6] |= 1ull << (bit & 63); }
  bool test(int bit) const { return (words[bit >> 6] >> (bit & 63)) & 1ull; }
  int popcount() const;
};

inline constexpr int kDefaultFpRadius = 2;
inline constexpr int kDefaultFpWidth = 2048;

// ECFP-style circular fingerprint. The initial atom invariant is
// (element, degree, charge, explicit_h, aromatic); each radius-r
// environment hashes into one bit. width must be a power of two.
Fingerprint morgan_fingerprint(const MolecularGraph& g,
                               int radius = kDefaultFpRadius,
                               int width = kDefaultFpWidth);

// |a & b| / |a | b|; 1.0 when both are all-zero. Throws WidthMismatch.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace chemscore::chem

#endif  // CHEMSCORE_FINGERPRINT_HPP
