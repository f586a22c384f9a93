#ifndef CHEMSCORE_CORRUPTION_HPP
#define CHEMSCORE_CORRUPTION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemscore::corrupt {

struct CorruptionConfig {
  double rate = 0.2;                        // rho in (0, 1]
  std::uint64_t seed = 0;
  std::string grammar_set = "()[]0123456789";

  void validate() const;
};

class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseFailure : public CorruptionError {
 public:
  using CorruptionError::CorruptionError;
};

class PoolTooSmall : public CorruptionError {
 public:
  using CorruptionError::CorruptionError;
};

// Deletes a uniformly random subset of the grammar characters in s, of size
// max(1, floor(rate * |I|)) where I is the set of grammar positions; s is
// returned unchanged when it has no grammar characters. Output order is
// preserved. No validity filtering is applied to the result.
std::string corrupt_smiles(std::string_view s, const CorruptionConfig& cfg);

// Replaces max(1, floor(rate * k)) of the k structural tokens (element
// symbols and the <sgN> tag) of a composition line with U+FFFD, which is
// never parseable. Throws ParseFailure if s is not a valid sequence line.
std::string corrupt_composition(std::string_view s, const CorruptionConfig& cfg);

// Replaces one uniformly chosen sentence of pool[index] with one uniformly
// chosen sentence from a different pool member. The description head (the
// text before the first " is " of a first sentence, i.e. the molecule or
// crystal identifier) stays in place. Throws PoolTooSmall if pool has < 2
// entries.
std::string corrupt_description(const std::vector<std::string>& pool,
                                std::size_t index, std::uint64_t seed);

struct Sentence {
  std::string text;
  std::string delimiter;  // the separator that followed it, if any
};

// Splits on ". " followed by an uppercase letter, outside (), [] and {}.
// Decimal numbers never match because they lack the space.
std::vector<Sentence> split_sentences(std::string_view text);

}  // namespace chemscore::corrupt

#endif  // CHEMSCORE_CORRUPTION_HPP
