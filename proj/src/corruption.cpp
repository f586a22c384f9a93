#include "chemscore/corruption.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "chemscore/composition.hpp"
#include "chemscore/rng.hpp"
#include "chemscore/text.hpp"

namespace chemscore::corrupt {

namespace {

constexpr std::string_view kReplacementChar = "\xEF\xBF\xBD";  // U+FFFD

std::size_t removal_count(double rate, std::size_t n) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(rate * static_cast<double>(n))));
}

}  // namespace

void CorruptionConfig::validate() const {
  if (!(rate > 0.0) || rate > 1.0) {
    throw CorruptionError("corruption rate must be in (0, 1]");
  }
  if (grammar_set.empty()) {
    throw CorruptionError("grammar set must be nonempty");
  }
}

std::string corrupt_smiles(std::string_view s, const CorruptionConfig& cfg) {
  cfg.validate();
  std::array<bool, 256> in_grammar{};
  for (unsigned char c : cfg.grammar_set) in_grammar[c] = true;

  std::vector<std::size_t> grammar_positions;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (in_grammar[static_cast<unsigned char>(s[i])]) grammar_positions.push_back(i);
  }
  if (grammar_positions.empty()) return std::string(s);

  std::size_t n_remove = removal_count(cfg.rate, grammar_positions.size());
  SplitMix64 rng(cfg.seed);
  std::vector<std::size_t> picks =
      rng.sample_indices(grammar_positions.size(), n_remove);
  std::vector<bool> removed(s.size(), false);
  for (std::size_t p : picks) removed[grammar_positions[p]] = true;

  std::string out;
  out.reserve(s.size() - n_remove);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!removed[i]) out.push_back(s[i]);
  }
  return out;
}

std::string corrupt_composition(std::string_view s, const CorruptionConfig& cfg) {
  cfg.validate();
  try {
    chem::parse_composition_sequence(s);
  } catch (const chem::CompositionError& e) {
    throw ParseFailure(std::string("not a composition line: ") + e.what());
  }
  std::vector<std::string> tokens = split_ws(s);
  std::size_t n_replace = removal_count(cfg.rate, tokens.size());
  SplitMix64 rng(cfg.seed);
  for (std::size_t p : rng.sample_indices(tokens.size(), n_replace)) {
    tokens[p] = kReplacementChar;
  }
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  int depth = 0;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') depth = std::max(0, depth - 1);
    if (c == '.' && depth == 0 && i + 1 < text.size() && text[i + 1] == ' ') {
      std::size_t next = i + 1;
      while (next < text.size() && text[next] == ' ') ++next;
      if (next < text.size() && std::isupper(static_cast<unsigned char>(text[next]))) {
        out.push_back(Sentence{std::string(text.substr(start, i - start)),
                               std::string(text.substr(i, next - i))});
        start = next;
        i = next;
        continue;
      }
    }
    ++i;
  }
  if (start < text.size()) {
    out.push_back(Sentence{std::string(text.substr(start)), ""});
  }
  return out;
}

namespace {

// "X is a sulfonamide ..." -> head "X", predicate "is a sulfonamide ...".
// Only first sentences carry a head.
std::pair<std::string, std::string> split_head(const std::string& sentence) {
  std::size_t pos = sentence.find(" is ");
  if (pos == std::string::npos) return {"", sentence};
  return {sentence.substr(0, pos), sentence.substr(pos + 1)};
}

}  // namespace

std::string corrupt_description(const std::vector<std::string>& pool,
                                std::size_t index, std::uint64_t seed) {
  if (pool.size() < 2) {
    throw PoolTooSmall("description pool needs at least 2 entries");
  }
  if (index >= pool.size()) {
    throw CorruptionError("pool index out of range");
  }
  SplitMix64 rng(seed);

  std::vector<Sentence> sentences = split_sentences(pool[index]);
  if (sentences.empty()) {
    throw CorruptionError("description has no sentences");
  }
  std::size_t victim = static_cast<std::size_t>(rng.next_below(sentences.size()));

  std::size_t donor_member = static_cast<std::size_t>(rng.next_below(pool.size() - 1));
  if (donor_member >= index) ++donor_member;
  std::vector<Sentence> donor_sentences = split_sentences(pool[donor_member]);
  if (donor_sentences.empty()) {
    throw CorruptionError("donor description has no sentences");
  }
  std::size_t donor_slot =
      static_cast<std::size_t>(rng.next_below(donor_sentences.size()));

  std::string donor_text = donor_sentences[donor_slot].text;
  std::string replacement;
  if (victim == 0) {
    // Keep the target identifier; splice in the donor's predicate.
    auto [head, predicate] = split_head(sentences[victim].text);
    std::string donor_predicate =
        donor_slot == 0 ? split_head(donor_text).second : donor_text;
    replacement =
        head.empty() ? donor_predicate : head + " " + donor_predicate;
  } else {
    replacement = donor_text;
  }

  std::string out;
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    out += (k == victim) ? replacement : sentences[k].text;
    out += sentences[k].delimiter;
  }
  return out;
}

}  // namespace chemscore::corrupt
