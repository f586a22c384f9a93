#include <doctest.h>

#include <cmath>
#include <set>

#include "chemscore/composition.hpp"
#include "chemscore/corruption.hpp"
#include "chemscore/rng.hpp"
#include "chemscore/smiles.hpp"
#include "chemscore/text.hpp"
#include "helpers.hpp"

using namespace chemscore;
using namespace chemscore::corrupt;

namespace {

std::size_t grammar_count(std::string_view s, const std::string& grammar) {
  std::size_t n = 0;
  for (char c : s) n += grammar.find(c) != std::string::npos;
  return n;
}

}  // namespace

TEST_CASE("strings without grammar characters pass through unchanged") {
  CorruptionConfig cfg;
  cfg.rate = 0.2;
  cfg.seed = 1;
  CHECK(corrupt_smiles("CCO", cfg) == "CCO");
  CHECK(corrupt_smiles("CCNCC", cfg) == "CCNCC");
}

TEST_CASE("removal count is exactly max(1, floor(rate * |I|))") {
  CorruptionConfig cfg;
  cfg.rate = 0.2;
  // 14 grammar characters -> floor(2.8) = 2 removals.
  std::string s = "C1CC1C2CC2C3CC3C4CC4C5CC5C6CC6(C)";
  REQUIRE(grammar_count(s, cfg.grammar_set) == 14);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    CHECK(corrupt_smiles(s, cfg).size() == s.size() - 2);
  }
  // Small |I| still removes one character.
  cfg.seed = 3;
  CHECK(corrupt_smiles("C1CCCCC1", cfg).size() == 7);
  // rate 1 removes every grammar character.
  cfg.rate = 1.0;
  std::string all_removed = corrupt_smiles("C1CC(N)C1", cfg);
  CHECK(grammar_count(all_removed, cfg.grammar_set) == 0);
}

TEST_CASE("only grammar characters are removed, order preserved") {
  CorruptionConfig cfg;
  cfg.rate = 0.5;
  auto mols = testutil::read_lines(testutil::data_path("sample_smiles.txt"));
  for (std::size_t i = 0; i < 200; ++i) {
    cfg.seed = derive_seed(5, i);
    const std::string& s = mols[i];
    std::string corrupted = corrupt_smiles(s, cfg);
    // The corrupted string must be a subsequence of s...
    std::size_t pos = 0;
    for (char c : corrupted) {
      pos = s.find(c, pos);
      REQUIRE(pos != std::string::npos);
      ++pos;
    }
    // ...with every non-grammar character kept.
    std::string non_grammar_in, non_grammar_out;
    for (char c : s) {
      if (cfg.grammar_set.find(c) == std::string::npos) non_grammar_in += c;
    }
    for (char c : corrupted) {
      if (cfg.grammar_set.find(c) == std::string::npos) non_grammar_out += c;
    }
    CHECK(non_grammar_in == non_grammar_out);
  }
}

TEST_CASE("pinned seed reproduces the red-marked pubchem deletion") {
  const std::string original =
      "O=C(O)C[C@H](O)C[C@H](O)CCn2c(c(c(c2c1ccc(F)cc1)c3ccccc3)C(=O)Nc4ccccc4)C(C)C";
  // 30 grammar characters; rate 0.1 deletes exactly 3: the '[' of the first
  // stereocenter, the ring-opening '2' and the ')' after the fluorophenyl.
  const std::string expected =
      "O=C(O)CC@H](O)C[C@H](O)CCnc(c(c(c2c1ccc(F)cc1c3ccccc3)C(=O)Nc4ccccc4)C(C)C";
  CorruptionConfig cfg;
  cfg.rate = 0.1;
  cfg.seed = 6808;
  CHECK(corrupt_smiles(original, cfg) == expected);
  CHECK_FALSE(chem::is_valid_smiles(expected));
}

TEST_CASE("pinned seeds are bit-reproducible") {
  auto mols = testutil::read_lines(testutil::data_path("sample_smiles.txt"));
  CorruptionConfig cfg;
  cfg.rate = 0.2;
  for (std::size_t i = 0; i < mols.size(); i += 37) {
    cfg.seed = derive_seed(99, i);
    CHECK(corrupt_smiles(mols[i], cfg) == corrupt_smiles(mols[i], cfg));
  }
}

TEST_CASE("invalid configuration is rejected") {
  CorruptionConfig cfg;
  cfg.rate = 0.0;
  CHECK_THROWS_AS(corrupt_smiles("C1CC1", cfg), CorruptionError);
  cfg.rate = 1.5;
  CHECK_THROWS_AS(corrupt_smiles("C1CC1", cfg), CorruptionError);
  cfg.rate = 0.2;
  cfg.grammar_set.clear();
  CHECK_THROWS_AS(corrupt_smiles("C1CC1", cfg), CorruptionError);
}

TEST_CASE("composition corruption replaces structural tokens") {
  CorruptionConfig cfg;
  cfg.rate = 0.2;
  cfg.seed = 4;
  // k = 7 tokens -> exactly 1 replaced.
  std::string corrupted = corrupt_composition("O O Te Tm Tm Te <sg127>", cfg);
  std::size_t replaced = 0;
  for (const std::string& tok : split_ws(corrupted)) {
    replaced += tok == "\xEF\xBF\xBD";
  }
  CHECK(replaced == 1);
  CHECK_THROWS_AS(chem::parse_composition_sequence(corrupted),
                  chem::CompositionError);

  cfg.rate = 1.0;
  std::string all = corrupt_composition("O O Te Tm Tm Te <sg127>", cfg);
  for (const std::string& tok : split_ws(all)) {
    CHECK(tok == "\xEF\xBF\xBD");
  }

  CHECK_THROWS_AS(corrupt_composition("O O Qq <sg127>", cfg), ParseFailure);
  CHECK_THROWS_AS(corrupt_composition("O O Te", cfg), ParseFailure);
}

TEST_CASE("sentence splitting protects decimals and brackets") {
  auto sentences = split_sentences(
      "AlN is Wurtzite structured and crystallizes in the hexagonal P6_3mc "
      "space group. There are three shorter (1.90 A. Also 2.1 B) bonds. "
      "N(1) is bonded to four equivalent Al(1) atoms.");
  REQUIRE(sentences.size() == 3);
  CHECK(sentences[1].text ==
        "There are three shorter (1.90 A. Also 2.1 B) bonds");
  // Lower-case continuation is not a boundary.
  auto two = split_sentences("It melts at 5. degrees are not a sentence. It is.");
  CHECK(two.size() == 2);
  // Reassembly is lossless.
  std::string text = "One ring. Two rings. Three.";
  std::string joined;
  for (const auto& s : split_sentences(text)) joined += s.text + s.delimiter;
  CHECK(joined == text);
}

TEST_CASE("description corruption swaps exactly one sentence slot") {
  auto pool = testutil::read_lines(testutil::data_path("sample_descriptions.txt"));
  REQUIRE(pool.size() >= 4);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::size_t index = seed % pool.size();
    std::string corrupted = corrupt_description(pool, index, seed);
    auto before = split_sentences(pool[index]);
    auto after = split_sentences(corrupted);
    REQUIRE(before.size() == after.size());
    std::size_t differing = 0;
    for (std::size_t k = 0; k < before.size(); ++k) {
      differing += before[k].text != after[k].text;
    }
    // The donor sentence can collide with the victim; never more than one
    // slot may change.
    CHECK(differing <= 1);
    checked += differing == 1;
  }
  CHECK(checked > 900);
}

TEST_CASE("first-sentence swap keeps the molecule identifier") {
  auto pool = testutil::read_lines(testutil::data_path("sample_descriptions.txt"));
  // pool[0] is the acetamide description, pool[1] the triterpenoid donor.
  std::vector<std::string> two = {pool[0], pool[1]};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 400 && !found; ++seed) {
    std::string corrupted = corrupt_description(two, 0, seed);
    auto sentences = split_sentences(corrupted);
    if (sentences[0].text ==
        "N-[4-(1,3-thiazol-2-ylsulfamoyl)phenyl]acetamide is a tricyclic "
        "triterpenoid of the isomalabaricane group") {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("pool of two one-sentence descriptions") {
  std::vector<std::string> pool = {"Water is a liquid.", "Iron is a metal."};
  std::string corrupted = corrupt_description(pool, 0, 5);
  CHECK(corrupted == "Water is a metal.");
  CHECK_THROWS_AS(corrupt_description({pool[0]}, 0, 1), PoolTooSmall);
}
