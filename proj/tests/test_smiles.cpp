#include <doctest.h>

#include "chemscore/smiles.hpp"
#include "helpers.hpp"

using namespace chemscore::chem;

TEST_CASE("reaction-prediction product parses to 17 heavy atoms") {
  MolecularGraph g = parse_smiles("COc1ccc(OC(=O)c2ccccc2)cc1");
  CHECK(g.atoms.size() == 17);
  int aromatic = 0;
  for (const Atom& a : g.atoms) aromatic += a.aromatic;
  CHECK(aromatic == 12);
}

TEST_CASE("empty input") {
  CHECK_THROWS_AS(parse_smiles(""), SmilesError);
  CHECK_THROWS_AS(parse_smiles("   "), SmilesError);
  try {
    parse_smiles("");
  } catch (const SmilesError& e) {
    CHECK(e.kind() == SmilesErrorKind::EmptyInput);
  }
}

TEST_CASE("error kinds name the first offending position") {
  struct Case {
    const char* smiles;
    SmilesErrorKind kind;
    std::size_t position;
  };
  const Case cases[] = {
      {"CC(C", SmilesErrorKind::UnbalancedBranch, 2},
      {"CC)C", SmilesErrorKind::UnbalancedBranch, 2},
      {"C[CH", SmilesErrorKind::UnbalancedBracket, 1},
      {"CC]", SmilesErrorKind::UnbalancedBracket, 2},
      {"C1CC", SmilesErrorKind::UnmatchedRingClosure, 1},
      {"C11", SmilesErrorKind::UnmatchedRingClosure, 2},
      {"CxC", SmilesErrorKind::UnknownToken, 1},
      {"C==C", SmilesErrorKind::UnknownToken, 2},
      {"=CC", SmilesErrorKind::UnknownToken, 0},
      {"C(=)C", SmilesErrorKind::UnknownToken, 2},
  };
  for (const Case& c : cases) {
    CAPTURE(c.smiles);
    try {
      parse_smiles(c.smiles);
      FAIL_CHECK("expected a parse error");
    } catch (const SmilesError& e) {
      CHECK(e.kind() == c.kind);
      CHECK(e.position() == c.position);
    }
  }
}

TEST_CASE("corrupted pubchem example fails with bracket or token error") {
  // The red-marked corruption: '[', '2' and ')' deleted.
  const char* corrupted =
      "O=C(O)CC@H](O)C[C@H](O)CCnc(c(c(c2c1ccc(F)cc1c3ccccc3)C(=O)Nc4ccccc4)C(C)C";
  try {
    parse_smiles(corrupted);
    FAIL_CHECK("expected a parse error");
  } catch (const SmilesError& e) {
    bool acceptable = e.kind() == SmilesErrorKind::UnbalancedBracket ||
                      e.kind() == SmilesErrorKind::UnknownToken;
    CHECK(acceptable);
  }
}

TEST_CASE("is_valid_smiles never throws") {
  CHECK(is_valid_smiles("CCBr"));
  CHECK_FALSE(is_valid_smiles("CC(C"));
  CHECK_FALSE(is_valid_smiles(""));
  CHECK_FALSE(is_valid_smiles("\xEF\xBF\xBD"));
}

TEST_CASE("bundled sample corpus is fully valid") {
  auto lines = testutil::read_lines(testutil::data_path("sample_smiles.txt"));
  REQUIRE(lines.size() == 1000);
  for (const std::string& s : lines) {
    CAPTURE(s);
    CHECK(is_valid_smiles(s));
  }
}

TEST_CASE("bracket atoms carry isotope, chirality, hcount, charge") {
  MolecularGraph g = parse_smiles("[13C@H2+2]");
  REQUIRE(g.atoms.size() == 1);
  CHECK(g.atoms[0].isotope == 13);
  CHECK(g.atoms[0].chirality == Chirality::Anticlockwise);
  CHECK(g.atoms[0].explicit_h == 2);
  CHECK(g.atoms[0].charge == 2);
  CHECK(g.atoms[0].in_bracket);

  CHECK(parse_smiles("[O-]").atoms[0].charge == -1);
  CHECK(parse_smiles("[Fe+3]").atoms[0].charge == 3);
  CHECK(parse_smiles("[N++]").atoms[0].charge == 2);
  CHECK(parse_smiles("[nH]").atoms[0].aromatic);
  CHECK(parse_smiles("[nH]").atoms[0].explicit_h == 1);
}

TEST_CASE("implicit hydrogen follows default valences") {
  CHECK(parse_smiles("C").atoms[0].explicit_h == 4);
  CHECK(parse_smiles("O").atoms[0].explicit_h == 2);
  CHECK(parse_smiles("N").atoms[0].explicit_h == 3);
  CHECK(parse_smiles("Cl").atoms[0].explicit_h == 1);
  CHECK(parse_smiles("C=O").atoms[0].explicit_h == 2);
  CHECK(parse_smiles("C#N").atoms[0].explicit_h == 1);
  // N valence list (3, 5): four bonds push it to the next valence.
  MolecularGraph nitro = parse_smiles("CN(=O)=O");
  CHECK(nitro.atoms[1].explicit_h == 0);
  // Aromatic ring carbons carry one hydrogen, fused carbons none.
  MolecularGraph benzene = parse_smiles("c1ccccc1");
  for (const Atom& a : benzene.atoms) CHECK(a.explicit_h == 1);
  MolecularGraph naphthalene = parse_smiles("c1ccc2ccccc2c1");
  int bare = 0;
  for (const Atom& a : naphthalene.atoms) bare += a.explicit_h == 0;
  CHECK(bare == 2);
  // Pyridine nitrogen: no hydrogen; thiophene sulfur: none either.
  MolecularGraph pyridine = parse_smiles("c1ccncc1");
  for (const Atom& a : pyridine.atoms) {
    if (a.element == "N") CHECK(a.explicit_h == 0);
  }
  MolecularGraph thiophene = parse_smiles("c1ccsc1");
  for (const Atom& a : thiophene.atoms) {
    if (a.element == "S") CHECK(a.explicit_h == 0);
  }
}

TEST_CASE("ring closures") {
  MolecularGraph g = parse_smiles("C1CCCCC1");
  CHECK(g.bonds.size() == 6);
  // %nn form and digit reuse after closure.
  CHECK(parse_smiles("C%10CCCCC%10").bonds.size() == 6);
  CHECK(parse_smiles("C1CC1C1CC1").bonds.size() == 7);
  // Explicit bond order on the closure, on either side.
  CHECK(parse_smiles("C=1CCCCC=1").bonds.size() == 6);
  CHECK(parse_smiles("C=1CCCCC1").bonds.size() == 6);
  CHECK_THROWS_AS(parse_smiles("C=1CCCCC#1"), SmilesError);
  // Duplicate bond between one atom pair.
  CHECK_THROWS_AS(parse_smiles("C12CC12"), SmilesError);
}

TEST_CASE("dot disconnection") {
  MolecularGraph g = parse_smiles("[Na+].[Cl-]");
  CHECK(g.atoms.size() == 2);
  CHECK(g.bonds.empty());
  CHECK_THROWS_AS(parse_smiles(".CC"), SmilesError);
  CHECK_THROWS_AS(parse_smiles("C(.C)C"), SmilesError);
}

TEST_CASE("stereo bonds parse and are preserved as annotations") {
  MolecularGraph g = parse_smiles("F/C=C/F");
  CHECK(g.atoms.size() == 4);
  int annotated = 0;
  for (const Bond& b : g.bonds) annotated += b.stereo_dir != 0;
  CHECK(annotated == 2);
}
