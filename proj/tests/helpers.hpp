#ifndef CHEMSCORE_TESTS_HELPERS_HPP
#define CHEMSCORE_TESTS_HELPERS_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "chemscore/smiles.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(CHEMSCORE_DATA_DIR) + "/" + name;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// Independent brute-force graph isomorphism (atom-invariant pruning plus
// backtracking); the oracle for canonicalization round-trips.
inline bool isomorphic(const chemscore::chem::MolecularGraph& a,
                       const chemscore::chem::MolecularGraph& b) {
  using chemscore::chem::Atom;
  if (a.atoms.size() != b.atoms.size() || a.bonds.size() != b.bonds.size()) {
    return false;
  }
  auto key = [](const Atom& atom, std::size_t degree) {
    return atom.element + "|" + std::to_string(atom.charge) + "|" +
           std::to_string(atom.explicit_h) + "|" +
           std::to_string(atom.aromatic) + "|" + std::to_string(degree);
  };

  std::size_t n = a.atoms.size();
  std::vector<std::vector<int>> adj_a(n), adj_b(n);
  std::map<std::pair<int, int>, int> bond_a, bond_b;
  for (const auto& bond : a.bonds) {
    adj_a[bond.a].push_back(bond.b);
    adj_a[bond.b].push_back(bond.a);
    bond_a[std::minmax(bond.a, bond.b)] = static_cast<int>(bond.order);
  }
  for (const auto& bond : b.bonds) {
    adj_b[bond.a].push_back(bond.b);
    adj_b[bond.b].push_back(bond.a);
    bond_b[std::minmax(bond.a, bond.b)] = static_cast<int>(bond.order);
  }

  std::vector<std::string> keys_a(n), keys_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys_a[i] = key(a.atoms[i], adj_a[i].size());
    keys_b[i] = key(b.atoms[i], adj_b[i].size());
  }
  {
    auto sa = keys_a;
    auto sb = keys_b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }

  std::vector<int> map_ab(n, -1), map_ba(n, -1);
  auto backtrack = [&](auto&& self, std::size_t i) -> bool {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (map_ba[j] != -1 || keys_a[i] != keys_b[j]) continue;
      bool ok = true;
      for (int nb : adj_a[i]) {
        if (map_ab[nb] == -1) continue;
        auto it = bond_b.find(std::minmax(static_cast<int>(j), map_ab[nb]));
        auto expect = bond_a.at(std::minmax(static_cast<int>(i), nb));
        if (it == bond_b.end() || it->second != expect) {
          ok = false;
          break;
        }
      }
      // Mapped b-neighbors of j must correspond to mapped a-neighbors of i.
      if (ok) {
        for (int nb : adj_b[j]) {
          if (map_ba[nb] == -1) continue;
          auto it = bond_a.find(
              std::minmax(static_cast<int>(i), map_ba[nb]));
          if (it == bond_a.end()) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      map_ab[i] = static_cast<int>(j);
      map_ba[j] = static_cast<int>(i);
      if (self(self, i + 1)) return true;
      map_ab[i] = -1;
      map_ba[j] = -1;
    }
    return false;
  };
  return backtrack(backtrack, 0);
}

}  // namespace testutil

#endif  // CHEMSCORE_TESTS_HELPERS_HPP
