#include "chemscore/canonical.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <stdexcept>

#include "chemscore/rng.hpp"

namespace chemscore::chem {

namespace {

int bond_code(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Aromatic: return 4;
  }
  return 1;
}

int bond_units_x2(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 2;
    case BondOrder::Double: return 4;
    case BondOrder::Triple: return 6;
    case BondOrder::Aromatic: return 3;
  }
  return 2;
}

std::vector<int> ranks_from_keys(std::vector<std::string>& keys) {
  std::vector<std::string> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> ranks(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    ranks[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
  }
  return ranks;
}

std::vector<int> initial_ranks(const MolecularGraph& g,
                               const std::vector<std::vector<int>>& adj) {
  std::vector<std::string> keys(g.size());
  for (std::size_t a = 0; a < g.size(); ++a) {
    const Atom& atom = g.atoms[a];
    keys[a] = atom.element + '|' + (atom.aromatic ? '1' : '0') + '|' +
              std::to_string(atom.charge) + '|' +
              std::to_string(atom.explicit_h) + '|' +
              std::to_string(adj[a].size());
  }
  return ranks_from_keys(keys);
}

int distinct_count(const std::vector<int>& ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

// Morgan-style refinement: extend each rank by the sorted multiset of
// (bond code, neighbor rank) until the partition stops splitting.
void refine_ranks(const MolecularGraph& g,
                  const std::vector<std::vector<int>>& adj,
                  std::vector<int>& ranks) {
  int previous = distinct_count(ranks);
  while (true) {
    std::vector<std::string> keys(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
      std::vector<std::pair<int, int>> env;
      env.reserve(adj[a].size());
      for (int bi : adj[a]) {
        const Bond& b = g.bonds[bi];
        int other = b.a == static_cast<int>(a) ? b.b : b.a;
        env.emplace_back(bond_code(b.order), ranks[other]);
      }
      std::sort(env.begin(), env.end());
      std::string key = std::to_string(ranks[a]);
      for (auto& [code, r] : env) {
        key += ';';
        key += std::to_string(code);
        key += ',';
        key += std::to_string(r);
      }
      keys[a] = std::move(key);
    }
    ranks = ranks_from_keys(keys);
    int now = distinct_count(ranks);
    if (now == previous) return;
    previous = now;
  }
}

struct Emitter {
  const MolecularGraph& g;
  const std::vector<std::vector<int>>& adj;
  const std::vector<int>& priority;
  std::vector<int> order_x2;
  std::vector<bool> atom_visited;
  std::vector<bool> tree_bond;
  std::vector<bool> ring_bond;
  std::vector<bool> descended;
  std::vector<int> ring_digit;
  std::set<int> free_digits;
  std::string out;

  Emitter(const MolecularGraph& graph,
          const std::vector<std::vector<int>>& adjacency,
          const std::vector<int>& prio)
      : g(graph), adj(adjacency), priority(prio) {
    order_x2.assign(g.size(), 0);
    for (const Bond& b : g.bonds) {
      order_x2[b.a] += bond_units_x2(b.order);
      order_x2[b.b] += bond_units_x2(b.order);
    }
    atom_visited.assign(g.size(), false);
    tree_bond.assign(g.bonds.size(), false);
    ring_bond.assign(g.bonds.size(), false);
    descended.assign(g.bonds.size(), false);
    ring_digit.assign(g.bonds.size(), -1);
    for (int d = 1; d < 100; ++d) free_digits.insert(d);
  }

  std::vector<int> ordered_neighbors(int atom) const {
    std::vector<int> bis = adj[atom];
    std::sort(bis.begin(), bis.end(), [&](int x, int y) {
      int ox = g.bonds[x].a == atom ? g.bonds[x].b : g.bonds[x].a;
      int oy = g.bonds[y].a == atom ? g.bonds[y].b : g.bonds[y].a;
      return priority[ox] < priority[oy];
    });
    return bis;
  }

  // DFS spanning tree from start, visiting neighbors in priority order
  // (matching emit_atom); non-tree edges become ring closures.
  void classify(int start) {
    struct Frame {
      int atom;
      std::vector<int> ordered;
      std::size_t idx = 0;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{start, ordered_neighbors(start)});
    atom_visited[start] = true;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.idx == f.ordered.size()) {
        stack.pop_back();
        continue;
      }
      int bi = f.ordered[f.idx++];
      if (tree_bond[bi] || ring_bond[bi]) continue;
      const Bond& b = g.bonds[bi];
      int other = b.a == f.atom ? b.b : b.a;
      if (atom_visited[other]) {
        ring_bond[bi] = true;
      } else {
        tree_bond[bi] = true;
        atom_visited[other] = true;
        stack.push_back(Frame{other, ordered_neighbors(other)});
      }
    }
  }

  std::string bond_token(const Bond& b) const {
    bool both_aromatic = g.atoms[b.a].aromatic && g.atoms[b.b].aromatic;
    switch (b.order) {
      case BondOrder::Single: return both_aromatic ? "-" : "";
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic: return both_aromatic ? "" : ":";
    }
    return "";
  }

  std::string atom_token(int a) const {
    const Atom& atom = g.atoms[a];
    const std::string& symbol = atom.element;
    bool bare_aromatic_ok =
        !atom.aromatic ||
        (symbol == "B" || symbol == "C" || symbol == "N" || symbol == "O" ||
         symbol == "P" || symbol == "S");
    int implied = implied_hydrogens(symbol, atom.aromatic, order_x2[a]);
    bool bare = is_organic_subset(symbol) && atom.charge == 0 &&
                atom.explicit_h == implied && bare_aromatic_ok;
    std::string body = symbol;
    if (atom.aromatic) {
      for (char& c : body) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    if (bare) return body;
    std::string tok = "[" + body;
    if (atom.explicit_h > 0) {
      tok += 'H';
      if (atom.explicit_h > 1) tok += std::to_string(atom.explicit_h);
    }
    if (atom.charge != 0) {
      tok += atom.charge > 0 ? '+' : '-';
      int magnitude = std::abs(atom.charge);
      if (magnitude > 1) tok += std::to_string(magnitude);
    }
    tok += ']';
    return tok;
  }

  void emit_ring_digit(int bi) {
    out += bond_token(g.bonds[bi]);
    if (ring_digit[bi] < 0) {
      if (free_digits.empty()) throw std::runtime_error("ring digits exhausted");
      ring_digit[bi] = *free_digits.begin();
      free_digits.erase(free_digits.begin());
    } else {
      free_digits.insert(ring_digit[bi]);
    }
    if (ring_digit[bi] >= 10) out += '%';
    out += std::to_string(ring_digit[bi]);
  }

  void emit_atom(int atom) {
    out += atom_token(atom);
    std::vector<int> children;
    for (int bi : ordered_neighbors(atom)) {
      if (ring_bond[bi]) {
        emit_ring_digit(bi);
      } else if (tree_bond[bi] && !descended[bi]) {
        children.push_back(bi);
      }
    }
    for (std::size_t k = 0; k < children.size(); ++k) {
      int bi = children[k];
      descended[bi] = true;
      const Bond& b = g.bonds[bi];
      int child = b.a == atom ? b.b : b.a;
      bool last = k + 1 == children.size();
      if (!last) out += '(';
      out += bond_token(b);
      emit_atom(child);
      if (!last) out += ')';
    }
  }
};

std::string emit_smiles(const MolecularGraph& g,
                        const std::vector<std::vector<int>>& adj,
                        const std::vector<int>& priority) {
  Emitter emitter(g, adj, priority);
  std::vector<int> atoms_by_priority(g.size());
  std::iota(atoms_by_priority.begin(), atoms_by_priority.end(), 0);
  std::sort(atoms_by_priority.begin(), atoms_by_priority.end(),
            [&](int x, int y) { return priority[x] < priority[y]; });
  bool first = true;
  for (int a : atoms_by_priority) {
    if (emitter.atom_visited[a]) continue;
    emitter.classify(a);
    if (!first) emitter.out += '.';
    emitter.emit_atom(a);
    first = false;
  }
  return emitter.out;
}

std::string best_canonical(const MolecularGraph& g,
                           const std::vector<std::vector<int>>& adj,
                           std::vector<int> ranks) {
  refine_ranks(g, adj, ranks);
  int n = static_cast<int>(g.size());
  if (distinct_count(ranks) == n) {
    return emit_smiles(g, adj, ranks);
  }
  // Lowest tied cell; individualize each member and keep the smallest result.
  std::vector<int> cell_count(n, 0);
  for (int r : ranks) ++cell_count[r];
  int target = 0;
  while (cell_count[target] <= 1) ++target;
  std::string best;
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (ranks[a] != target) continue;
    std::vector<int> trial = ranks;
    for (std::size_t x = 0; x < g.size(); ++x) {
      if (x != a && trial[x] >= target) ++trial[x];
    }
    std::string candidate = best_canonical(g, adj, std::move(trial));
    if (best.empty() || candidate < best) best = std::move(candidate);
  }
  return best;
}

}  // namespace

std::string canonical_form(const MolecularGraph& g) {
  if (g.atoms.empty()) throw std::invalid_argument("empty graph");
  auto adj = g.adjacency();
  return best_canonical(g, adj, initial_ranks(g, adj));
}

bool same_molecule(std::string_view a, std::string_view b) noexcept {
  try {
    return canonical_form(parse_smiles(a)) == canonical_form(parse_smiles(b));
  } catch (...) {
    return false;
  }
}

std::string write_smiles(const MolecularGraph& g,
                         const std::vector<int>& priority) {
  if (priority.size() != g.size()) {
    throw std::invalid_argument("priority size mismatch");
  }
  auto adj = g.adjacency();
  return emit_smiles(g, adj, priority);
}

std::string random_spelling(const MolecularGraph& g, std::uint64_t seed) {
  std::vector<int> priority(static_cast<int>(g.size()));
  std::iota(priority.begin(), priority.end(), 0);
  SplitMix64 rng(seed);
  rng.shuffle(priority);
  return write_smiles(g, priority);
}

}  // namespace chemscore::chem
