#include "chemscore/fingerprint.hpp"

#include <algorithm>
#include <bit>

#include "chemscore/rng.hpp"

namespace chemscore::chem {

Fingerprint Fingerprint::zeros(int width, int radius) {
  Fingerprint fp;
  fp.width = width;
  fp.radius = radius;
  fp.words.assign(static_cast<std::size_t>((width + 63) / 64), 0);
  return fp;
}

int Fingerprint::popcount() const {
  int total = 0;
  for (std::uint64_t w : words) total += std::popcount(w);
  return total;
}

Fingerprint morgan_fingerprint(const MolecularGraph& g, int radius, int width) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  if (width <= 0 || (width & (width - 1)) != 0) {
    throw std::invalid_argument("width must be a power of two");
  }
  Fingerprint fp = Fingerprint::zeros(width, radius);
  auto adj = g.adjacency();

  std::vector<std::uint64_t> inv(g.size());
  for (std::size_t a = 0; a < g.size(); ++a) {
    const Atom& atom = g.atoms[a];
    std::uint64_t h = hash_text(atom.element);
    h = mix64(h ^ static_cast<std::uint64_t>(adj[a].size()));
    h = mix64(h ^ static_cast<std::uint64_t>(atom.charge + 512));
    h = mix64(h ^ static_cast<std::uint64_t>(atom.explicit_h));
    h = mix64(h ^ (atom.aromatic ? 0x9E37ull : 0x79B9ull));
    inv[a] = h;
  }

  auto set_bits = [&](const std::vector<std::uint64_t>& layer) {
    for (std::uint64_t h : layer) {
      fp.set(static_cast<int>(h & static_cast<std::uint64_t>(width - 1)));
    }
  };
  set_bits(inv);

  std::vector<std::uint64_t> next(g.size());
  for (int r = 1; r <= radius; ++r) {
    for (std::size_t a = 0; a < g.size(); ++a) {
      std::vector<std::pair<int, std::uint64_t>> env;
      env.reserve(adj[a].size());
      for (int bi : adj[a]) {
        const Bond& b = g.bonds[bi];
        int other = b.a == static_cast<int>(a) ? b.b : b.a;
        env.emplace_back(static_cast<int>(b.order), inv[other]);
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = mix64(inv[a] ^ static_cast<std::uint64_t>(r));
      for (auto& [code, nb] : env) {
        h = mix64(h ^ mix64(nb ^ static_cast<std::uint64_t>(code + 1)));
      }
      next[a] = h;
    }
    inv.swap(next);
    set_bits(inv);
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width != b.width) {
    throw WidthMismatch("fingerprint widths differ: " + std::to_string(a.width) +
                        " vs " + std::to_string(b.width));
  }
  int inter = 0;
  int uni = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    inter += std::popcount(a.words[i] & b.words[i]);
    uni += std::popcount(a.words[i] | b.words[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace chemscore::chem
