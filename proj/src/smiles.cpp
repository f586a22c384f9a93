#include "chemscore/smiles.hpp"

#include <array>
#include <cctype>
#include <map>

#include "chemscore/elements.hpp"

namespace chemscore::chem {

std::vector<std::vector<int>> MolecularGraph::adjacency() const {
  std::vector<std::vector<int>> adj(atoms.size());
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    adj[bonds[i].a].push_back(static_cast<int>(i));
    adj[bonds[i].b].push_back(static_cast<int>(i));
  }
  return adj;
}

const char* to_string(SmilesErrorKind kind) {
  switch (kind) {
    case SmilesErrorKind::EmptyInput: return "EmptyInput";
    case SmilesErrorKind::UnbalancedBranch: return "UnbalancedBranch";
    case SmilesErrorKind::UnbalancedBracket: return "UnbalancedBracket";
    case SmilesErrorKind::UnmatchedRingClosure: return "UnmatchedRingClosure";
    case SmilesErrorKind::UnknownToken: return "UnknownToken";
  }
  return "?";
}

bool is_organic_subset(const std::string& element) {
  return element == "B" || element == "C" || element == "N" ||
         element == "O" || element == "P" || element == "S" ||
         element == "F" || element == "Cl" || element == "Br" ||
         element == "I";
}

namespace {

[[noreturn]] void fail(SmilesErrorKind kind, std::size_t pos,
                       const std::string& detail) {
  throw SmilesError(kind, pos,
                    std::string(to_string(kind)) + " at position " +
                        std::to_string(pos) + ": " + detail);
}

const std::vector<int>* default_valences(const std::string& element) {
  static const std::map<std::string, std::vector<int>> table = {
      {"B", {3}},      {"C", {4}},       {"N", {3, 5}}, {"O", {2}},
      {"P", {3, 5}},   {"S", {2, 4, 6}}, {"F", {1}},    {"Cl", {1}},
      {"Br", {1}},     {"I", {1}},
  };
  auto it = table.find(element);
  return it == table.end() ? nullptr : &it->second;
}

bool aromatic_bare_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

struct RingOpening {
  int atom = -1;
  int order_code = -1;  // -1 = unspecified
  int stereo_dir = 0;
  std::size_t pos = 0;
};

struct Parser {
  std::string_view s;
  std::size_t i = 0;
  MolecularGraph g;

  int prev_atom = -1;
  std::vector<std::pair<int, std::size_t>> branch_stack;  // (atom, '(' pos)
  std::map<int, RingOpening> open_rings;
  // Pending bond symbol before the next atom / ring closure.
  int pending_order = -1;
  int pending_stereo = 0;
  std::size_t pending_pos = 0;
  std::map<std::pair<int, int>, bool> seen_pairs;

  explicit Parser(std::string_view text) : s(text) {}

  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }

  void add_bond(int a, int b, BondOrder order, int stereo, std::size_t pos) {
    if (a == b) {
      fail(SmilesErrorKind::UnmatchedRingClosure, pos,
           "ring closure bonds an atom to itself");
    }
    auto key = std::minmax(a, b);
    if (!seen_pairs.emplace(std::make_pair(key.first, key.second), true).second) {
      fail(SmilesErrorKind::UnmatchedRingClosure, pos,
           "duplicate bond between the same atom pair");
    }
    g.bonds.push_back(Bond{a, b, order, stereo});
  }

  BondOrder resolve_default(int a, int b) const {
    if (g.atoms[a].aromatic && g.atoms[b].aromatic) return BondOrder::Aromatic;
    return BondOrder::Single;
  }

  static BondOrder order_from_code(int code) {
    switch (code) {
      case 1: return BondOrder::Single;
      case 2: return BondOrder::Double;
      case 3: return BondOrder::Triple;
      case 4: return BondOrder::Aromatic;
    }
    return BondOrder::Single;
  }

  void attach_atom(int atom_index, std::size_t pos) {
    if (prev_atom >= 0) {
      BondOrder order = pending_order >= 0 ? order_from_code(pending_order)
                                           : resolve_default(prev_atom, atom_index);
      add_bond(prev_atom, atom_index, order, pending_stereo, pos);
    }
    pending_order = -1;
    pending_stereo = 0;
    prev_atom = atom_index;
  }

  int read_digits(int max_chars = -1) {
    int value = 0;
    int used = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek())) &&
           (max_chars < 0 || used < max_chars)) {
      value = value * 10 + (peek() - '0');
      ++i;
      ++used;
    }
    return used == 0 ? -1 : value;
  }

  void parse_bracket_atom() {
    std::size_t open_pos = i;
    ++i;  // consume '['
    Atom atom;
    atom.in_bracket = true;

    int isotope = read_digits();
    if (isotope >= 0) atom.isotope = isotope;

    if (done()) fail(SmilesErrorKind::UnbalancedBracket, open_pos, "unterminated bracket atom");

    std::size_t sym_pos = i;
    char c = peek();
    if (c == ']') {
      fail(SmilesErrorKind::UnknownToken, sym_pos, "empty bracket atom");
    }
    std::string symbol;
    bool aromatic = false;
    if (std::isupper(static_cast<unsigned char>(c))) {
      symbol.push_back(c);
      ++i;
      if (!done() && std::islower(static_cast<unsigned char>(peek())) &&
          PeriodicTable::bundled().contains(symbol + peek())) {
        symbol.push_back(peek());
        ++i;
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      aromatic = true;
      symbol.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      ++i;
      // Two-letter aromatic symbols (se, as, te, si) are bracket-only.
      if (!done() && std::islower(static_cast<unsigned char>(peek()))) {
        std::string two = symbol + static_cast<char>(peek());
        if (two == "Se" || two == "As" || two == "Te" || two == "Si") {
          symbol = two;
          ++i;
        }
      }
    } else {
      fail(SmilesErrorKind::UnknownToken, sym_pos, "expected element symbol");
    }
    if (!PeriodicTable::bundled().contains(symbol)) {
      fail(SmilesErrorKind::UnknownToken, sym_pos, "unknown element '" + symbol + "'");
    }
    atom.element = symbol;
    atom.aromatic = aromatic;

    if (!done() && peek() == '@') {
      ++i;
      if (!done() && peek() == '@') {
        atom.chirality = Chirality::Clockwise;
        ++i;
      } else {
        atom.chirality = Chirality::Anticlockwise;
      }
    }

    if (!done() && peek() == 'H') {
      ++i;
      int count = read_digits();
      atom.explicit_h = count >= 0 ? count : 1;
    }

    if (!done() && (peek() == '+' || peek() == '-')) {
      char sign = peek();
      ++i;
      int magnitude = read_digits();
      if (magnitude < 0) {
        magnitude = 1;
        while (!done() && peek() == sign) {
          ++magnitude;
          ++i;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }

    if (!done() && peek() == ':') {
      ++i;
      if (read_digits() < 0) {
        fail(SmilesErrorKind::UnknownToken, i, "expected atom class number");
      }
    }

    if (done() || peek() != ']') {
      fail(done() ? SmilesErrorKind::UnbalancedBracket : SmilesErrorKind::UnknownToken,
           done() ? open_pos : i, "expected ']'");
    }
    ++i;  // consume ']'

    g.atoms.push_back(std::move(atom));
    attach_atom(static_cast<int>(g.atoms.size() - 1), open_pos);
  }

  void parse_bare_atom() {
    std::size_t pos = i;
    char c = peek();
    Atom atom;
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string symbol(1, c);
      ++i;
      if ((c == 'C' && !done() && peek() == 'l') ||
          (c == 'B' && !done() && peek() == 'r')) {
        symbol.push_back(peek());
        ++i;
      }
      if (!is_organic_subset(symbol)) {
        fail(SmilesErrorKind::UnknownToken, pos,
             "'" + symbol + "' needs brackets outside the organic subset");
      }
      atom.element = symbol;
    } else {
      if (!aromatic_bare_symbol(c)) {
        fail(SmilesErrorKind::UnknownToken, pos, std::string("unexpected '") + c + "'");
      }
      atom.element = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      atom.aromatic = true;
      ++i;
    }
    g.atoms.push_back(std::move(atom));
    attach_atom(static_cast<int>(g.atoms.size() - 1), pos);
  }

  void handle_ring_closure(int number, std::size_t pos) {
    if (prev_atom < 0) {
      fail(SmilesErrorKind::UnknownToken, pos, "ring closure before any atom");
    }
    auto it = open_rings.find(number);
    if (it == open_rings.end()) {
      open_rings[number] = RingOpening{prev_atom, pending_order, pending_stereo, pos};
    } else {
      RingOpening opening = it->second;
      open_rings.erase(it);
      int order_code = -1;
      if (opening.order_code >= 0 && pending_order >= 0 &&
          opening.order_code != pending_order) {
        fail(SmilesErrorKind::UnmatchedRingClosure, pos,
             "conflicting bond orders on ring closure " + std::to_string(number));
      }
      order_code = opening.order_code >= 0 ? opening.order_code : pending_order;
      BondOrder order = order_code >= 0
                            ? order_from_code(order_code)
                            : resolve_default(opening.atom, prev_atom);
      int stereo = opening.stereo_dir != 0 ? opening.stereo_dir : pending_stereo;
      add_bond(opening.atom, prev_atom, order, stereo, pos);
    }
    pending_order = -1;
    pending_stereo = 0;
  }

  void set_pending(int order_code, int stereo, std::size_t pos) {
    if (pending_order >= 0 || pending_stereo != 0) {
      fail(SmilesErrorKind::UnknownToken, pos, "two bond symbols in a row");
    }
    if (prev_atom < 0) {
      fail(SmilesErrorKind::UnknownToken, pos, "bond symbol before any atom");
    }
    pending_order = order_code;
    pending_stereo = stereo;
    pending_pos = pos;
  }

  MolecularGraph run() {
    bool any_content = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!std::isspace(static_cast<unsigned char>(s[k]))) any_content = true;
    }
    if (s.empty() || !any_content) {
      fail(SmilesErrorKind::EmptyInput, 0, "empty SMILES");
    }

    while (!done()) {
      char c = peek();
      std::size_t pos = i;
      if (std::isspace(static_cast<unsigned char>(c))) {
        // Whitespace terminates the SMILES body; anything after must be blank.
        for (std::size_t k = i; k < s.size(); ++k) {
          if (!std::isspace(static_cast<unsigned char>(s[k]))) {
            fail(SmilesErrorKind::UnknownToken, k, "text after whitespace");
          }
        }
        break;
      }
      switch (c) {
        case '(':
          if (prev_atom < 0) {
            fail(SmilesErrorKind::UnbalancedBranch, pos, "branch before any atom");
          }
          if (pending_order >= 0 || pending_stereo != 0) {
            fail(SmilesErrorKind::UnknownToken, pos, "bond symbol before '('");
          }
          branch_stack.emplace_back(prev_atom, pos);
          ++i;
          break;
        case ')':
          if (branch_stack.empty()) {
            fail(SmilesErrorKind::UnbalancedBranch, pos, "')' without matching '('");
          }
          if (pending_order >= 0 || pending_stereo != 0) {
            fail(SmilesErrorKind::UnknownToken, pending_pos, "dangling bond symbol");
          }
          prev_atom = branch_stack.back().first;
          branch_stack.pop_back();
          ++i;
          break;
        case '[':
          parse_bracket_atom();
          break;
        case ']':
          fail(SmilesErrorKind::UnbalancedBracket, pos, "']' without matching '['");
        case '-': set_pending(1, 0, pos); ++i; break;
        case '=': set_pending(2, 0, pos); ++i; break;
        case '#': set_pending(3, 0, pos); ++i; break;
        case ':': set_pending(4, 0, pos); ++i; break;
        case '/': set_pending(1, +1, pos); ++i; break;
        case '\\': set_pending(1, -1, pos); ++i; break;
        case '.':
          if (prev_atom < 0 && g.atoms.empty()) {
            fail(SmilesErrorKind::UnknownToken, pos, "leading '.'");
          }
          if (pending_order >= 0 || pending_stereo != 0) {
            fail(SmilesErrorKind::UnknownToken, pos, "bond symbol before '.'");
          }
          if (!branch_stack.empty()) {
            fail(SmilesErrorKind::UnknownToken, pos, "'.' inside a branch");
          }
          prev_atom = -1;
          ++i;
          break;
        case '%': {
          ++i;
          if (i + 1 >= s.size() ||
              !std::isdigit(static_cast<unsigned char>(s[i])) ||
              !std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
            fail(SmilesErrorKind::UnknownToken, pos, "'%' needs two digits");
          }
          int number = (s[i] - '0') * 10 + (s[i + 1] - '0');
          i += 2;
          handle_ring_closure(number, pos);
          break;
        }
        default:
          if (std::isdigit(static_cast<unsigned char>(c))) {
            ++i;
            handle_ring_closure(c - '0', pos);
          } else {
            parse_bare_atom();
          }
      }
    }

    if (!branch_stack.empty()) {
      fail(SmilesErrorKind::UnbalancedBranch, branch_stack.back().second,
           "'(' never closed");
    }
    if (!open_rings.empty()) {
      fail(SmilesErrorKind::UnmatchedRingClosure, open_rings.begin()->second.pos,
           "ring closure " + std::to_string(open_rings.begin()->first) +
               " never closed");
    }
    if (pending_order >= 0 || pending_stereo != 0) {
      fail(SmilesErrorKind::UnknownToken, pending_pos, "dangling bond symbol");
    }
    if (g.atoms.empty()) {
      fail(SmilesErrorKind::EmptyInput, 0, "no atoms");
    }

    assign_implicit_hydrogens();
    return std::move(g);
  }

  void assign_implicit_hydrogens() {
    std::vector<int> order_x2(g.atoms.size(), 0);
    for (const Bond& b : g.bonds) {
      int units = 2;
      switch (b.order) {
        case BondOrder::Single: units = 2; break;
        case BondOrder::Double: units = 4; break;
        case BondOrder::Triple: units = 6; break;
        case BondOrder::Aromatic: units = 3; break;
      }
      order_x2[b.a] += units;
      order_x2[b.b] += units;
    }
    for (std::size_t a = 0; a < g.atoms.size(); ++a) {
      if (g.atoms[a].in_bracket) continue;  // H count is as written
      g.atoms[a].explicit_h =
          implied_hydrogens(g.atoms[a].element, g.atoms[a].aromatic, order_x2[a]);
    }
  }
};

}  // namespace

int implied_hydrogens(const std::string& element, bool aromatic,
                      int bond_order_sum_x2) {
  const std::vector<int>* valences = default_valences(element);
  if (valences == nullptr) return 0;
  int sum = (bond_order_sum_x2 + 1) / 2;  // ceil to whole bonds
  if (aromatic) {
    // Lowest valence; ring-pi participation already counted by the 1.5s.
    int v = valences->front();
    return sum >= v ? 0 : v - sum;
  }
  for (int v : *valences) {
    if (sum <= v) return v - sum;
  }
  return 0;
}

MolecularGraph parse_smiles(std::string_view s) {
  Parser parser(s);
  return parser.run();
}

bool is_valid_smiles(std::string_view s) noexcept {
  try {
    parse_smiles(s);
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace chemscore::chem
