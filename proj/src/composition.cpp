#include "chemscore/composition.hpp"

#include <algorithm>
#include <numeric>

#include "chemscore/text.hpp"

namespace chemscore::chem {

namespace {

[[noreturn]] void fail(CompositionErrorKind kind, const std::string& detail) {
  const char* name = "?";
  switch (kind) {
    case CompositionErrorKind::MissingMaterialTags: name = "MissingMaterialTags"; break;
    case CompositionErrorKind::UnknownElement: name = "UnknownElement"; break;
    case CompositionErrorKind::BadSpaceGroup: name = "BadSpaceGroup"; break;
  }
  throw CompositionError(kind, std::string(name) + ": " + detail);
}

bool parse_sg_tag(const std::string& token, int& out) {
  if (token.size() < 5 || token.substr(0, 3) != "<sg" || token.back() != '>') {
    return false;
  }
  std::string digits = token.substr(3, token.size() - 4);
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    return false;
  }
  out = std::stoi(digits);
  return true;
}

}  // namespace

std::map<std::string, int> CompositionSequence::counts() const {
  std::map<std::string, int> out;
  for (const auto& e : elements) ++out[e];
  return out;
}

std::string CompositionSequence::normalized_key() const {
  auto c = counts();
  int g = 0;
  for (const auto& [sym, n] : c) g = std::gcd(g, n);
  if (g == 0) g = 1;
  std::string key;
  for (const auto& [sym, n] : c) {
    key += sym;
    key += ':';
    key += std::to_string(n / g);
    key += ' ';
  }
  key += "<sg" + std::to_string(space_group) + ">";
  return key;
}

CompositionSequence parse_composition_sequence(std::string_view s) {
  CompositionSequence seq;
  bool have_sg = false;
  const PeriodicTable& table = PeriodicTable::bundled();
  for (const std::string& token : split_ws(s)) {
    int sg = 0;
    if (parse_sg_tag(token, sg)) {
      if (have_sg) fail(CompositionErrorKind::BadSpaceGroup, "duplicate <sgN> tag");
      if (sg < 1 || sg > 230) {
        fail(CompositionErrorKind::BadSpaceGroup,
             "space group " + std::to_string(sg) + " outside 1..230");
      }
      seq.space_group = sg;
      have_sg = true;
    } else if (table.contains(token)) {
      seq.elements.push_back(token);
    } else {
      fail(CompositionErrorKind::UnknownElement, "'" + token + "'");
    }
  }
  if (!have_sg) fail(CompositionErrorKind::BadSpaceGroup, "missing <sgN> tag");
  if (seq.elements.empty()) {
    fail(CompositionErrorKind::UnknownElement, "no element tokens");
  }
  return seq;
}

CompositionSequence parse_composition(std::string_view s) {
  constexpr std::string_view kOpen = "<material>";
  constexpr std::string_view kClose = "</material>";
  std::size_t open = s.find(kOpen);
  if (open == std::string_view::npos) {
    fail(CompositionErrorKind::MissingMaterialTags, "no <material> tag");
  }
  std::size_t body = open + kOpen.size();
  std::size_t close = s.find(kClose, body);
  if (close == std::string_view::npos) {
    fail(CompositionErrorKind::MissingMaterialTags, "no </material> tag");
  }
  return parse_composition_sequence(s.substr(body, close - body));
}

namespace {

bool neutral_assignment_exists(
    const std::vector<std::pair<int, const std::vector<int>*>>& slots,
    std::size_t index, long long running) {
  if (index == slots.size()) return running == 0;
  // Prune with the extreme charges still reachable.
  long long lo = running;
  long long hi = running;
  for (std::size_t k = index; k < slots.size(); ++k) {
    auto [count, states] = slots[k];
    int mn = *std::min_element(states->begin(), states->end());
    int mx = *std::max_element(states->begin(), states->end());
    lo += static_cast<long long>(count) * mn;
    hi += static_cast<long long>(count) * mx;
  }
  if (lo > 0 || hi < 0) return false;
  auto [count, states] = slots[index];
  for (int state : *states) {
    if (neutral_assignment_exists(slots, index + 1,
                                  running + static_cast<long long>(count) * state)) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool charge_neutral_valid(const CompositionSequence& c,
                          const PeriodicTable& table) {
  std::vector<std::pair<int, const std::vector<int>*>> slots;
  for (const auto& [symbol, count] : c.counts()) {
    const ElementInfo* info = table.find(symbol);
    if (info == nullptr || info->oxidation_states.empty()) return false;
    slots.emplace_back(count, &info->oxidation_states);
  }
  if (slots.empty()) return false;
  return neutral_assignment_exists(slots, 0, 0);
}

}  // namespace chemscore::chem
