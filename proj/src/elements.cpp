#include "chemscore/elements.hpp"

#include <fstream>
#include <stdexcept>

#include "chemscore/text.hpp"

namespace chemscore::chem {

PeriodicTable PeriodicTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open element table: " + path);
  }
  PeriodicTable table;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto cols = split_on(sv, '\t');
    if (cols.size() != 3) {
      throw std::runtime_error("malformed element row: " + line);
    }
    ElementInfo info;
    info.symbol = cols[0];
    info.atomic_number = std::stoi(cols[1]);
    for (const auto& tok : split_on(cols[2], ',')) {
      if (!trim(tok).empty()) info.oxidation_states.push_back(std::stoi(tok));
    }
    table.by_symbol_[info.symbol] = table.elements_.size();
    table.elements_.push_back(std::move(info));
  }
  if (table.elements_.empty()) {
    throw std::runtime_error("empty element table: " + path);
  }
  return table;
}

const PeriodicTable& PeriodicTable::bundled() {
  static const PeriodicTable table =
      load(std::string(CHEMSCORE_DATA_DIR) + "/elements.tsv");
  return table;
}

}  // namespace chemscore::chem
