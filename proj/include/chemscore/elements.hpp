#ifndef CHEMSCORE_ELEMENTS_HPP
#define CHEMSCORE_ELEMENTS_HPP

#include <string>
#include <unordered_map>
#include <vector>

namespace chemscore::chem {

struct ElementInfo {
  std::string symbol;
  int atomic_number = 0;
  std::vector<int> oxidation_states;
};

// Periodic-table data backed by the versioned elements.tsv file
// (symbol, atomic number, comma-separated common oxidation states).
class PeriodicTable {
 public:
  static PeriodicTable load(const std::string& path);

  // The table shipped under CHEMSCORE_DATA_DIR, loaded once.
  static const PeriodicTable& bundled();

  bool contains(const std::string& symbol) const {
    return by_symbol_.count(symbol) > 0;
  }
  const ElementInfo* find(const std::string& symbol) const {
    auto it = by_symbol_.find(symbol);
    return it == by_symbol_.end() ? nullptr : &elements_[it->second];
  }
  const std::vector<ElementInfo>& elements() const { return elements_; }

 private:
  std::vector<ElementInfo> elements_;
  std::unordered_map<std::string, std::size_t> by_symbol_;
};

}  // namespace chemscore::chem

#endif  // CHEMSCORE_ELEMENTS_HPP
