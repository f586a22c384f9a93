#ifndef CHEMSCORE_REWARDS_HPP
#define CHEMSCORE_REWARDS_HPP

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chemscore/composition.hpp"
#include "chemscore/fingerprint.hpp"
#include "chemscore/format_reward.hpp"

namespace chemscore::rewards {

enum class TaskKind { Rxp, I2s, Rxn, Rxr, Rxi, Rxtf, Ceb, Cmg, Crr };

std::optional<TaskKind> task_from_string(std::string_view s);
const char* to_string(TaskKind task);

// The ten reaction classes used by the reaction-naming task.
const std::vector<std::string>& reaction_classes();

// Named partial rewards plus their sum; total always equals the component
// sum. Raw (unweighted) values and extraction details go in diagnostics.
struct RewardResult {
  std::vector<std::pair<std::string, double>> components;
  double total = 0.0;
  std::map<std::string, std::string> diagnostics;

  void add(const std::string& name, double value) {
    components.emplace_back(name, value);
    total += value;
  }
};

// --- per-task accuracy rewards ---

// -1 no parseable/valid answer, -0.5 valid but different molecule, +1 match.
double rxp_accuracy(std::string_view o, std::string_view truth_smiles);

// Piecewise Tanimoto scaling: +1.0 at tau == 1, tau - 0.3 on [0.3, 1),
// -0.5 below.
double tanimoto_scaled(double tau);

struct FingerprintConfig {
  int radius = chem::kDefaultFpRadius;
  int width = chem::kDefaultFpWidth;
};

// tanimoto_scaled over Morgan fingerprints of the extracted answer vs the
// truth; unparsable or missing answers score as tau = 0.
double i2s_tanimoto_reward(std::string_view o, std::string_view truth_smiles,
                           const FingerprintConfig& fp = {});

// Trim, case-fold, strip trailing punctuation.
std::string normalize_choice(std::string_view s);

// 1 iff the normalized extracted answer equals the truth and is an allowed
// label, else 0.
int mcq_accuracy(std::string_view o, std::string_view truth,
                 std::span<const std::string> labels);

// Per-completion rewards: 0 no answer, 0.1 single wrong class, 1 correct;
// then -0.2 on every completion when the whole group extracted the same
// wrong class.
std::vector<double> rxn_accuracy(std::span<const std::string> completions,
                                 std::string_view truth,
                                 std::span<const std::string> classes);

// --- chemical equation balancing ---

struct EquationTerm {
  long long coefficient = 1;
  std::string formula;
};

struct Equation {
  std::vector<EquationTerm> lhs;
  std::vector<EquationTerm> rhs;
};

// "6 BaCO3 + 1 Na2CO3 = 1 X + 7 CO2"; accepts '=' or '=='.
std::optional<Equation> parse_equation(std::string_view s);
std::string equation_to_string(const Equation& eq);

// Components: "format" (0, +0.3 when the generated LHS term multiset equals
// the truth LHS) and "similarity" (normalized Levenshtein over the RHS).
// Malformed outputs fall back to raw-string similarity against the whole
// truth equation, flagged in diagnostics.
RewardResult ceb_reward(std::string_view o, std::string_view truth_equation);

// --- conditional material generation ---

// Compositions already seen in this scoring session; single writer per
// session, guarded for parallel group scoring.
class CmgSession {
 public:
  // Returns true when key was new and records it.
  bool record(const std::string& key);

 private:
  std::mutex mutex_;
  std::set<std::string> seen_;
};

struct CmgWeights {
  double validity = 0.25;
  double precision = 0.25;
  double novelty = 0.25;
  double format = 0.25;
};

// Components are the weighted contributions (so total == their sum); raw
// 0..1 values are recorded in diagnostics. Format: parseable <material>
// block with sg in [1, 230]. Validity: charge neutrality over the bundled
// oxidation table. Precision: |prompt ∩ generated| / |prompt|. Novelty:
// normalized composition absent from the reference set and the session.
RewardResult cmg_reward(std::string_view o,
                        const std::set<std::string>& prompt_elements,
                        const std::set<std::string>& reference_keys,
                        CmgSession& session, const CmgWeights& weights = {});

// --- crystal relaxation formatting ---

struct Mat2SeqBlock {
  std::vector<std::pair<std::string, int>> formula;
  std::string space_group_symbol;
  std::array<double, 6> lattice = {};  // a b c alpha beta gamma
  struct Site {
    std::string element;
    int count = 1;
    std::array<double, 3> frac = {};
  };
  std::vector<Site> sites;
};

std::optional<Mat2SeqBlock> parse_mat2seq(std::string_view s);

// -1 parseable block and lower energy; -5 parseable block otherwise;
// -10 not parseable. Energies are supplied by an external evaluator.
double crr_format_reward(std::string_view o, double input_energy,
                         std::optional<double> output_energy);

// --- aggregate helpers ---

// 1 iff the task's full-credit condition holds (exact molecule match,
// correct choice, exact equation, ...), else 0.
int accuracy_percentage(std::string_view o, std::string_view truth,
                        TaskKind task);

struct ScoreContext {
  std::set<std::string> prompt_elements;          // cmg
  const std::set<std::string>* reference_keys = nullptr;  // cmg novelty
  CmgSession* session = nullptr;                  // cmg novelty
  double input_energy = 0.0;                      // crr
  std::optional<double> output_energy;            // crr
  FingerprintConfig fp;
};

// Format reward plus the task's accuracy component(s) for one completion.
RewardResult score_completion(TaskKind task, std::string_view completion,
                              std::string_view truth, ScoreContext& ctx);

// Group scoring; applies the reaction-naming same-wrong-class penalty.
std::vector<RewardResult> score_group(TaskKind task,
                                      std::span<const std::string> completions,
                                      std::string_view truth,
                                      ScoreContext& ctx);

}  // namespace chemscore::rewards

#endif  // CHEMSCORE_REWARDS_HPP
