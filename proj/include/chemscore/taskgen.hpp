#ifndef CHEMSCORE_TASKGEN_HPP
#define CHEMSCORE_TASKGEN_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemscore/composition.hpp"
#include "chemscore/rewards.hpp"

namespace chemscore::taskgen {

class TaskGenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoCandidates : public TaskGenError {
 public:
  using TaskGenError::TaskGenError;
};

class DegenerateReaction : public TaskGenError {
 public:
  using TaskGenError::TaskGenError;
};

class UnparsableEquation : public TaskGenError {
 public:
  using TaskGenError::TaskGenError;
};

struct ReactionRecord {
  std::string id;
  std::vector<std::string> reactants;
  std::vector<std::string> conditions;
  std::vector<std::string> products;
  std::optional<std::string> class_label;
};

struct TaskInstance {
  std::string task;
  std::string prompt;
  std::string truth;
  std::vector<std::pair<std::string, std::string>> options;  // label -> text
  std::string provenance_id;
  std::uint64_t seed = 0;
  // What a truth-echoing endpoint should answer; equals truth for most tasks.
  std::string echo;
};

// JSON-lines {id, reactants[], conditions[], products[], class?}.
std::vector<ReactionRecord> read_reaction_records(std::istream& in);
void write_reaction_records(std::ostream& out,
                            std::span<const ReactionRecord> records);

std::vector<TaskInstance> read_task_instances(std::istream& in);
void write_task_instances(std::ostream& out,
                          std::span<const TaskInstance> instances);

inline constexpr std::size_t kCandidateBatch = 50;

// Four options: the original reaction plus three copies with one
// reactant/reagent replaced by the most Tanimoto-similar molecule from an
// independently drawn batch of kCandidateBatch candidates; equal scores
// break to the lowest candidate index.
TaskInstance gen_rxr(const ReactionRecord& rec,
                     std::span<const std::string> candidates,
                     std::uint64_t seed);

// Four options: three copies with a random reagent swapped against the
// longest product SMILES, one untouched.
TaskInstance gen_rxi(const ReactionRecord& rec, std::uint64_t seed);

// Single-reaction True/False judgement; truth False when corrupted is set
// (the reaction then gets an RxR-style replacement first).
TaskInstance gen_rxtf(const ReactionRecord& rec, bool corrupted,
                      std::span<const std::string> candidates,
                      std::uint64_t seed);

// Element-conditioned generation prompt from a composition's distinct
// element set; scored later by cmg_reward rather than string equality.
TaskInstance gen_cmg(const chem::CompositionSequence& composition,
                     std::string_view source_id);

// Masks one product coefficient or one whole product compound with [MASK];
// truth is the full balanced equation.
TaskInstance gen_ceb(std::string_view equation, std::uint64_t seed,
                     std::string_view source_id = "");

// Prompt builders for the remaining benchmark tasks.
TaskInstance gen_rxp(const ReactionRecord& rec);
TaskInstance gen_i2s(std::string_view iupac_name, std::string_view truth_smiles,
                     std::string_view source_id = "");
TaskInstance gen_rxn(const ReactionRecord& rec);

// Even per-class down-sampling of labeled records (the reaction-naming
// balancing step); labels must come pre-assigned.
std::vector<ReactionRecord> balance_by_class(
    std::span<const ReactionRecord> records, std::size_t target_total,
    std::uint64_t seed);

// Derived per-record seed used by the generators' CLI driver.
std::uint64_t record_seed(std::uint64_t base_seed, std::string_view record_id);

}  // namespace chemscore::taskgen

#endif  // CHEMSCORE_TASKGEN_HPP
