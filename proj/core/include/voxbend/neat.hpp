#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "voxbend/cppn.hpp"
#include "voxbend/innovation.hpp"
#include "voxbend/rng.hpp"

namespace voxbend {

struct NeatConfig {
  int population_size = 100;
  int generations = 3000;

  // Compatibility distance (delta = c1*E/N + c2*D/N + c3*Wbar).
  double compat_threshold = 3.0;
  double c_excess = 1.0;
  double c_disjoint = 1.0;
  double c_weight = 0.5;
  // N := 1 when both genomes have fewer genes than this; 0 disables the
  // convention and N is always the larger genome's gene count.
  int small_genome_limit = 20;

  int max_stagnation = 25;
  double survival_threshold = 0.6;
  int champion_min_species_size = 5;

  // Structural mutation rates (each category fires independently).
  double activation_mutate_rate = 0.4;
  double add_connection_rate = 0.3;
  double delete_connection_rate = 0.2;
  double toggle_connection_rate = 0.5;
  double add_node_rate = 0.3;
  double delete_node_rate = 0.2;

  // Per-connection weight mutation: jitter with p_jitter, else replace with
  // p_replace, else leave untouched.
  double weight_jitter_rate = 0.8;
  double weight_replace_rate = 0.1;
  double weight_jitter_sigma = 0.5;
  double weight_init_min = -1.0;
  double weight_init_max = 1.0;

  double crossover_keep_disabled = 0.75;
  int mutation_retry_limit = 20;

  bool valid(std::string* why = nullptr) const;
};

double compatibility_distance(const Genome& a, const Genome& b, const NeatConfig& cfg);

// Which mutation categories were drawn and which actually changed the genome
// (a drawn category can be a no-op, e.g. add-connection on a saturated graph).
struct MutationReport {
  bool weights_changed = false;
  bool activation_drawn = false, activation_applied = false;
  bool add_connection_drawn = false, add_connection_applied = false;
  bool delete_connection_drawn = false, delete_connection_applied = false;
  bool toggle_drawn = false, toggle_applied = false;
  bool add_node_drawn = false, add_node_applied = false;
  bool delete_node_drawn = false, delete_node_applied = false;
  bool retried_out = false;  // retry budget exhausted; genome returned unchanged
};

// Applies weight perturbation plus the structural categories in a fixed draw
// order. If the result would leave every output unreachable from the inputs
// and bias, the whole mutation is redrawn (up to cfg.mutation_retry_limit).
Genome mutate(const Genome& genome, const NeatConfig& cfg, InnovationLedger& ledger,
              Rng& rng, MutationReport* report = nullptr);

// Child takes the fitter parent's structure; genes matching by innovation
// take their weight from a uniformly random parent; a gene disabled in either
// parent stays disabled with probability cfg.crossover_keep_disabled.
Genome crossover(const Genome& fitter, const Genome& other, const NeatConfig& cfg, Rng& rng);

struct SpeciesRecord {
  int id = 0;
  Genome representative;
  std::vector<int> members;  // indices into the current population
  double best_fitness_ever = 0.0;
  bool ever_evaluated = false;
  int stagnation = 0;
};

// Assigns each genome to the first species (ascending id) whose representative
// is within compat_threshold, founding new species (ids from next_species_id)
// otherwise. Species left with no members are dropped; survivors keep their
// stagnation history. Representatives for pre-existing species are resampled
// from their previous members' genomes before assignment.
void speciate(const std::vector<Genome>& population, std::vector<SpeciesRecord>& species,
              int& next_species_id, const NeatConfig& cfg, Rng& rng);

// Offspring counts per species, proportional to summed fitness-shared
// (f_i / |species|) member fitness, largest-remainder rounded so the counts
// sum exactly to population_size. All-zero fitness degenerates to an equal
// split. Order matches `species`.
std::vector<int> shared_fitness_allotment(const std::vector<SpeciesRecord>& species,
                                          const std::vector<double>& fitness,
                                          const NeatConfig& cfg);

// Top share of a species eligible to reproduce: max(1, floor(0.6 * size)).
int eligible_parent_count(int species_size, const NeatConfig& cfg);

// One NEAT generation loop around a CPPN population. Fitness evaluation is
// delegated to a batch callback so the caller owns parallelism; everything
// else is a single-threaded transaction, so a master seed fixes the run
// regardless of evaluation worker count.
using BatchEvalFn = std::function<std::vector<double>(const std::vector<const Genome*>&)>;

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  int species_count = 0;
  double activation_entropy = 0.0;  // Shannon entropy (nats) over node activations
  double best_so_far = 0.0;
};

class NeatEngine {
 public:
  NeatEngine(const NeatConfig& cfg, int num_inputs, int num_outputs,
             BatchEvalFn eval, std::uint64_t master_seed);

  // Evaluates any unevaluated members of the current population (no-op when
  // already evaluated).
  void evaluate_current();
  // Produces the next generation from the current evaluated population and
  // re-speciates it. Requires evaluate_current() first.
  void advance();

  GenerationStats stats() const;  // of the current evaluated population
  int generation() const { return generation_; }
  const std::vector<Genome>& population() const { return population_; }
  const std::vector<double>& fitness() const { return fitness_; }
  const std::vector<SpeciesRecord>& species() const { return species_; }
  const Genome& best_genome_so_far() const { return best_genome_; }
  double best_fitness_so_far() const { return best_fitness_; }
  const InnovationLedger& ledger() const { return ledger_; }

  std::string checkpoint_text() const;
  static bool restore(const std::string& text, const NeatConfig& cfg, BatchEvalFn eval,
                      NeatEngine& out, std::string* error = nullptr);

 private:
  NeatEngine() = default;

  NeatConfig cfg_;
  int num_inputs_ = 0;
  int num_outputs_ = 0;
  BatchEvalFn eval_;
  InnovationLedger ledger_{0, 0};
  std::vector<Genome> population_;
  std::vector<double> fitness_;
  bool evaluated_ = false;
  std::vector<SpeciesRecord> species_;
  int next_species_id_ = 0;
  int generation_ = 0;
  Genome best_genome_;
  double best_fitness_ = 0.0;
  bool has_best_ = false;
  Rng repro_rng_;
  Rng species_rng_;
};

double activation_entropy(const std::vector<Genome>& population);

}  // namespace voxbend
