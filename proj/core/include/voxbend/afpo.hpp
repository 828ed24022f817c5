#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voxbend/neat.hpp"

namespace voxbend {

struct AgedGenome {
  Genome genome;
  int age = 1;
  double aptitude = 0.0;
  bool newcomer = false;  // injected this generation
};

// a dominates b when a is no worse on both objectives (maximize aptitude,
// minimize age) and strictly better on at least one.
bool dominates(const AgedGenome& a, const AgedGenome& b);

// Indices of the non-dominated members, in input order.
std::vector<int> pareto_front(const std::vector<AgedGenome>& pop);

// Age-Fitness Pareto baseline: mutation-only offspring, one random age-1
// newcomer per generation, survival by dominance with fill/truncate back to
// the population size. Reuses the NEAT mutation operator and rates.
class AfpoEngine {
 public:
  AfpoEngine(const NeatConfig& cfg, int num_inputs, int num_outputs,
             BatchEvalFn eval, std::uint64_t master_seed);

  void evaluate_current();
  // One generation: ages += 1, P-1 mutants (child age = parent age) plus one
  // age-1 newcomer, dominated individuals discarded, survivors truncated by
  // (aptitude desc, age asc) or refilled with mutants back to P. The injected
  // newcomer is always retained, and refill parents are drawn from age > 1
  // individuals, so exactly one age-1 member is present after every step.
  void advance();

  GenerationStats stats() const;
  int generation() const { return generation_; }
  const std::vector<AgedGenome>& population() const { return population_; }
  const Genome& best_genome_so_far() const { return best_genome_; }
  double best_aptitude_so_far() const { return best_aptitude_; }

  std::string checkpoint_text() const;
  static bool restore(const std::string& text, const NeatConfig& cfg, BatchEvalFn eval,
                      AfpoEngine& out, std::string* error = nullptr);

 private:
  AfpoEngine() = default;
  void evaluate_members(std::vector<AgedGenome*>& members);
  Genome random_genome_from(Rng& rng);
  void note_best();

  NeatConfig cfg_;
  int num_inputs_ = 0;
  int num_outputs_ = 0;
  BatchEvalFn eval_;
  InnovationLedger ledger_{0, 0};
  std::vector<AgedGenome> population_;
  bool evaluated_ = false;
  int generation_ = 0;
  Genome best_genome_;
  double best_aptitude_ = 0.0;
  bool has_best_ = false;
  Rng repro_rng_;
  Rng newcomer_rng_;
};

}  // namespace voxbend
