#include "voxbend/afpo.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "voxbend/csv.hpp"

namespace voxbend {

bool dominates(const AgedGenome& a, const AgedGenome& b) {
  if (a.aptitude < b.aptitude || a.age > b.age) return false;
  return a.aptitude > b.aptitude || a.age < b.age;
}

std::vector<int> pareto_front(const std::vector<AgedGenome>& pop) {
  std::vector<int> front;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pop.size() && !dominated; ++j)
      if (j != i && dominates(pop[j], pop[i])) dominated = true;
    if (!dominated) front.push_back(static_cast<int>(i));
  }
  return front;
}

AfpoEngine::AfpoEngine(const NeatConfig& cfg, int num_inputs, int num_outputs,
                       BatchEvalFn eval, std::uint64_t master_seed)
    : cfg_(cfg),
      num_inputs_(num_inputs),
      num_outputs_(num_outputs),
      eval_(std::move(eval)),
      ledger_((num_inputs + 1) * num_outputs, num_inputs + 1 + num_outputs),
      repro_rng_(make_stream(master_seed, "repro")),
      newcomer_rng_(make_stream(master_seed, "newcomer")) {
  std::string why;
  if (!cfg_.valid(&why)) throw std::invalid_argument("afpo config: " + why);
  Rng init = make_stream(master_seed, "init");
  population_.resize(static_cast<std::size_t>(cfg_.population_size));
  for (auto& m : population_) {
    m.genome = random_genome_from(init);
    m.age = 1;
  }
}

Genome AfpoEngine::random_genome_from(Rng& rng) {
  return random_genome(num_inputs_, num_outputs_, cfg_.weight_init_min,
                       cfg_.weight_init_max, rng);
}

void AfpoEngine::evaluate_members(std::vector<AgedGenome*>& members) {
  if (members.empty()) return;
  std::vector<const Genome*> batch;
  batch.reserve(members.size());
  for (AgedGenome* m : members) batch.push_back(&m->genome);
  std::vector<double> scores = eval_(batch);
  if (scores.size() != members.size())
    throw std::runtime_error("evaluator returned wrong batch size");
  for (std::size_t i = 0; i < members.size(); ++i)
    members[i]->aptitude = scores[i];
}

void AfpoEngine::note_best() {
  for (const auto& m : population_)
    if (!has_best_ || m.aptitude > best_aptitude_) {
      best_aptitude_ = m.aptitude;
      best_genome_ = m.genome;
      has_best_ = true;
    }
}

void AfpoEngine::evaluate_current() {
  if (evaluated_) return;
  std::vector<AgedGenome*> all;
  for (auto& m : population_) all.push_back(&m);
  evaluate_members(all);
  evaluated_ = true;
  note_best();
}

void AfpoEngine::advance() {
  evaluate_current();
  ledger_.begin_generation();

  std::size_t target = static_cast<std::size_t>(cfg_.population_size);
  std::vector<AgedGenome> pool = population_;
  for (auto& m : pool) {
    ++m.age;
    m.newcomer = false;
  }

  std::vector<AgedGenome*> fresh;
  for (std::size_t k = 0; k + 1 < target; ++k) {
    const AgedGenome& parent = pool[uniform_index(repro_rng_, target)];
    AgedGenome child;
    child.genome = mutate(parent.genome, cfg_, ledger_, repro_rng_);
    child.age = parent.age;
    pool.push_back(std::move(child));
  }
  AgedGenome newcomer;
  newcomer.genome = random_genome_from(newcomer_rng_);
  newcomer.age = 1;
  newcomer.newcomer = true;
  pool.push_back(std::move(newcomer));
  for (std::size_t i = target; i < pool.size(); ++i) fresh.push_back(&pool[i]);
  evaluate_members(fresh);

  std::vector<int> front = pareto_front(pool);
  std::vector<AgedGenome> next;
  if (front.size() > target) {
    // Truncate the front by aptitude (ties: younger first), but never drop
    // the newcomer: age diversity is the whole point of the injection.
    std::stable_sort(front.begin(), front.end(), [&](int a, int b) {
      const AgedGenome& ga = pool[static_cast<std::size_t>(a)];
      const AgedGenome& gb = pool[static_cast<std::size_t>(b)];
      if (ga.aptitude != gb.aptitude) return ga.aptitude > gb.aptitude;
      return ga.age < gb.age;
    });
    bool newcomer_kept = false;
    for (std::size_t k = 0; k < target; ++k)
      if (pool[static_cast<std::size_t>(front[k])].newcomer) newcomer_kept = true;
    for (std::size_t k = 0; k < target; ++k)
      next.push_back(pool[static_cast<std::size_t>(front[k])]);
    if (!newcomer_kept) next.back() = pool.back();
  } else {
    for (int i : front) next.push_back(pool[static_cast<std::size_t>(i)]);
    // Refill with mutants of aged survivors (fall back to the aged pool when
    // the front is all-newcomer) so the single age-1 slot stays unique.
    std::vector<std::size_t> parents;
    for (std::size_t i = 0; i < next.size(); ++i)
      if (next[i].age > 1) parents.push_back(i);
    std::vector<const AgedGenome*> parent_pool;
    if (!parents.empty()) {
      for (std::size_t i : parents) parent_pool.push_back(&next[i]);
    } else {
      for (const auto& m : pool)
        if (m.age > 1) parent_pool.push_back(&m);
    }
    std::vector<AgedGenome> refill;
    while (next.size() + refill.size() < target) {
      const AgedGenome& parent =
          *parent_pool[uniform_index(repro_rng_, parent_pool.size())];
      AgedGenome child;
      child.genome = mutate(parent.genome, cfg_, ledger_, repro_rng_);
      child.age = parent.age;
      refill.push_back(std::move(child));
    }
    std::vector<AgedGenome*> to_eval;
    for (auto& m : refill) to_eval.push_back(&m);
    evaluate_members(to_eval);
    for (auto& m : refill) next.push_back(std::move(m));
  }

  population_ = std::move(next);
  ++generation_;
  note_best();
}

GenerationStats AfpoEngine::stats() const {
  GenerationStats out;
  out.generation = generation_;
  if (!population_.empty()) {
    double best = population_[0].aptitude;
    double sum = 0.0;
    for (const auto& m : population_) {
      best = std::max(best, m.aptitude);
      sum += m.aptitude;
    }
    out.best_fitness = best;
    out.mean_fitness = sum / static_cast<double>(population_.size());
  }
  out.species_count = 1;
  std::vector<Genome> genomes;
  genomes.reserve(population_.size());
  for (const auto& m : population_) genomes.push_back(m.genome);
  out.activation_entropy = activation_entropy(genomes);
  out.best_so_far = best_aptitude_;
  return out;
}

std::string AfpoEngine::checkpoint_text() const {
  std::ostringstream out;
  out << "afpo-checkpoint 1\n";
  out << "arity " << num_inputs_ << " " << num_outputs_ << "\n";
  out << "generation " << generation_ << "\n";
  out << "evaluated " << (evaluated_ ? 1 : 0) << "\n";
  out << ledger_.to_text();
  out << "best " << (has_best_ ? 1 : 0) << " " << format_double(best_aptitude_) << "\n";
  if (has_best_) out << genome_to_text(best_genome_);
  out << "population " << population_.size() << "\n";
  for (const auto& m : population_) {
    out << "member " << m.age << " " << format_double(m.aptitude) << " "
        << (m.newcomer ? 1 : 0) << "\n";
    out << genome_to_text(m.genome);
  }
  out << "repro_rng " << repro_rng_ << "\n";
  out << "newcomer_rng " << newcomer_rng_ << "\n";
  return out.str();
}

bool AfpoEngine::restore(const std::string& text, const NeatConfig& cfg, BatchEvalFn eval,
                         AfpoEngine& out, std::string* error) {
  auto fail = [&](const std::string& why) {
    if (error) *error = why;
    return false;
  };
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "afpo-checkpoint" || version != 1)
    return fail("not an afpo checkpoint");

  AfpoEngine engine;
  engine.cfg_ = cfg;
  engine.eval_ = std::move(eval);

  if (!(in >> tag >> engine.num_inputs_ >> engine.num_outputs_) || tag != "arity")
    return fail("missing arity");
  if (!(in >> tag >> engine.generation_) || tag != "generation")
    return fail("missing generation");
  int evaluated = 0;
  if (!(in >> tag >> evaluated) || tag != "evaluated") return fail("missing evaluated");
  engine.evaluated_ = evaluated != 0;

  int next_innov = 0;
  int next_node = 0;
  if (!(in >> tag >> next_innov >> next_node) || tag != "ledger")
    return fail("missing ledger");
  engine.ledger_ = InnovationLedger(next_innov, next_node);

  int has_best = 0;
  std::string best;
  if (!(in >> tag >> has_best >> best) || tag != "best") return fail("missing best");
  engine.has_best_ = has_best != 0;
  engine.best_aptitude_ = parse_double(best);
  if (engine.has_best_ && !genome_from_stream(in, engine.best_genome_, error))
    return false;

  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "population") return fail("missing population");
  engine.population_.resize(count);
  for (auto& m : engine.population_) {
    int newcomer = 0;
    std::string aptitude;
    if (!(in >> tag >> m.age >> aptitude >> newcomer) || tag != "member")
      return fail("missing member record");
    m.aptitude = parse_double(aptitude);
    m.newcomer = newcomer != 0;
    if (!genome_from_stream(in, m.genome, error)) return false;
  }

  if (!(in >> tag) || tag != "repro_rng") return fail("missing repro rng");
  if (!(in >> engine.repro_rng_)) return fail("bad repro rng state");
  if (!(in >> tag) || tag != "newcomer_rng") return fail("missing newcomer rng");
  if (!(in >> engine.newcomer_rng_)) return fail("bad newcomer rng state");

  out = std::move(engine);
  return true;
}

}  // namespace voxbend
