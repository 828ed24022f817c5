#include "voxbend/neat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "voxbend/csv.hpp"

namespace voxbend {

namespace {

constexpr double kCrossoverRate = 0.75;

bool rate01(double r) { return r >= 0.0 && r <= 1.0; }

}  // namespace

bool NeatConfig::valid(std::string* why) const {
  auto fail = [&](const char* what) {
    if (why) *why = what;
    return false;
  };
  if (population_size < 2) return fail("population_size must be at least 2");
  if (generations < 1) return fail("generations must be positive");
  if (compat_threshold <= 0.0) return fail("compat_threshold must be positive");
  if (c_excess < 0.0 || c_disjoint < 0.0 || c_weight < 0.0)
    return fail("compatibility coefficients must be non-negative");
  if (small_genome_limit < 0) return fail("small_genome_limit must be non-negative");
  if (max_stagnation < 1) return fail("max_stagnation must be positive");
  if (survival_threshold <= 0.0 || survival_threshold > 1.0)
    return fail("survival_threshold must be in (0, 1]");
  if (champion_min_species_size < 1)
    return fail("champion_min_species_size must be positive");
  if (!rate01(activation_mutate_rate) || !rate01(add_connection_rate) ||
      !rate01(delete_connection_rate) || !rate01(toggle_connection_rate) ||
      !rate01(add_node_rate) || !rate01(delete_node_rate))
    return fail("mutation rates must be in [0, 1]");
  if (!rate01(weight_jitter_rate) || !rate01(weight_replace_rate) ||
      weight_jitter_rate + weight_replace_rate > 1.0)
    return fail("weight op rates must be in [0, 1] and sum to at most 1");
  if (weight_jitter_sigma <= 0.0) return fail("weight_jitter_sigma must be positive");
  if (weight_init_min >= weight_init_max)
    return fail("weight_init_min must be below weight_init_max");
  if (!rate01(crossover_keep_disabled))
    return fail("crossover_keep_disabled must be in [0, 1]");
  if (mutation_retry_limit < 1) return fail("mutation_retry_limit must be positive");
  return true;
}

double compatibility_distance(const Genome& a, const Genome& b, const NeatConfig& cfg) {
  int max_a = -1;
  int max_b = -1;
  for (const auto& c : a.conns) max_a = std::max(max_a, c.innovation);
  for (const auto& c : b.conns) max_b = std::max(max_b, c.innovation);

  int excess = 0;
  int disjoint = 0;
  int matching = 0;
  double weight_diff = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.conns.size() || ib < b.conns.size()) {
    if (ia < a.conns.size() && ib < b.conns.size() &&
        a.conns[ia].innovation == b.conns[ib].innovation) {
      ++matching;
      weight_diff += std::fabs(a.conns[ia].weight - b.conns[ib].weight);
      ++ia;
      ++ib;
      continue;
    }
    bool take_a = ib >= b.conns.size() ||
                  (ia < a.conns.size() && a.conns[ia].innovation < b.conns[ib].innovation);
    int innov = take_a ? a.conns[ia].innovation : b.conns[ib].innovation;
    int other_max = take_a ? max_b : max_a;
    if (innov > other_max)
      ++excess;
    else
      ++disjoint;
    take_a ? ++ia : ++ib;
  }

  double n = static_cast<double>(std::max(a.conns.size(), b.conns.size()));
  if (n < 1.0) n = 1.0;
  if (cfg.small_genome_limit > 0 &&
      a.conns.size() < static_cast<std::size_t>(cfg.small_genome_limit) &&
      b.conns.size() < static_cast<std::size_t>(cfg.small_genome_limit))
    n = 1.0;
  double wbar = matching > 0 ? weight_diff / matching : 0.0;
  return cfg.c_excess * excess / n + cfg.c_disjoint * disjoint / n + cfg.c_weight * wbar;
}

Genome crossover(const Genome& fitter, const Genome& other, const NeatConfig& cfg,
                 Rng& rng) {
  Genome child;
  child.num_inputs = fitter.num_inputs;
  child.num_outputs = fitter.num_outputs;
  child.nodes = fitter.nodes;
  child.conns.reserve(fitter.conns.size());
  for (const auto& gene : fitter.conns) {
    ConnGene out = gene;
    const ConnGene* match = nullptr;
    for (const auto& c : other.conns)
      if (c.innovation == gene.innovation) {
        match = &c;
        break;
      }
    if (match && uniform01(rng) >= 0.5) out.weight = match->weight;
    bool disabled_somewhere = !gene.enabled || (match && !match->enabled);
    if (disabled_somewhere)
      out.enabled = !chance(rng, cfg.crossover_keep_disabled);
    child.conns.push_back(out);
  }
  return child;
}

namespace {

void insert_conn_sorted(Genome& g, const ConnGene& gene) {
  auto at = std::lower_bound(
      g.conns.begin(), g.conns.end(), gene,
      [](const ConnGene& a, const ConnGene& b) { return a.innovation < b.innovation; });
  g.conns.insert(at, gene);
}

void insert_node_sorted(Genome& g, const NodeGene& node) {
  auto at = std::lower_bound(
      g.nodes.begin(), g.nodes.end(), node,
      [](const NodeGene& a, const NodeGene& b) { return a.id < b.id; });
  g.nodes.insert(at, node);
}

Genome mutate_once(const Genome& genome, const NeatConfig& cfg, InnovationLedger& ledger,
                   Rng& rng, MutationReport& rep) {
  Genome g = genome;

  for (auto& c : g.conns) {
    double u = uniform01(rng);
    if (u < cfg.weight_jitter_rate) {
      c.weight += normal01(rng) * cfg.weight_jitter_sigma;
      rep.weights_changed = true;
    } else if (u < cfg.weight_jitter_rate + cfg.weight_replace_rate) {
      c.weight = uniform_range(rng, cfg.weight_init_min, cfg.weight_init_max);
      rep.weights_changed = true;
    }
  }

  rep.activation_drawn = chance(rng, cfg.activation_mutate_rate);
  if (rep.activation_drawn) {
    std::vector<NodeGene*> mutable_nodes;
    for (auto& n : g.nodes)
      if (n.type == NodeType::kHidden || n.type == NodeType::kOutput)
        mutable_nodes.push_back(&n);
    if (!mutable_nodes.empty()) {
      NodeGene* node = mutable_nodes[uniform_index(rng, mutable_nodes.size())];
      auto act = static_cast<Activation>(uniform_index(rng, kGenomeActivationCount));
      rep.activation_applied = act != node->activation;
      node->activation = act;
    }
  }

  rep.add_connection_drawn = chance(rng, cfg.add_connection_rate);
  if (rep.add_connection_drawn) {
    // src->dst is legal when the pair is new and dst cannot already reach src
    // (full gene graph, disabled included). One reachability pass over dense
    // indices keeps this linear-ish even on heavily grown genomes.
    std::vector<int> index_of;
    int max_id = -1;
    for (const auto& n : g.nodes) max_id = std::max(max_id, n.id);
    index_of.assign(static_cast<std::size_t>(max_id) + 1, -1);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      index_of[static_cast<std::size_t>(g.nodes[i].id)] = static_cast<int>(i);
    std::vector<std::vector<int>> next_of(g.nodes.size());
    for (const auto& c : g.conns)
      next_of[static_cast<std::size_t>(index_of[static_cast<std::size_t>(c.source)])]
          .push_back(index_of[static_cast<std::size_t>(c.target)]);
    std::size_t n = g.nodes.size();
    std::vector<bool> reaches(n * n, false);  // reaches[from*n + to]
    std::vector<int> stack;
    for (std::size_t from = 0; from < n; ++from) {
      stack.assign(1, static_cast<int>(from));
      while (!stack.empty()) {
        int at = stack.back();
        stack.pop_back();
        for (int to : next_of[static_cast<std::size_t>(at)])
          if (!reaches[from * n + static_cast<std::size_t>(to)]) {
            reaches[from * n + static_cast<std::size_t>(to)] = true;
            stack.push_back(to);
          }
      }
    }
    std::set<std::pair<int, int>> taken;
    for (const auto& c : g.conns) taken.emplace(c.source, c.target);
    std::vector<std::pair<int, int>> open;
    for (std::size_t si = 0; si < n; ++si) {
      const NodeGene& src = g.nodes[si];
      if (src.type == NodeType::kOutput) continue;
      for (std::size_t di = 0; di < n; ++di) {
        const NodeGene& dst = g.nodes[di];
        if (dst.type == NodeType::kInput || dst.type == NodeType::kBias) continue;
        if (src.id == dst.id || taken.count({src.id, dst.id})) continue;
        if (reaches[di * n + si]) continue;
        open.emplace_back(src.id, dst.id);
      }
    }
    if (!open.empty()) {
      auto [s, t] = open[uniform_index(rng, open.size())];
      ConnGene gene;
      gene.innovation = ledger.connection_innovation(s, t);
      gene.source = s;
      gene.target = t;
      gene.weight = uniform_range(rng, cfg.weight_init_min, cfg.weight_init_max);
      insert_conn_sorted(g, gene);
      rep.add_connection_applied = true;
    }
  }

  rep.delete_connection_drawn = chance(rng, cfg.delete_connection_rate);
  if (rep.delete_connection_drawn && !g.conns.empty()) {
    g.conns.erase(g.conns.begin() +
                  static_cast<std::ptrdiff_t>(uniform_index(rng, g.conns.size())));
    rep.delete_connection_applied = true;
  }

  rep.toggle_drawn = chance(rng, cfg.toggle_connection_rate);
  if (rep.toggle_drawn && !g.conns.empty()) {
    ConnGene& gene = g.conns[uniform_index(rng, g.conns.size())];
    gene.enabled = !gene.enabled;
    rep.toggle_applied = true;
  }

  rep.add_node_drawn = chance(rng, cfg.add_node_rate);
  if (rep.add_node_drawn) {
    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < g.conns.size(); ++i)
      if (g.conns[i].enabled) enabled.push_back(i);
    if (!enabled.empty()) {
      std::size_t pick = enabled[uniform_index(rng, enabled.size())];
      SplitRecord rec = ledger.split_records(g.conns[pick].innovation);
      if (!g.find_node(rec.node_id)) {
        g.conns[pick].enabled = false;
        NodeGene node;
        node.id = rec.node_id;
        node.type = NodeType::kHidden;
        node.activation =
            static_cast<Activation>(uniform_index(rng, kGenomeActivationCount));
        int source = g.conns[pick].source;
        int target = g.conns[pick].target;
        double weight = g.conns[pick].weight;
        insert_node_sorted(g, node);
        insert_conn_sorted(g, {rec.in_innovation, source, rec.node_id, 1.0, true});
        insert_conn_sorted(g, {rec.out_innovation, rec.node_id, target, weight, true});
        rep.add_node_applied = true;
      }
    }
  }

  rep.delete_node_drawn = chance(rng, cfg.delete_node_rate);
  if (rep.delete_node_drawn) {
    std::vector<int> hidden;
    for (const auto& n : g.nodes)
      if (n.type == NodeType::kHidden) hidden.push_back(n.id);
    if (!hidden.empty()) {
      int id = hidden[uniform_index(rng, hidden.size())];
      g.conns.erase(std::remove_if(g.conns.begin(), g.conns.end(),
                                   [id](const ConnGene& c) {
                                     return c.source == id || c.target == id;
                                   }),
                    g.conns.end());
      g.nodes.erase(std::remove_if(g.nodes.begin(), g.nodes.end(),
                                   [id](const NodeGene& n) { return n.id == id; }),
                    g.nodes.end());
      rep.delete_node_applied = true;
    }
  }

  return g;
}

}  // namespace

Genome mutate(const Genome& genome, const NeatConfig& cfg, InnovationLedger& ledger,
              Rng& rng, MutationReport* report) {
  for (int attempt = 0; attempt < std::max(1, cfg.mutation_retry_limit); ++attempt) {
    MutationReport rep;
    Genome g = mutate_once(genome, cfg, ledger, rng, rep);
    if (g.outputs_connected()) {
      if (report) *report = rep;
      return g;
    }
  }
  MutationReport rep;
  rep.retried_out = true;
  if (report) *report = rep;
  return genome;
}

void speciate(const std::vector<Genome>& population, std::vector<SpeciesRecord>& species,
              int& next_species_id, const NeatConfig& cfg, Rng& rng) {
  for (auto& sp : species) sp.members.clear();
  for (std::size_t i = 0; i < population.size(); ++i) {
    bool placed = false;
    for (auto& sp : species)
      if (compatibility_distance(population[i], sp.representative, cfg) <
          cfg.compat_threshold) {
        sp.members.push_back(static_cast<int>(i));
        placed = true;
        break;
      }
    if (!placed) {
      SpeciesRecord rec;
      rec.id = next_species_id++;
      rec.representative = population[i];
      rec.members = {static_cast<int>(i)};
      species.push_back(std::move(rec));
    }
  }
  species.erase(std::remove_if(species.begin(), species.end(),
                               [](const SpeciesRecord& sp) { return sp.members.empty(); }),
                species.end());
  // Resample each representative from this generation's members so the next
  // call measures compatibility against a current genome, not a fossil.
  for (auto& sp : species) {
    int pick = sp.members[uniform_index(rng, sp.members.size())];
    sp.representative = population[static_cast<std::size_t>(pick)];
  }
}

std::vector<int> shared_fitness_allotment(const std::vector<SpeciesRecord>& species,
                                          const std::vector<double>& fitness,
                                          const NeatConfig& cfg) {
  std::size_t count = species.size();
  std::vector<int> out(count, 0);
  if (count == 0) return out;

  std::vector<double> score(count, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    double sum = 0.0;
    for (int m : species[s].members) sum += fitness[static_cast<std::size_t>(m)];
    if (!species[s].members.empty()) score[s] = sum / species[s].members.size();
    if (score[s] > 0.0) total += score[s];
  }

  std::vector<double> quota(count);
  for (std::size_t s = 0; s < count; ++s)
    quota[s] = total > 0.0 ? cfg.population_size * std::max(score[s], 0.0) / total
                           : static_cast<double>(cfg.population_size) / count;

  int assigned = 0;
  std::vector<double> remainder(count);
  for (std::size_t s = 0; s < count; ++s) {
    out[s] = static_cast<int>(std::floor(quota[s]));
    remainder[s] = quota[s] - out[s];
    assigned += out[s];
  }
  std::vector<std::size_t> order(count);
  for (std::size_t s = 0; s < count; ++s) order[s] = s;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < cfg.population_size; ++k)
    ++out[order[k % count]], ++assigned;
  return out;
}

int eligible_parent_count(int species_size, const NeatConfig& cfg) {
  int top = static_cast<int>(std::floor(cfg.survival_threshold * species_size + 1e-9));
  return std::max(1, top);
}

double activation_entropy(const std::vector<Genome>& population) {
  std::map<Activation, int> counts;
  int total = 0;
  for (const auto& g : population)
    for (const auto& n : g.nodes)
      if (n.type == NodeType::kHidden || n.type == NodeType::kOutput) {
        ++counts[n.activation];
        ++total;
      }
  if (total == 0) return 0.0;
  double h = 0.0;
  for (const auto& [act, c] : counts) {
    double p = static_cast<double>(c) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

NeatEngine::NeatEngine(const NeatConfig& cfg, int num_inputs, int num_outputs,
                       BatchEvalFn eval, std::uint64_t master_seed)
    : cfg_(cfg),
      num_inputs_(num_inputs),
      num_outputs_(num_outputs),
      eval_(std::move(eval)),
      ledger_((num_inputs + 1) * num_outputs, num_inputs + 1 + num_outputs),
      repro_rng_(make_stream(master_seed, "repro")),
      species_rng_(make_stream(master_seed, "species")) {
  std::string why;
  if (!cfg_.valid(&why)) throw std::invalid_argument("neat config: " + why);
  Rng init = make_stream(master_seed, "init");
  population_.reserve(static_cast<std::size_t>(cfg_.population_size));
  for (int i = 0; i < cfg_.population_size; ++i)
    population_.push_back(random_genome(num_inputs, num_outputs, cfg_.weight_init_min,
                                        cfg_.weight_init_max, init));
  fitness_.assign(population_.size(), 0.0);
  speciate(population_, species_, next_species_id_, cfg_, species_rng_);
}

void NeatEngine::evaluate_current() {
  if (evaluated_) return;
  std::vector<const Genome*> batch;
  batch.reserve(population_.size());
  for (const auto& g : population_) batch.push_back(&g);
  fitness_ = eval_(batch);
  if (fitness_.size() != population_.size())
    throw std::runtime_error("evaluator returned wrong batch size");
  evaluated_ = true;

  for (auto& sp : species_) {
    double best = 0.0;
    bool any = false;
    for (int m : sp.members) {
      double f = fitness_[static_cast<std::size_t>(m)];
      if (!any || f > best) best = f, any = true;
    }
    if (!any) continue;
    if (!sp.ever_evaluated || best > sp.best_fitness_ever) {
      sp.best_fitness_ever = best;
      sp.ever_evaluated = true;
      sp.stagnation = 0;
    } else {
      ++sp.stagnation;
    }
  }

  for (std::size_t i = 0; i < population_.size(); ++i)
    if (!has_best_ || fitness_[i] > best_fitness_) {
      best_fitness_ = fitness_[i];
      best_genome_ = population_[i];
      has_best_ = true;
    }
}

void NeatEngine::advance() {
  evaluate_current();
  ledger_.begin_generation();

  // Stagnant species stop reproducing unless every species is stagnant (then
  // the guard would empty the population, so it stands down).
  std::vector<bool> stagnant(species_.size());
  bool all_stagnant = true;
  for (std::size_t s = 0; s < species_.size(); ++s) {
    stagnant[s] = species_[s].stagnation > cfg_.max_stagnation;
    if (!stagnant[s]) all_stagnant = false;
  }

  std::vector<int> counts;
  if (all_stagnant) {
    counts = shared_fitness_allotment(species_, fitness_, cfg_);
  } else {
    std::vector<SpeciesRecord> alive;
    for (std::size_t s = 0; s < species_.size(); ++s)
      if (!stagnant[s]) alive.push_back(species_[s]);
    std::vector<int> alive_counts = shared_fitness_allotment(alive, fitness_, cfg_);
    counts.assign(species_.size(), 0);
    std::size_t k = 0;
    for (std::size_t s = 0; s < species_.size(); ++s)
      if (!stagnant[s]) counts[s] = alive_counts[k++];
  }

  std::vector<Genome> next;
  next.reserve(static_cast<std::size_t>(cfg_.population_size));
  for (std::size_t s = 0; s < species_.size(); ++s) {
    if (counts[s] == 0) continue;
    std::vector<int> ranked = species_[s].members;
    std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) {
      return fitness_[static_cast<std::size_t>(a)] > fitness_[static_cast<std::size_t>(b)];
    });
    int to_make = counts[s];
    if (static_cast<int>(ranked.size()) >= cfg_.champion_min_species_size) {
      next.push_back(population_[static_cast<std::size_t>(ranked[0])]);
      --to_make;
    }
    int pool = eligible_parent_count(static_cast<int>(ranked.size()), cfg_);
    for (int k = 0; k < to_make; ++k) {
      Genome child;
      if (pool >= 2 && chance(repro_rng_, kCrossoverRate)) {
        int a = ranked[uniform_index(repro_rng_, static_cast<std::uint64_t>(pool))];
        int b = ranked[uniform_index(repro_rng_, static_cast<std::uint64_t>(pool))];
        if (fitness_[static_cast<std::size_t>(b)] > fitness_[static_cast<std::size_t>(a)])
          std::swap(a, b);
        child = crossover(population_[static_cast<std::size_t>(a)],
                          population_[static_cast<std::size_t>(b)], cfg_, repro_rng_);
      } else {
        int a = ranked[uniform_index(repro_rng_, static_cast<std::uint64_t>(pool))];
        child = population_[static_cast<std::size_t>(a)];
      }
      next.push_back(mutate(child, cfg_, ledger_, repro_rng_));
    }
  }

  population_ = std::move(next);
  fitness_.assign(population_.size(), 0.0);
  evaluated_ = false;
  ++generation_;
  speciate(population_, species_, next_species_id_, cfg_, species_rng_);
}

GenerationStats NeatEngine::stats() const {
  GenerationStats out;
  out.generation = generation_;
  if (!population_.empty()) {
    double best = fitness_[0];
    double sum = 0.0;
    for (double f : fitness_) {
      best = std::max(best, f);
      sum += f;
    }
    out.best_fitness = best;
    out.mean_fitness = sum / static_cast<double>(fitness_.size());
  }
  out.species_count = static_cast<int>(species_.size());
  out.activation_entropy = activation_entropy(population_);
  out.best_so_far = best_fitness_;
  return out;
}

std::string NeatEngine::checkpoint_text() const {
  std::ostringstream out;
  out << "neat-checkpoint 1\n";
  out << "arity " << num_inputs_ << " " << num_outputs_ << "\n";
  out << "generation " << generation_ << "\n";
  out << "next_species_id " << next_species_id_ << "\n";
  out << "evaluated " << (evaluated_ ? 1 : 0) << "\n";
  out << ledger_.to_text();
  out << "best " << (has_best_ ? 1 : 0) << " " << format_double(best_fitness_) << "\n";
  if (has_best_) out << genome_to_text(best_genome_);
  out << "population " << population_.size() << "\n";
  for (const auto& g : population_) out << genome_to_text(g);
  out << "fitness " << fitness_.size() << "\n";
  for (double f : fitness_) out << format_double(f) << "\n";
  out << "species " << species_.size() << "\n";
  for (const auto& sp : species_) {
    out << "record " << sp.id << " " << sp.stagnation << " "
        << (sp.ever_evaluated ? 1 : 0) << " " << format_double(sp.best_fitness_ever)
        << " " << sp.members.size();
    for (int m : sp.members) out << " " << m;
    out << "\n";
    out << genome_to_text(sp.representative);
  }
  out << "repro_rng " << repro_rng_ << "\n";
  out << "species_rng " << species_rng_ << "\n";
  return out.str();
}

bool NeatEngine::restore(const std::string& text, const NeatConfig& cfg, BatchEvalFn eval,
                         NeatEngine& out, std::string* error) {
  auto fail = [&](const std::string& why) {
    if (error) *error = why;
    return false;
  };
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "neat-checkpoint" || version != 1)
    return fail("not a neat checkpoint");

  NeatEngine engine;
  engine.cfg_ = cfg;
  engine.eval_ = std::move(eval);

  if (!(in >> tag >> engine.num_inputs_ >> engine.num_outputs_) || tag != "arity")
    return fail("missing arity");
  if (!(in >> tag >> engine.generation_) || tag != "generation")
    return fail("missing generation");
  if (!(in >> tag >> engine.next_species_id_) || tag != "next_species_id")
    return fail("missing next_species_id");
  int evaluated = 0;
  if (!(in >> tag >> evaluated) || tag != "evaluated") return fail("missing evaluated");
  engine.evaluated_ = evaluated != 0;

  int next_innov = 0;
  int next_node = 0;
  if (!(in >> tag >> next_innov >> next_node) || tag != "ledger")
    return fail("missing ledger");
  engine.ledger_ = InnovationLedger(next_innov, next_node);

  int has_best = 0;
  std::string best_fitness;
  if (!(in >> tag >> has_best >> best_fitness) || tag != "best")
    return fail("missing best");
  engine.has_best_ = has_best != 0;
  engine.best_fitness_ = parse_double(best_fitness);
  if (engine.has_best_ && !genome_from_stream(in, engine.best_genome_, error))
    return false;

  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "population") return fail("missing population");
  engine.population_.resize(count);
  for (auto& g : engine.population_)
    if (!genome_from_stream(in, g, error)) return false;

  if (!(in >> tag >> count) || tag != "fitness") return fail("missing fitness");
  engine.fitness_.resize(count);
  for (auto& f : engine.fitness_) {
    std::string word;
    if (!(in >> word)) return fail("truncated fitness list");
    f = parse_double(word);
  }

  if (!(in >> tag >> count) || tag != "species") return fail("missing species");
  engine.species_.resize(count);
  for (auto& sp : engine.species_) {
    int ever = 0;
    std::string best;
    std::size_t members = 0;
    if (!(in >> tag >> sp.id >> sp.stagnation >> ever >> best >> members) ||
        tag != "record")
      return fail("missing species record");
    sp.ever_evaluated = ever != 0;
    sp.best_fitness_ever = parse_double(best);
    sp.members.resize(members);
    for (int& m : sp.members)
      if (!(in >> m)) return fail("truncated species members");
    if (!genome_from_stream(in, sp.representative, error)) return false;
  }

  if (!(in >> tag) || tag != "repro_rng") return fail("missing repro rng");
  if (!(in >> engine.repro_rng_)) return fail("bad repro rng state");
  if (!(in >> tag) || tag != "species_rng") return fail("missing species rng");
  if (!(in >> engine.species_rng_)) return fail("bad species rng state");

  out = std::move(engine);
  return true;
}

}  // namespace voxbend
