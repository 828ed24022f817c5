#include "voxbend/cppn.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "voxbend/csv.hpp"

namespace voxbend {

const NodeGene* Genome::find_node(int id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

NodeGene* Genome::find_node(int id) {
  for (auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

bool Genome::has_connection(int source, int target) const {
  for (const auto& c : conns)
    if (c.source == source && c.target == target) return true;
  return false;
}

ConnGene* Genome::find_connection(int source, int target) {
  for (auto& c : conns)
    if (c.source == source && c.target == target) return &c;
  return nullptr;
}

bool Genome::would_cycle(int source, int target) const {
  if (source == target) return true;
  // source -> target closes a cycle iff source is already reachable from
  // target; walk forward from target over every gene, enabled or not.
  std::vector<int> stack = {target};
  std::vector<int> seen;
  while (!stack.empty()) {
    int at = stack.back();
    stack.pop_back();
    if (at == source) return true;
    if (std::find(seen.begin(), seen.end(), at) != seen.end()) continue;
    seen.push_back(at);
    for (const auto& c : conns)
      if (c.source == at) stack.push_back(c.target);
  }
  return false;
}

bool Genome::outputs_connected() const {
  std::vector<int> stack;
  for (const auto& n : nodes)
    if (n.type == NodeType::kInput || n.type == NodeType::kBias) stack.push_back(n.id);
  std::vector<int> seen = stack;
  while (!stack.empty()) {
    int at = stack.back();
    stack.pop_back();
    for (const auto& c : conns)
      if (c.enabled && c.source == at &&
          std::find(seen.begin(), seen.end(), c.target) == seen.end()) {
        seen.push_back(c.target);
        stack.push_back(c.target);
      }
  }
  for (const auto& n : nodes)
    if (n.type == NodeType::kOutput &&
        std::find(seen.begin(), seen.end(), n.id) == seen.end())
      return false;
  return true;
}

Genome make_minimal_genome(int num_inputs, int num_outputs,
                           Activation output_activation) {
  Genome g;
  g.num_inputs = num_inputs;
  g.num_outputs = num_outputs;
  for (int i = 0; i < num_inputs; ++i)
    g.nodes.push_back({i, NodeType::kInput, Activation::kSigmoid});
  g.nodes.push_back({num_inputs, NodeType::kBias, Activation::kSigmoid});
  for (int o = 0; o < num_outputs; ++o)
    g.nodes.push_back({num_inputs + 1 + o, NodeType::kOutput, output_activation});
  for (int s = 0; s <= num_inputs; ++s)
    for (int o = 0; o < num_outputs; ++o)
      g.conns.push_back({s * num_outputs + o, s, num_inputs + 1 + o, 0.0, true});
  return g;
}

Genome random_genome(int num_inputs, int num_outputs, double weight_min,
                     double weight_max, Rng& rng) {
  Genome g = make_minimal_genome(num_inputs, num_outputs, Activation::kSigmoid);
  for (int o = 0; o < num_outputs; ++o) {
    NodeGene* node = g.find_node(g.output_id(o));
    node->activation =
        static_cast<Activation>(uniform_index(rng, kGenomeActivationCount));
  }
  for (auto& c : g.conns) c.weight = uniform_range(rng, weight_min, weight_max);
  return g;
}

CppnEvaluator::CppnEvaluator(const Genome& genome) : genome_(&genome) {
  for (const auto& n : genome.nodes) max_id_ = std::max(max_id_, n.id);
  id_to_index_.assign(static_cast<std::size_t>(max_id_) + 1, -1);
  for (std::size_t i = 0; i < genome.nodes.size(); ++i)
    id_to_index_[static_cast<std::size_t>(genome.nodes[i].id)] = static_cast<int>(i);

  // Kahn's algorithm over the full gene graph (disabled included); ties
  // resolve by node-list order so evaluation order is deterministic.
  std::vector<int> indegree(genome.nodes.size(), 0);
  for (const auto& c : genome.conns) {
    int t = id_to_index_[static_cast<std::size_t>(c.target)];
    if (t >= 0) ++indegree[static_cast<std::size_t>(t)];
  }
  std::vector<int> ready;
  for (std::size_t i = 0; i < genome.nodes.size(); ++i)
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
  std::size_t head = 0;
  while (head < ready.size()) {
    int at = ready[head++];
    order_.push_back(at);
    for (const auto& c : genome.conns) {
      if (id_to_index_[static_cast<std::size_t>(c.source)] != at) continue;
      int t = id_to_index_[static_cast<std::size_t>(c.target)];
      if (t >= 0 && --indegree[static_cast<std::size_t>(t)] == 0) ready.push_back(t);
    }
  }
  if (order_.size() != genome.nodes.size())
    throw std::invalid_argument("pattern network contains a cycle");
}

std::vector<double> CppnEvaluator::evaluate(const std::vector<double>& inputs) const {
  if (static_cast<int>(inputs.size()) != genome_->num_inputs)
    throw std::invalid_argument("input arity mismatch");
  std::vector<double> value(static_cast<std::size_t>(max_id_) + 1, 0.0);
  for (int idx : order_) {
    const NodeGene& node = genome_->nodes[static_cast<std::size_t>(idx)];
    if (node.type == NodeType::kInput) {
      value[static_cast<std::size_t>(node.id)] = inputs[static_cast<std::size_t>(node.id)];
      continue;
    }
    if (node.type == NodeType::kBias) {
      value[static_cast<std::size_t>(node.id)] = 1.0;
      continue;
    }
    double sum = 0.0;
    for (const auto& c : genome_->conns)
      if (c.enabled && c.target == node.id)
        sum += c.weight * value[static_cast<std::size_t>(c.source)];
    value[static_cast<std::size_t>(node.id)] = apply_activation(node.activation, sum);
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(genome_->num_outputs));
  for (int o = 0; o < genome_->num_outputs; ++o)
    out.push_back(value[static_cast<std::size_t>(genome_->output_id(o))]);
  return out;
}

std::string genome_to_text(const Genome& genome) {
  std::string out = "genome " + std::to_string(genome.num_inputs) + " " +
                    std::to_string(genome.num_outputs) + "\n";
  out += "nodes " + std::to_string(genome.nodes.size()) + "\n";
  for (const auto& n : genome.nodes)
    out += std::to_string(n.id) + " " + std::to_string(static_cast<int>(n.type)) + " " +
           activation_name(n.activation) + "\n";
  out += "conns " + std::to_string(genome.conns.size()) + "\n";
  for (const auto& c : genome.conns)
    out += std::to_string(c.innovation) + " " + std::to_string(c.source) + " " +
           std::to_string(c.target) + " " + format_double(c.weight) + " " +
           (c.enabled ? "1" : "0") + "\n";
  return out;
}

bool genome_from_text(const std::string& text, Genome& out, std::string* error) {
  std::istringstream in(text);
  return genome_from_stream(in, out, error);
}

bool genome_from_stream(std::istream& in, Genome& out, std::string* error) {
  auto fail = [&](const std::string& why) {
    if (error) *error = why;
    return false;
  };
  std::string tag;
  Genome g;
  if (!(in >> tag) || tag != "genome") return fail("missing genome header");
  if (!(in >> g.num_inputs >> g.num_outputs)) return fail("bad genome arity");
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "nodes") return fail("missing node section");
  for (std::size_t i = 0; i < count; ++i) {
    NodeGene n;
    int type = 0;
    std::string act;
    if (!(in >> n.id >> type >> act)) return fail("truncated node list");
    if (type < 0 || type > static_cast<int>(NodeType::kOutput)) return fail("bad node type");
    n.type = static_cast<NodeType>(type);
    if (!activation_from_name(act, n.activation)) return fail("unknown activation " + act);
    g.nodes.push_back(n);
  }
  if (!(in >> tag >> count) || tag != "conns") return fail("missing connection section");
  for (std::size_t i = 0; i < count; ++i) {
    ConnGene c;
    std::string weight;
    int enabled = 0;
    if (!(in >> c.innovation >> c.source >> c.target >> weight >> enabled))
      return fail("truncated connection list");
    c.weight = parse_double(weight);
    c.enabled = enabled != 0;
    g.conns.push_back(c);
  }
  out = std::move(g);
  return true;
}

double normalized_coordinate(int index, int dim) {
  if (dim <= 1) return -1.0;
  return 2.0 * index / (dim - 1) - 1.0;
}

}  // namespace voxbend
