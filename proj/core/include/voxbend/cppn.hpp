#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "voxbend/activation.hpp"
#include "voxbend/rng.hpp"

namespace voxbend {

enum class NodeType : std::uint8_t { kInput = 0, kBias, kHidden, kOutput };

struct NodeGene {
  int id = 0;
  NodeType type = NodeType::kHidden;
  Activation activation = Activation::kSigmoid;
};

struct ConnGene {
  int innovation = 0;
  int source = 0;
  int target = 0;
  double weight = 0.0;
  bool enabled = true;
};

// Directed-acyclic pattern network. Node ids: inputs 0..n_in-1, bias n_in,
// outputs n_in+1..n_in+n_out, hidden ids handed out by the innovation ledger.
struct Genome {
  int num_inputs = 0;
  int num_outputs = 0;
  std::vector<NodeGene> nodes;  // kept sorted by id
  std::vector<ConnGene> conns;  // kept sorted by innovation

  int bias_id() const { return num_inputs; }
  int output_id(int k) const { return num_inputs + 1 + k; }

  const NodeGene* find_node(int id) const;
  NodeGene* find_node(int id);
  bool has_connection(int source, int target) const;
  ConnGene* find_connection(int source, int target);

  // True if adding source->target would close a directed cycle over the full
  // connection graph (disabled genes included, so re-enabling stays safe).
  bool would_cycle(int source, int target) const;

  // Every output reachable from some input or the bias via enabled genes.
  bool outputs_connected() const;

  std::size_t gene_count() const { return nodes.size() + conns.size(); }
};

// Minimal genome: every input and the bias connected to every output, no
// hidden nodes. Innovations are formula-based so independently constructed
// initial genomes share numbering: connection (source s, output o) carries
// innovation s*num_outputs + o.
Genome make_minimal_genome(int num_inputs, int num_outputs,
                           Activation output_activation);

// Minimal genome with uniform random weights and per-output activations
// sampled uniformly from the nine CPPN functions.
Genome random_genome(int num_inputs, int num_outputs, double weight_min,
                     double weight_max, Rng& rng);

// Feed-forward evaluation in topological order. Inputs pass through, the
// bias node emits 1.0, hidden/output nodes apply their activation to the
// weighted sum over enabled incoming connections (empty sum gives f(0)).
class CppnEvaluator {
 public:
  explicit CppnEvaluator(const Genome& genome);

  std::vector<double> evaluate(const std::vector<double>& inputs) const;

 private:
  const Genome* genome_;
  std::vector<int> order_;          // node indices in evaluation order
  std::vector<int> id_to_index_;    // dense map, -1 for unknown ids
  int max_id_ = -1;
};

// Plain-text serialization used by checkpoints and genome exports. Doubles
// round-trip via %.17g so resumed runs replay bit-identically. The sections
// are counted, so a genome can be read back mid-stream out of a larger
// document (checkpoints embed genomes this way).
std::string genome_to_text(const Genome& genome);
bool genome_from_text(const std::string& text, Genome& out, std::string* error = nullptr);
bool genome_from_stream(std::istream& in, Genome& out, std::string* error = nullptr);

// Maps grid index i in [0, dim) onto [-1, 1]; single-voxel axes map to -1.
double normalized_coordinate(int index, int dim);

}  // namespace voxbend
