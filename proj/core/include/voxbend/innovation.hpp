#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

namespace voxbend {

// Split record: splitting connection `innovation` yields one hidden node and
// the two connections that replace it.
struct SplitRecord {
  int node_id = 0;
  int in_innovation = 0;
  int out_innovation = 0;
};

// Global numbering for structural mutations. Within one generation identical
// mutations (same connection endpoints, or same split connection) receive
// identical numbers; the caches reset at each generation boundary so later
// generations mint fresh numbers for repeats.
class InnovationLedger {
 public:
  InnovationLedger(int next_innovation, int next_node_id)
      : next_innovation_(next_innovation), next_node_id_(next_node_id) {}

  int connection_innovation(int source, int target);
  SplitRecord split_records(int connection_innovation);

  void begin_generation();

  int next_innovation() const { return next_innovation_; }
  int next_node_id() const { return next_node_id_; }

  std::string to_text() const;
  static bool from_text(const std::string& text, InnovationLedger& out,
                        std::string* error = nullptr);

 private:
  int next_innovation_;
  int next_node_id_;
  std::map<std::pair<int, int>, int> conn_cache_;
  std::map<int, SplitRecord> split_cache_;
};

}  // namespace voxbend
