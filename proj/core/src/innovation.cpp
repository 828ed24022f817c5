#include "voxbend/innovation.hpp"

#include <sstream>

namespace voxbend {

int InnovationLedger::connection_innovation(int source, int target) {
  auto key = std::make_pair(source, target);
  auto it = conn_cache_.find(key);
  if (it != conn_cache_.end()) return it->second;
  int innov = next_innovation_++;
  conn_cache_.emplace(key, innov);
  return innov;
}

SplitRecord InnovationLedger::split_records(int connection_innovation) {
  auto it = split_cache_.find(connection_innovation);
  if (it != split_cache_.end()) return it->second;
  SplitRecord rec;
  rec.node_id = next_node_id_++;
  rec.in_innovation = next_innovation_++;
  rec.out_innovation = next_innovation_++;
  split_cache_.emplace(connection_innovation, rec);
  return rec;
}

void InnovationLedger::begin_generation() {
  conn_cache_.clear();
  split_cache_.clear();
}

std::string InnovationLedger::to_text() const {
  return "ledger " + std::to_string(next_innovation_) + " " +
         std::to_string(next_node_id_) + "\n";
}

bool InnovationLedger::from_text(const std::string& text, InnovationLedger& out,
                                 std::string* error) {
  std::istringstream in(text);
  std::string tag;
  int innov = 0;
  int node = 0;
  if (!(in >> tag >> innov >> node) || tag != "ledger") {
    if (error) *error = "malformed ledger text";
    return false;
  }
  out = InnovationLedger(innov, node);
  return true;
}

}  // namespace voxbend
