#pragma once

#include <array>
#include <vector>

#include "voxbend/cppn.hpp"

namespace voxbend {

// Layered substrate: layer 0 holds the 3 input neurons, the last layer the
// 2 output neurons (v, m); hidden layout is configurable. Coordinates live
// in [-1,1]^2.
struct SubstrateLayer {
  std::vector<std::array<double, 2>> coords;
};

struct SubstrateSpec {
  std::vector<SubstrateLayer> layers;

  bool valid(std::string* why = nullptr) const;

  // Inputs on y=-1, outputs on y=+1, `hidden_layers` evenly spaced rows of
  // `width` neurons between them, each row spread evenly over x in [-1,1].
  static SubstrateSpec make_default(int hidden_layers = 2, int width = 5);
};

// Dense adjacent-layer weight tables painted by a CPPN; absent entries are
// the ones the 0.2 threshold removed. Hidden activation SELU, outputs
// identity.
struct SubstrateNetwork {
  struct LayerLink {
    int from_size = 0;
    int to_size = 0;
    std::vector<double> weight;          // [to * from_size + from]
    std::vector<std::uint8_t> present;
  };
  std::vector<LayerLink> links;                       // one per adjacent pair
  std::vector<std::vector<double>> bias;              // per non-input layer
  std::vector<std::vector<std::uint8_t>> bias_present;
};

double selu(double x);

// Threshold + normalization applied to raw CPPN outputs: 0 when
// |raw| <= 0.2 (strict presence rule), else sign(raw)*3*((min(|raw|,1)-0.2)/0.8),
// mapping (0.2, 1] onto (0, 3] with |result| <= 3 for any input.
double threshold_scale(double raw);

// Weight between m (layer k) and h (layer k+1) from CPPN(x_m,y_m,x_h,y_h);
// bias of non-input neuron m from CPPN(x_m,y_m,0,0); both thresholded and
// scaled by threshold_scale. The CPPN takes 4 coordinate inputs plus its
// constant bias input and has a single output.
SubstrateNetwork build_network(const Genome& cppn, const SubstrateSpec& spec);

// Feed-forward pass; `coords` feed the 3 input neurons. Absent connections
// and biases contribute nothing.
std::array<double, 2> query_substrate(const SubstrateNetwork& net,
                                      const std::array<double, 3>& coords);

std::string substrate_to_text(const SubstrateNetwork& net);

}  // namespace voxbend
