#include "voxbend/hyperneat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxbend/csv.hpp"

namespace voxbend {

bool SubstrateSpec::valid(std::string* why) const {
  auto fail = [&](const std::string& what) {
    if (why) *why = what;
    return false;
  };
  if (layers.size() < 2) return fail("substrate needs input and output layers");
  if (layers.front().coords.size() != 3) return fail("input layer must hold 3 neurons");
  if (layers.back().coords.size() != 2) return fail("output layer must hold 2 neurons");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& coords = layers[l].coords;
    if (coords.empty()) return fail("layer " + std::to_string(l) + " is empty");
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (std::fabs(coords[i][0]) > 1.0 || std::fabs(coords[i][1]) > 1.0)
        return fail("coordinates must lie in [-1,1]^2");
      for (std::size_t j = i + 1; j < coords.size(); ++j)
        if (coords[i] == coords[j])
          return fail("duplicate coordinate in layer " + std::to_string(l));
    }
  }
  return true;
}

SubstrateSpec SubstrateSpec::make_default(int hidden_layers, int width) {
  SubstrateSpec spec;
  SubstrateLayer inputs;
  for (int i = 0; i < 3; ++i)
    inputs.coords.push_back({normalized_coordinate(i, 3), -1.0});
  spec.layers.push_back(std::move(inputs));
  for (int r = 1; r <= hidden_layers; ++r) {
    SubstrateLayer row;
    double y = -1.0 + 2.0 * r / (hidden_layers + 1);
    for (int i = 0; i < width; ++i)
      row.coords.push_back({normalized_coordinate(i, width), y});
    spec.layers.push_back(std::move(row));
  }
  SubstrateLayer outputs;
  for (int i = 0; i < 2; ++i)
    outputs.coords.push_back({normalized_coordinate(i, 2), 1.0});
  spec.layers.push_back(std::move(outputs));
  return spec;
}

double selu(double x) {
  if (x > 0.0) return kSeluLambda * x;
  return kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
}

double threshold_scale(double raw) {
  double mag = std::fabs(raw);
  if (mag <= 0.2) return 0.0;
  double scaled = 3.0 * ((std::min(mag, 1.0) - 0.2) / 0.8);
  return raw < 0.0 ? -scaled : scaled;
}

SubstrateNetwork build_network(const Genome& cppn, const SubstrateSpec& spec) {
  CppnEvaluator eval(cppn);
  auto paint = [&](double xm, double ym, double xh, double yh) {
    return eval.evaluate({xm, ym, xh, yh})[0];
  };

  SubstrateNetwork net;
  for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
    const auto& from = spec.layers[l].coords;
    const auto& to = spec.layers[l + 1].coords;
    SubstrateNetwork::LayerLink link;
    link.from_size = static_cast<int>(from.size());
    link.to_size = static_cast<int>(to.size());
    link.weight.assign(from.size() * to.size(), 0.0);
    link.present.assign(from.size() * to.size(), 0);
    for (std::size_t t = 0; t < to.size(); ++t)
      for (std::size_t f = 0; f < from.size(); ++f) {
        double raw = paint(from[f][0], from[f][1], to[t][0], to[t][1]);
        double w = threshold_scale(raw);
        link.weight[t * from.size() + f] = w;
        link.present[t * from.size() + f] = std::fabs(raw) > 0.2 ? 1 : 0;
      }
    net.links.push_back(std::move(link));
  }
  for (std::size_t l = 1; l < spec.layers.size(); ++l) {
    const auto& coords = spec.layers[l].coords;
    std::vector<double> bias(coords.size(), 0.0);
    std::vector<std::uint8_t> present(coords.size(), 0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      double raw = paint(coords[i][0], coords[i][1], 0.0, 0.0);
      bias[i] = threshold_scale(raw);
      present[i] = std::fabs(raw) > 0.2 ? 1 : 0;
    }
    net.bias.push_back(std::move(bias));
    net.bias_present.push_back(std::move(present));
  }
  return net;
}

std::array<double, 2> query_substrate(const SubstrateNetwork& net,
                                      const std::array<double, 3>& coords) {
  std::vector<double> value(coords.begin(), coords.end());
  for (std::size_t l = 0; l < net.links.size(); ++l) {
    const auto& link = net.links[l];
    std::vector<double> next(static_cast<std::size_t>(link.to_size), 0.0);
    bool last = l + 1 == net.links.size();
    for (int t = 0; t < link.to_size; ++t) {
      double sum = 0.0;
      if (net.bias_present[l][static_cast<std::size_t>(t)])
        sum += net.bias[l][static_cast<std::size_t>(t)];
      for (int f = 0; f < link.from_size; ++f) {
        std::size_t at = static_cast<std::size_t>(t * link.from_size + f);
        if (link.present[at]) sum += link.weight[at] * value[static_cast<std::size_t>(f)];
      }
      next[static_cast<std::size_t>(t)] = last ? sum : selu(sum);
    }
    value = std::move(next);
  }
  return {value.size() > 0 ? value[0] : 0.0, value.size() > 1 ? value[1] : 0.0};
}

std::string substrate_to_text(const SubstrateNetwork& net) {
  std::string out = "substrate " + std::to_string(net.links.size()) + "\n";
  for (std::size_t l = 0; l < net.links.size(); ++l) {
    const auto& link = net.links[l];
    out += "link " + std::to_string(l) + " " + std::to_string(link.from_size) + " " +
           std::to_string(link.to_size) + "\n";
    for (int t = 0; t < link.to_size; ++t)
      for (int f = 0; f < link.from_size; ++f) {
        std::size_t at = static_cast<std::size_t>(t * link.from_size + f);
        if (link.present[at])
          out += "w " + std::to_string(f) + " " + std::to_string(t) + " " +
                 format_double(link.weight[at]) + "\n";
      }
  }
  for (std::size_t l = 0; l < net.bias.size(); ++l)
    for (std::size_t i = 0; i < net.bias[l].size(); ++i)
      if (net.bias_present[l][i])
        out += "bias " + std::to_string(l) + " " + std::to_string(i) + " " +
               format_double(net.bias[l][i]) + "\n";
  return out;
}

}  // namespace voxbend
