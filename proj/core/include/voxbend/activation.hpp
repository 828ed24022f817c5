#pragma once

#include <cstdint>
#include <string>

namespace voxbend {

// Activation kinds available to pattern-network hidden/output nodes. The
// negative variants are distinct kinds (not a separate sign flag) so mutation
// can toggle between them like any other swap.
enum class Activation : std::uint8_t {
  kSigmoid = 0,
  kSine,
  kNegSine,
  kSquare,
  kNegSquare,
  kSqrtAbs,
  kNegSqrtAbs,
  kAbs,
  kNegAbs,
  // Only used by substrate hidden layers, never sampled for genome nodes.
  kSelu,
  kIdentity,
};

inline constexpr int kGenomeActivationCount = 9;  // kSigmoid..kNegAbs

inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

double apply_activation(Activation kind, double x);

const char* activation_name(Activation kind);
bool activation_from_name(const std::string& name, Activation& out);

}  // namespace voxbend
