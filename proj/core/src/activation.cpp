#include "voxbend/activation.hpp"

#include <cmath>

namespace voxbend {

double apply_activation(Activation kind, double x) {
  switch (kind) {
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::kSine:
      return std::sin(x);
    case Activation::kNegSine:
      return -std::sin(x);
    case Activation::kSquare:
      return x * x;
    case Activation::kNegSquare:
      return -(x * x);
    case Activation::kSqrtAbs:
      return std::sqrt(std::fabs(x));
    case Activation::kNegSqrtAbs:
      return -std::sqrt(std::fabs(x));
    case Activation::kAbs:
      return std::fabs(x);
    case Activation::kNegAbs:
      return -std::fabs(x);
    case Activation::kSelu:
      return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
    case Activation::kIdentity:
      return x;
  }
  return x;
}

const char* activation_name(Activation kind) {
  switch (kind) {
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kSine: return "sine";
    case Activation::kNegSine: return "neg-sine";
    case Activation::kSquare: return "square";
    case Activation::kNegSquare: return "neg-square";
    case Activation::kSqrtAbs: return "sqrt-abs";
    case Activation::kNegSqrtAbs: return "neg-sqrt-abs";
    case Activation::kAbs: return "abs";
    case Activation::kNegAbs: return "neg-abs";
    case Activation::kSelu: return "selu";
    case Activation::kIdentity: return "identity";
  }
  return "identity";
}

bool activation_from_name(const std::string& name, Activation& out) {
  for (int k = 0; k <= static_cast<int>(Activation::kIdentity); ++k) {
    Activation a = static_cast<Activation>(k);
    if (name == activation_name(a)) {
      out = a;
      return true;
    }
  }
  return false;
}

}  // namespace voxbend
