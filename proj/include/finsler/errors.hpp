#pragma once

#include <stdexcept>

namespace finsler {

struct DegenerateMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutsideDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonIsotropic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotLinear : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotRiemannian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotLinearFactor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotHamel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PositivityViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RejectionOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace finsler
