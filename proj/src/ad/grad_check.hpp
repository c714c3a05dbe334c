#pragma once

#include <functional>
#include <vector>

#include "ad/tape.hpp"

namespace vdea::ad {

// Builds the scalar loss from leaf Vars bound to the given parameters, in the
// same order. Must be pure: same parameter values, same loss.
using LossBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

// Max over all parameter entries of
//   |analytic - central difference| / max(1, |analytic|)
// with central differences at step h.
double grad_check(const std::vector<Tensor*>& params, const LossBuilder& loss,
                  double h = 1e-5);

}  // namespace vdea::ad
