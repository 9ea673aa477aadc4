#pragma once

#include <functional>

#include "pragmarank/numerics/tape.hpp"

namespace prk {

// A scalar-valued tensor function expressed as tape construction: given a
// fresh tape and the node holding the input, returns the scalar loss node.
using ScalarTapeFn = std::function<NodeId(Tape&, NodeId)>;

// Compares the analytic gradient (one backward pass) against central finite
// differences at `at`. Returns max over elements of |Δ| / max(1, |g|).
double finite_diff_check(const ScalarTapeFn& f, const Tensor& at, double eps);

}  // namespace prk
