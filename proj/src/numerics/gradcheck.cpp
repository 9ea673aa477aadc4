#include "pragmarank/numerics/gradcheck.hpp"

#include <cmath>

namespace prk {

namespace {
double eval(const ScalarTapeFn& f, const Tensor& at) {
    Tape tape;
    NodeId x = tape.input(at);
    NodeId loss = f(tape, x);
    return tape.value(loss).item();
}
}  // namespace

double finite_diff_check(const ScalarTapeFn& f, const Tensor& at, double eps) {
    if (eps <= 0.0) throw ContractError("finite_diff_check: eps must be positive");

    Tape tape;
    NodeId x = tape.input(at);
    NodeId loss = f(tape, x);
    tape.backward(loss);
    const Tensor analytic = tape.grad(x);

    double worst = 0.0;
    Tensor probe = at;
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + eps;
        const double hi = eval(f, probe);
        probe[i] = orig - eps;
        const double lo = eval(f, probe);
        probe[i] = orig;
        const double numeric = (hi - lo) / (2.0 * eps);
        const double err = std::abs(numeric - analytic[i]) / std::max(1.0, std::abs(analytic[i]));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace prk
