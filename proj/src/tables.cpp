#include "survival/tables.hpp"

#include <string>

namespace survival {

TableShape::TableShape(const SurvivalProblem& p)
    : horizon_(p.horizon()), lattice_max_(build_budget_lattice(p).max_budget()) {
    const auto rows = static_cast<std::size_t>(horizon_) + 2;
    extents_.assign(rows, 0);
    offsets_.assign(rows + 1, 0);
    extents_[1] = lattice_max_;
    for (int t = 1; t <= horizon_; ++t) {
        extents_[static_cast<std::size_t>(t) + 1] = extents_[static_cast<std::size_t>(t)] + p.max_positive_reward_at(t);
    }
    for (std::size_t t = 1; t < rows; ++t) {
        offsets_[t + 1] = offsets_[t] + static_cast<std::size_t>(extents_[t]) + 1;
    }
}

std::size_t TableShape::cell(int t, Units b) const {
    if (!contains(t, b)) {
        throw std::out_of_range("cell (t=" + std::to_string(t) + ", b=" + std::to_string(b) +
                                ") is outside the table");
    }
    return offsets_[static_cast<std::size_t>(t)] + static_cast<std::size_t>(b);
}

Policy Policy::constant(const SurvivalProblem& p, ActionIndex a) {
    p.action(a);
    Policy policy{TableShape(p)};
    const auto& shape = policy.shape();
    for (int t = 1; t <= shape.horizon(); ++t) {
        for (Units b = 1; b <= shape.extent(t); ++b) policy.set(t, b, a);
    }
    return policy;
}

}  // namespace survival
