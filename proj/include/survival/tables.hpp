#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "survival/model.hpp"

namespace survival {

/// Index layout for tables over (t, budget), t = 1..T+1.
///
/// Row t covers budgets [0, extent(t)] with extent(1) = lattice max and
/// extent(t+1) = extent(t) + max positive reward at step t. Every transition
/// from row t therefore lands inside row t+1, so each stored cell is exact
/// and every lattice budget is covered at every t.
class TableShape {
public:
    explicit TableShape(const SurvivalProblem& p);

    int horizon() const { return horizon_; }
    Units lattice_max() const { return lattice_max_; }
    Units extent(int t) const { return extents_.at(static_cast<std::size_t>(t)); }
    bool contains(int t, Units b) const {
        return t >= 1 && t <= horizon_ + 1 && b >= 0 && b <= extents_[static_cast<std::size_t>(t)];
    }
    std::size_t row_offset(int t) const { return offsets_[static_cast<std::size_t>(t)]; }
    std::size_t cell(int t, Units b) const;
    std::size_t total_cells() const { return offsets_.back(); }

    bool operator==(const TableShape&) const = default;

private:
    int horizon_;
    Units lattice_max_;
    std::vector<Units> extents_;       // index 1..T+1
    std::vector<std::size_t> offsets_;  // index 1..T+2
};

template <class T>
class TimeBudgetTable {
public:
    TimeBudgetTable(TableShape shape, T fill = T{}) : shape_(std::move(shape)), data_(shape_.total_cells(), fill) {}

    const TableShape& shape() const { return shape_; }
    T& operator()(int t, Units b) { return data_[shape_.cell(t, b)]; }
    const T& operator()(int t, Units b) const { return data_[shape_.cell(t, b)]; }

    std::span<const T> row(int t) const {
        return {data_.data() + shape_.row_offset(t), static_cast<std::size_t>(shape_.extent(t)) + 1};
    }

    bool operator==(const TimeBudgetTable&) const = default;

private:
    TableShape shape_;
    std::vector<T> data_;
};

using ValueTable = TimeBudgetTable<double>;

/// Deterministic time- and budget-dependent policy. Cells at budget 0 and
/// cells never assigned hold kNoAction.
class Policy {
public:
    explicit Policy(TableShape shape) : actions_(std::move(shape), kNoAction) {}

    /// Plays `a` at every live cell.
    static Policy constant(const SurvivalProblem& p, ActionIndex a);

    const TableShape& shape() const { return actions_.shape(); }
    /// kNoAction when the cell lies outside the table or was never assigned.
    ActionIndex at(int t, Units b) const {
        return shape().contains(t, b) ? actions_(t, b) : kNoAction;
    }
    void set(int t, Units b, ActionIndex a) { actions_(t, b) = a; }

    bool operator==(const Policy&) const = default;

private:
    TimeBudgetTable<ActionIndex> actions_;
};

}  // namespace survival
