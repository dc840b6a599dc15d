#include "stockflow/solver.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <queue>

#include "stockflow/simplex.hpp"

namespace stockflow::milp {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class S>
bool integral_value(const S& v) {
  if constexpr (std::is_same_v<S, double>) {
    return std::abs(v - std::round(v)) <= 1e-6;
  } else if constexpr (std::is_same_v<S, Rat64>) {
    return v.is_integer();
  } else {
    return denominator(v) == 1;
  }
}

template <class S>
std::int64_t round64(const S& v) {
  if constexpr (std::is_same_v<S, double>) {
    return (std::int64_t)std::llround(v);
  } else if constexpr (std::is_same_v<S, Rat64>) {
    return v.round_nearest();
  } else {
    return ScalarOps<S>::floor64(v + BigRat(1, 2));
  }
}

template <class S>
Rat64 to_rat_exact(const S& v) {
  if constexpr (std::is_same_v<S, Rat64>) {
    return v;
  } else if constexpr (std::is_same_v<S, BigRat>) {
    return from_big(v);
  } else {
    static_assert(!std::is_same_v<S, double>, "no exact conversion from double");
    return Rat64(0);
  }
}

// Advisory-precision conversion for floating-mode bound reporting.
Rat64 rat_approx(double v) {
  if (v > 9.0e17 || v < -9.0e17) return Rat64(v > 0 ? (std::int64_t)9e17 : -(std::int64_t)9e17);
  if (std::abs(v) > 9.0e9) return Rat64((std::int64_t)std::llround(v));
  return Rat64::make((std::int64_t)std::llround(v * 1e9), 1000000000);
}

// One branching decision; full node bounds are rebuilt by walking the chain
// back to the root, so nodes stay tiny and the tableau can be shared.
struct NodeRec {
  std::int32_t parent;
  std::int32_t var;
  std::int64_t value;
  bool is_upper;
};

// Exact LP used in floating mode to turn an integral-looking relaxation point
// into a certified incumbent: integer variables get fixed to their rounded
// values and the continuous remainder is re-solved in rational arithmetic.
class CompletionSolver {
 public:
  explicit CompletionSolver(const Model& mdl) : mdl_(mdl) {}

  std::optional<std::vector<Rat64>> complete(const std::vector<std::int64_t>& fixed) {
    std::vector<Bound> bl = mdl_.lb, bu = mdl_.ub;
    int k = 0;
    for (int j = 0; j < mdl_.num_vars(); ++j) {
      if (!integral_kind(mdl_.var_kinds[(size_t)j])) continue;
      Bound b = Bound::at(Rat64(fixed[(size_t)k++]));
      bl[(size_t)j] = b;
      bu[(size_t)j] = b;
    }
    if (!tab_) tab_.emplace(mdl_);
    tab_->rebind(bl, bu);
    LpStatus st = tab_->dual_ready() ? tab_->reoptimize() : tab_->solve_cold();
    if (st != LpStatus::Optimal) return std::nullopt;
    return tab_->values();
  }

  long iterations() const { return tab_ ? tab_->iterations() : 0; }

 private:
  const Model& mdl_;
  std::optional<Tableau<Rat64>> tab_;
};

template <class S>
class BranchAndBound {
 public:
  BranchAndBound(const Model& mdl, const SolveOptions& opt, Clock::time_point t0)
      : mdl_(mdl), opt_(opt), t0_(t0), tab_(mdl) {
    for (int j = 0; j < mdl.num_vars(); ++j)
      if (integral_kind(mdl.var_kinds[(size_t)j])) int_vars_.push_back(j);
    if constexpr (!ScalarOps<S>::exact) completion_.emplace(mdl);
  }

  Solution run() {
    seed_from_hints();
    Solution out;

    LpStatus root = tab_.solve_cold();
    if (root == LpStatus::Unbounded) {
      out.status = SolveStatus::Unbounded;
      finish_stats(out);
      return out;
    }
    if (root == LpStatus::Infeasible) {
      out.status = SolveStatus::Infeasible;
      finish_stats(out);
      return out;
    }

    // Heap of open nodes by parent LP bound; -1 is the root sentinel.
    process_solved_node(-1, tab_.objective());
    bool node_limited = false, time_limited = false;
    while (!heap_.empty()) {
      if (nodes_processed_ >= opt_.node_limit) { node_limited = true; break; }
      if (elapsed_s(t0_) > opt_.time_limit_s) { time_limited = true; break; }
      HeapEntry top = heap_.top();
      heap_.pop();
      if (pruned_by_bound(top.bound)) continue;  // heap is bound-ordered: the rest stay open but pruned too
      ++nodes_processed_;
      rebuild_bounds(top.node);
      if (!bounds_consistent()) continue;
      tab_.rebind(scratch_lb_, scratch_ub_);
      if (tab_.reoptimize() == LpStatus::Infeasible) continue;
      S z = tab_.objective();
      if (pruned_by_bound(z)) continue;
      process_solved_node(top.node, z);
    }

    if (node_limited || time_limited) {
      out.status = node_limited ? SolveStatus::NodeLimit : SolveStatus::TimeLimit;
      attach_incumbent(out);
      if (!heap_.empty()) {
        if constexpr (ScalarOps<S>::exact) {
          BigRat open = to_objective_big(heap_.top().bound);
          out.best_bound = incumbent_ && *incumbent_obj_big_ < open ? *incumbent_obj_big_ : open;
        } else {
          double open = heap_.top().bound + ScalarOps<S>::from_rat(mdl_.obj_const);
          if (incumbent_ && incumbent_obj_dbl_ < open) open = incumbent_obj_dbl_;
          out.best_bound = to_big(rat_approx(open));
        }
      } else if (incumbent_) {
        out.best_bound = out.objective;
      }
    } else if (incumbent_) {
      out.status = SolveStatus::Optimal;
      attach_incumbent(out);
      out.best_bound = out.objective;
    } else {
      out.status = SolveStatus::Infeasible;
    }
    finish_stats(out);
    return out;
  }

 private:
  struct HeapEntry {
    S bound;
    std::int64_t seq;
    std::int32_t node;
  };
  struct HeapCmp {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
      if (a.bound != b.bound) return b.bound < a.bound;  // min-heap on bound
      return b.seq < a.seq;                              // FIFO tie-break
    }
  };

  void seed_from_hints() {
    for (const auto& h : opt_.hints) {
      if ((int)h.size() != mdl_.num_vars())
        throw std::invalid_argument("solver hint has wrong length");
      if (!mdl_.check_point(h).empty()) continue;
      BigRat z = mdl_.objective_of(h);
      if (!incumbent_ || z < *incumbent_obj_big_) set_incumbent(h, z);
    }
  }

  void set_incumbent(std::vector<Rat64> vals, BigRat z) {
    incumbent_ = std::move(vals);
    incumbent_obj_big_ = std::move(z);
    if constexpr (!ScalarOps<S>::exact)
      incumbent_obj_dbl_ = stockflow::to_double(*incumbent_obj_big_);
  }

  // z is a node LP objective, without the model constant.
  BigRat to_objective_big(const S& z) {
    if constexpr (ScalarOps<S>::exact) {
      if constexpr (std::is_same_v<S, Rat64>)
        return to_big(z) + to_big(mdl_.obj_const);
      else
        return z + to_big(mdl_.obj_const);
    } else {
      (void)z;
      throw SolverError("to_objective_big in floating mode");
    }
  }

  bool pruned_by_bound(const S& z) {
    if (!incumbent_) return false;
    if constexpr (ScalarOps<S>::exact) {
      return !(to_objective_big(z) < *incumbent_obj_big_);
    } else {
      return z + ScalarOps<S>::from_rat(mdl_.obj_const) >= incumbent_obj_dbl_ - 1e-9;
    }
  }

  void rebuild_bounds(std::int32_t node) {
    scratch_lb_ = mdl_.lb;
    scratch_ub_ = mdl_.ub;
    for (std::int32_t cur = node; cur >= 0; cur = nodes_[(size_t)cur].parent) {
      const NodeRec& rec = nodes_[(size_t)cur];
      Rat64 v = Rat64(rec.value);
      if (rec.is_upper) {
        Bound& b = scratch_ub_[(size_t)rec.var];
        if (!b.finite || v < b.value) b = Bound::at(v);
      } else {
        Bound& b = scratch_lb_[(size_t)rec.var];
        if (!b.finite || v > b.value) b = Bound::at(v);
      }
    }
  }

  bool bounds_consistent() const {
    for (size_t j = 0; j < scratch_lb_.size(); ++j) {
      if (scratch_lb_[j].finite && scratch_ub_[j].finite &&
          scratch_ub_[j].value < scratch_lb_[j].value)
        return false;
    }
    return true;
  }

  // Node LP solved to optimality at bound z: record an incumbent if the point
  // is integral, otherwise branch on the most fractional integer variable.
  void process_solved_node(std::int32_t node, const S& z) {
    int branch_var = -1;
    double branch_score = -1;
    for (int v : int_vars_) {
      S val = tab_.value(v);
      if (integral_value(val)) continue;
      double f = ScalarOps<S>::to_double(val);
      double fr = f - std::floor(f);
      double score = std::min(fr, 1.0 - fr);
      if (score > branch_score) {
        branch_score = score;
        branch_var = v;
      }
    }
    if (branch_var < 0) {
      record_candidate();
      return;
    }
    std::int64_t k = ScalarOps<S>::floor64(tab_.value(branch_var));
    push_child(node, branch_var, k, true, z);
    push_child(node, branch_var, k + 1, false, z);
  }

  void push_child(std::int32_t parent, int var, std::int64_t value, bool is_upper, const S& bound) {
    nodes_.push_back({parent, (std::int32_t)var, value, is_upper});
    heap_.push({bound, next_seq_++, (std::int32_t)(nodes_.size() - 1)});
  }

  void record_candidate() {
    if constexpr (ScalarOps<S>::exact) {
      std::vector<Rat64> vals((size_t)mdl_.num_vars());
      for (int j = 0; j < mdl_.num_vars(); ++j) vals[(size_t)j] = to_rat_exact(tab_.value(j));
      BigRat z = mdl_.objective_of(vals);
      if (!incumbent_ || z < *incumbent_obj_big_) set_incumbent(std::move(vals), std::move(z));
    } else {
      std::vector<std::int64_t> fixed;
      fixed.reserve(int_vars_.size());
      for (int v : int_vars_) fixed.push_back(round64(tab_.value(v)));
      auto completed = completion_->complete(fixed);
      if (!completed) return;  // relaxation noise: exact model disagrees, drop
      BigRat z = mdl_.objective_of(*completed);
      if (!incumbent_ || z < *incumbent_obj_big_) set_incumbent(std::move(*completed), std::move(z));
    }
  }

  void attach_incumbent(Solution& out) {
    if (!incumbent_) return;
    out.has_incumbent = true;
    out.values = *incumbent_;
    out.objective = *incumbent_obj_big_;
  }

  void finish_stats(Solution& out) {
    out.stats.nodes = nodes_processed_;
    out.stats.pivots = tab_.iterations() + (completion_ ? completion_->iterations() : 0);
    out.stats.seconds = elapsed_s(t0_);
  }

  const Model& mdl_;
  const SolveOptions& opt_;
  Clock::time_point t0_;
  Tableau<S> tab_;
  std::vector<int> int_vars_;
  std::vector<NodeRec> nodes_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCmp> heap_;
  std::int64_t next_seq_ = 0;
  std::int64_t nodes_processed_ = 0;
  std::vector<Bound> scratch_lb_, scratch_ub_;
  std::optional<std::vector<Rat64>> incumbent_;
  std::optional<BigRat> incumbent_obj_big_;
  double incumbent_obj_dbl_ = 0;
  std::optional<CompletionSolver> completion_;
};

template <class S>
Solution run_mode(const Model& mdl, const SolveOptions& opt, Clock::time_point t0) {
  BranchAndBound<S> search(mdl, opt, t0);
  return search.run();
}

}  // namespace

Solution solve(const Model& model, const SolveOptions& options) {
  Clock::time_point t0 = Clock::now();
  if (options.mode == NumericMode::Floating) {
    try {
      return run_mode<double>(model, options, t0);
    } catch (const RatOverflow&) {
    } catch (const SolverError&) {
    }
  }
  try {
    return run_mode<Rat64>(model, options, t0);
  } catch (const RatOverflow&) {
  } catch (const SolverError&) {
  }
  Solution sol = run_mode<BigRat>(model, options, t0);
  sol.stats.exact_fallback = true;
  return sol;
}

}  // namespace stockflow::milp
