#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "stockflow/milp.hpp"

namespace stockflow::milp {

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static constexpr bool exact = false;
  static double from_rat(const Rat64& r) { return r.to_double(); }
  static double from_int(std::int64_t v) { return (double)v; }
  static double to_double(double v) { return v; }
  static std::int64_t floor64(double v) {
    double f = std::floor(v);
    return (std::int64_t)f;
  }
  static bool is_zero(double v) { return v == 0.0; }
};

template <>
struct ScalarOps<Rat64> {
  static constexpr bool exact = true;
  static Rat64 from_rat(const Rat64& r) { return r; }
  static Rat64 from_int(std::int64_t v) { return Rat64(v); }
  static double to_double(const Rat64& v) { return v.to_double(); }
  static std::int64_t floor64(const Rat64& v) { return v.floor(); }
  static bool is_zero(const Rat64& v) { return v.is_zero(); }
};

template <>
struct ScalarOps<BigRat> {
  static constexpr bool exact = true;
  static BigRat from_rat(const Rat64& r) { return to_big(r); }
  static BigRat from_int(std::int64_t v) { return BigRat(v); }
  static double to_double(const BigRat& v) { return stockflow::to_double(v); }
  static std::int64_t floor64(const BigRat& v) {
    using boost::multiprecision::cpp_int;
    cpp_int q = numerator(v) / denominator(v);
    if (v < 0 && q * denominator(v) != numerator(v)) --q;
    return q.convert_to<std::int64_t>();
  }
  static bool is_zero(const BigRat& v) { return v.is_zero(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Dense bounded-variable simplex over scalar S (double, Rat64 or BigRat).
//
// Columns 0..n-1 are the model's structural variables; column n+i is the
// logical variable of row i, so A = [A_struct | I] and the tableau invariant
// T = B^-1 A holds for the current basis B. Logical columns of T therefore
// carry B^-1 itself, which makes basic values cheap to rebuild after a bound
// change: the basis stays valid because T never depends on bounds.
//
// Intended use by branch and bound: solve_cold() once at the root, then
// rebind() + reoptimize() per node. reoptimize() runs the dual method only;
// that suffices because reduced costs are untouched by bound changes, so a
// previously optimal (or dual-feasible) basis stays dual feasible.
template <class S>
class Tableau {
 public:
  explicit Tableau(const Model& model) : model_(&model) {
    m_ = model.num_rows();
    n_ = model.num_vars();
    N_ = n_ + m_;
    tab_.assign((size_t)m_ * N_, S{});
    for (int i = 0; i < m_; ++i) {
      const auto& row = model.rows[(size_t)i];
      for (auto k = row.begin; k != row.end; ++k) {
        const auto& t = model.terms[k];
        at(i, t.var) += ScalarOps<S>::from_rat(t.coef);
      }
      at(i, n_ + i) = ScalarOps<S>::from_int(1);
    }
    rhs_.resize((size_t)m_);
    lo_.resize((size_t)N_);
    up_.resize((size_t)N_);
    for (int i = 0; i < m_; ++i) {
      const auto& row = model.rows[(size_t)i];
      rhs_[(size_t)i] = ScalarOps<S>::from_rat(row.rhs);
      // Logical w_i = rhs - a.x:  <= rows need w >= 0, >= rows w <= 0, = rows w = 0.
      OptB lo, up;
      if (row.sense != Sense::Ge) lo = {true, S{}};
      if (row.sense != Sense::Le) up = {true, S{}};
      lo_[(size_t)(n_ + i)] = lo;
      up_[(size_t)(n_ + i)] = up;
    }
    cost_.assign((size_t)N_, S{});
    for (int j = 0; j < n_; ++j) cost_[(size_t)j] = ScalarOps<S>::from_rat(model.obj[(size_t)j]);
    set_structural_bounds_from_model();
    reset_basis();
    if constexpr (!ScalarOps<S>::exact) {
      feas_eps_ = 1e-7;
      d_eps_ = 1e-9;
      pivot_eps_ = 1e-9;
    }
  }

  int num_structural() const { return n_; }
  long iterations() const { return iters_; }

  // Replaces the structural bounds (logical bounds never change) and rebuilds
  // basic values. Nonbasic variables are re-pinned to their current side.
  void rebind(const std::vector<Bound>& lb, const std::vector<Bound>& ub) {
    for (int j = 0; j < n_; ++j) {
      lo_[(size_t)j] = conv(lb[(size_t)j]);
      up_[(size_t)j] = conv(ub[(size_t)j]);
    }
    repin_and_recompute();
  }

  void set_structural_bounds_from_model() {
    for (int j = 0; j < n_; ++j) {
      lo_[(size_t)j] = conv(model_->lb[(size_t)j]);
      up_[(size_t)j] = conv(model_->ub[(size_t)j]);
    }
  }

  // Full cold solve from the all-logical basis: feasibility pass with a zero
  // objective (dual method, trivially dual feasible), then the primal method.
  LpStatus solve_cold() {
    reset_basis();
    dual_ready_ = false;
    dj_.assign((size_t)N_, S{});
    LpStatus st = dual_loop();
    if (st != LpStatus::Optimal) return st;  // infeasible with zero costs
    compute_dj();
    st = primal_loop();
    if (st != LpStatus::Unbounded) dual_ready_ = true;
    return st;
  }

  // Dual reoptimization after rebind(); requires dual_ready(): reduced costs
  // reflect the true objective and are feasible for the current statuses,
  // which any finished solve_cold()/reoptimize() on this tableau guarantees.
  LpStatus reoptimize() { return dual_loop(); }

  // False when the tableau never reached a dual-feasible state under the real
  // objective (cold solve found infeasibility during its zero-cost pass), in
  // which case reoptimize() would ignore the objective.
  bool dual_ready() const { return dual_ready_; }

  // Value of structural variable j in the current basis.
  S value(int j) const { return rowof_[(size_t)j] >= 0 ? beta_[(size_t)rowof_[(size_t)j]] : xn_[(size_t)j]; }

  S objective() const {
    S z{};
    for (int j = 0; j < n_; ++j)
      if (!ScalarOps<S>::is_zero(cost_[(size_t)j])) z += cost_[(size_t)j] * value(j);
    return z;
  }

  std::vector<S> values() const {
    std::vector<S> v((size_t)n_);
    for (int j = 0; j < n_; ++j) v[(size_t)j] = value(j);
    return v;
  }

 private:
  struct OptB {
    bool finite = false;
    S value{};
  };
  enum class St : unsigned char { Basic, AtLower, AtUpper, Free };

  OptB conv(const Bound& b) const {
    OptB o;
    o.finite = b.finite;
    if (b.finite) o.value = ScalarOps<S>::from_rat(b.value);
    return o;
  }

  S& at(int i, int j) { return tab_[(size_t)i * N_ + j]; }
  const S& at(int i, int j) const { return tab_[(size_t)i * N_ + j]; }

  bool fixed(int j) const {
    return lo_[(size_t)j].finite && up_[(size_t)j].finite &&
           lo_[(size_t)j].value == up_[(size_t)j].value;
  }

  void reset_basis() {
    basic_.resize((size_t)m_);
    rowof_.assign((size_t)N_, -1);
    stat_.assign((size_t)N_, St::AtLower);
    xn_.assign((size_t)N_, S{});
    for (int j = 0; j < N_; ++j) pin_nonbasic(j);
    for (int i = 0; i < m_; ++i) {
      basic_[(size_t)i] = n_ + i;
      rowof_[(size_t)(n_ + i)] = i;
      stat_[(size_t)(n_ + i)] = St::Basic;
    }
    recompute_beta();
    bland_ = false;
    run_iters_ = 0;
  }

  void pin_nonbasic(int j) {
    if (lo_[(size_t)j].finite) {
      stat_[(size_t)j] = St::AtLower;
      xn_[(size_t)j] = lo_[(size_t)j].value;
    } else if (up_[(size_t)j].finite) {
      stat_[(size_t)j] = St::AtUpper;
      xn_[(size_t)j] = up_[(size_t)j].value;
    } else {
      stat_[(size_t)j] = St::Free;
      xn_[(size_t)j] = S{};
    }
  }

  void repin_and_recompute() {
    for (int j = 0; j < n_; ++j) {
      if (stat_[(size_t)j] == St::Basic) continue;
      switch (stat_[(size_t)j]) {
        case St::AtLower:
          if (lo_[(size_t)j].finite)
            xn_[(size_t)j] = lo_[(size_t)j].value;
          else
            pin_nonbasic(j);
          break;
        case St::AtUpper:
          if (up_[(size_t)j].finite)
            xn_[(size_t)j] = up_[(size_t)j].value;
          else
            pin_nonbasic(j);
          break;
        default:
          break;
      }
    }
    recompute_beta();
    bland_ = false;
    run_iters_ = 0;
  }

  void recompute_beta() {
    beta_.assign((size_t)m_, S{});
    for (int r = 0; r < m_; ++r) {
      S v{};
      const S* row = &tab_[(size_t)r * N_];
      for (int i = 0; i < m_; ++i)
        if (!ScalarOps<S>::is_zero(row[n_ + i]) && !ScalarOps<S>::is_zero(rhs_[(size_t)i]))
          v += row[n_ + i] * rhs_[(size_t)i];
      for (int j = 0; j < N_; ++j)
        if (stat_[(size_t)j] != St::Basic && !ScalarOps<S>::is_zero(xn_[(size_t)j]) &&
            !ScalarOps<S>::is_zero(row[j]))
          v -= row[j] * xn_[(size_t)j];
      beta_[(size_t)r] = v;
    }
  }

  void compute_dj() {
    dj_ = cost_;
    for (int r = 0; r < m_; ++r) {
      const S& cb = cost_[(size_t)basic_[(size_t)r]];
      if (ScalarOps<S>::is_zero(cb)) continue;
      const S* row = &tab_[(size_t)r * N_];
      for (int j = 0; j < N_; ++j)
        if (!ScalarOps<S>::is_zero(row[j])) dj_[(size_t)j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) dj_[(size_t)basic_[(size_t)i]] = S{};
  }

  // Shared pivot: entering column e replaces basic_[r]; the entering variable
  // moves by delta, the leaving variable lands on `target` with status `st`.
  void pivot(int r, int e, const S& delta, const S& target, St st) {
    S piv = at(r, e);
    S entering_val = xn_[(size_t)e] + delta;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const S& a = at(i, e);
      if (!ScalarOps<S>::is_zero(a) && !ScalarOps<S>::is_zero(delta))
        beta_[(size_t)i] -= a * delta;
    }
    int q = basic_[(size_t)r];
    stat_[(size_t)q] = st;
    xn_[(size_t)q] = target;
    rowof_[(size_t)q] = -1;
    basic_[(size_t)r] = e;
    rowof_[(size_t)e] = r;
    stat_[(size_t)e] = St::Basic;
    beta_[(size_t)r] = entering_val;

    S* prow = &tab_[(size_t)r * N_];
    if (!(piv == ScalarOps<S>::from_int(1))) {
      for (int j = 0; j < N_; ++j)
        if (!ScalarOps<S>::is_zero(prow[j])) prow[j] /= piv;
    }
    prow[e] = ScalarOps<S>::from_int(1);
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      S f = at(i, e);
      if (ScalarOps<S>::is_zero(f)) continue;
      S* irow = &tab_[(size_t)i * N_];
      for (int j = 0; j < N_; ++j)
        if (!ScalarOps<S>::is_zero(prow[j])) irow[j] -= f * prow[j];
      irow[e] = S{};
    }
    const S de = dj_[(size_t)e];
    if (!ScalarOps<S>::is_zero(de)) {
      for (int j = 0; j < N_; ++j)
        if (!ScalarOps<S>::is_zero(prow[j])) dj_[(size_t)j] -= de * prow[j];
    }
    dj_[(size_t)e] = S{};
    ++iters_;
    if (++run_iters_ > bland_after()) bland_ = true;
    if (run_iters_ > hard_cap()) throw SolverError("simplex iteration cap exceeded");
  }

  long bland_after() const { return 2000 + 20L * N_; }
  long hard_cap() const { return 40000 + 400L * N_; }

  // Dual method: drives out primal bound violations while keeping reduced
  // costs feasible. Returns Optimal (primal feasible) or Infeasible.
  LpStatus dual_loop() {
    for (;;) {
      int r = -1;
      bool to_upper = false;
      S best_viol{};
      for (int i = 0; i < m_; ++i) {
        int b = basic_[(size_t)i];
        S viol{};
        bool up_side = false;
        if (lo_[(size_t)b].finite && beta_[(size_t)i] < lo_[(size_t)b].value - feas_eps_) {
          viol = lo_[(size_t)b].value - beta_[(size_t)i];
        } else if (up_[(size_t)b].finite && beta_[(size_t)i] > up_[(size_t)b].value + feas_eps_) {
          viol = beta_[(size_t)i] - up_[(size_t)b].value;
          up_side = true;
        } else {
          continue;
        }
        if (bland_) {
          if (r < 0 || b < basic_[(size_t)r]) { r = i; to_upper = up_side; }
        } else if (r < 0 || viol > best_viol) {
          r = i;
          to_upper = up_side;
          best_viol = viol;
        }
      }
      if (r < 0) return LpStatus::Optimal;

      // Leaving to its lower bound requires theta <= 0, to its upper theta >= 0;
      // the sign conditions below also make the entering step direction legal.
      const S* row = &tab_[(size_t)r * N_];
      int e = -1;
      S best_num{}, best_den{};  // |dj|/|alpha| tracked as a fraction
      for (int j = 0; j < N_; ++j) {
        if (stat_[(size_t)j] == St::Basic || fixed(j)) continue;
        const S& a = row[j];
        if (a <= pivot_eps_ && a >= -pivot_eps_) continue;
        bool ok;
        if (stat_[(size_t)j] == St::Free)
          ok = true;
        else if (!to_upper)  // beta below lower: entering must raise beta[r]
          ok = (stat_[(size_t)j] == St::AtLower) ? a < S{} : a > S{};
        else
          ok = (stat_[(size_t)j] == St::AtLower) ? a > S{} : a < S{};
        if (!ok) continue;
        S dn = dj_[(size_t)j] < S{} ? -dj_[(size_t)j] : dj_[(size_t)j];
        S dd = a < S{} ? -a : a;
        if (e < 0 || dn * best_den < best_num * dd) {
          e = j;
          best_num = dn;
          best_den = dd;
        }
      }
      if (e < 0) return LpStatus::Infeasible;

      int b = basic_[(size_t)r];
      S target = to_upper ? up_[(size_t)b].value : lo_[(size_t)b].value;
      S delta = (beta_[(size_t)r] - target) / row[e];
      pivot(r, e, delta, target, to_upper ? St::AtUpper : St::AtLower);
    }
  }

  // Primal method: requires a primal-feasible start (dual_loop already done).
  LpStatus primal_loop() {
    for (;;) {
      int e = -1;
      bool increase = true;
      S best_score{};
      for (int j = 0; j < N_; ++j) {
        if (stat_[(size_t)j] == St::Basic || fixed(j)) continue;
        const S& d = dj_[(size_t)j];
        S score{};
        bool inc = true;
        if (stat_[(size_t)j] == St::AtLower && d < -d_eps_) {
          score = -d;
        } else if (stat_[(size_t)j] == St::AtUpper && d > d_eps_) {
          score = d;
          inc = false;
        } else if (stat_[(size_t)j] == St::Free && (d < -d_eps_ || d > d_eps_)) {
          score = d < S{} ? -d : d;
          inc = d < S{};
        } else {
          continue;
        }
        if (bland_) {
          if (e < 0) { e = j; increase = inc; }
          else if (j < e) { e = j; increase = inc; }
        } else if (e < 0 || score > best_score) {
          e = j;
          increase = inc;
          best_score = score;
        }
      }
      if (e < 0) return LpStatus::Optimal;

      // Ratio test along +t (increase) or -t.
      bool t_inf = true;
      S t_best{};
      int lim_row = -1;       // -1: own opposite bound limits first
      bool leave_upper = false;
      if (lo_[(size_t)e].finite && up_[(size_t)e].finite) {
        t_inf = false;
        t_best = up_[(size_t)e].value - lo_[(size_t)e].value;
      }
      for (int i = 0; i < m_; ++i) {
        const S& a = at(i, e);
        if (a <= pivot_eps_ && a >= -pivot_eps_) continue;
        // beta[i] moves at rate -a (increase) or +a (decrease).
        S rate = increase ? -a : a;
        int b = basic_[(size_t)i];
        S room{};
        bool toward_upper;
        if (rate > S{}) {
          if (!up_[(size_t)b].finite) continue;
          room = up_[(size_t)b].value - beta_[(size_t)i];
          toward_upper = true;
        } else {
          if (!lo_[(size_t)b].finite) continue;
          room = beta_[(size_t)i] - lo_[(size_t)b].value;
          rate = -rate;
          toward_upper = false;
        }
        if (room < S{}) room = S{};  // slight drift in floating mode
        S t = room / rate;
        bool better;
        if (t_inf) {
          better = true;
        } else if (bland_) {
          better = t < t_best ||
                   (t == t_best && lim_row >= 0 && b < basic_[(size_t)lim_row]);
        } else {
          better = t < t_best;
        }
        if (better) {
          t_inf = false;
          t_best = t;
          lim_row = i;
          leave_upper = toward_upper;
        }
      }
      if (t_inf) return LpStatus::Unbounded;

      if (lim_row < 0) {
        // Bound flip: e runs to its opposite bound, basis unchanged.
        S nv = increase ? up_[(size_t)e].value : lo_[(size_t)e].value;
        S delta = nv - xn_[(size_t)e];
        for (int i = 0; i < m_; ++i) {
          const S& a = at(i, e);
          if (!ScalarOps<S>::is_zero(a)) beta_[(size_t)i] -= a * delta;
        }
        xn_[(size_t)e] = nv;
        stat_[(size_t)e] = increase ? St::AtUpper : St::AtLower;
        ++iters_;
        if (++run_iters_ > hard_cap()) throw SolverError("simplex iteration cap exceeded");
        continue;
      }
      int b = basic_[(size_t)lim_row];
      S target = leave_upper ? up_[(size_t)b].value : lo_[(size_t)b].value;
      S delta = increase ? t_best : -t_best;
      pivot(lim_row, e, delta, target, leave_upper ? St::AtUpper : St::AtLower);
    }
  }

  const Model* model_;
  int m_ = 0, n_ = 0, N_ = 0;
  std::vector<S> tab_, beta_, dj_, cost_, rhs_, xn_;
  std::vector<OptB> lo_, up_;
  std::vector<St> stat_;
  std::vector<int> basic_, rowof_;
  long iters_ = 0, run_iters_ = 0;
  bool bland_ = false;
  bool dual_ready_ = false;
  S feas_eps_{}, d_eps_{}, pivot_eps_{};
};

}  // namespace stockflow::milp
