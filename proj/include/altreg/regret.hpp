#pragma once

#include <cstdint>
#include <vector>

#include "altreg/common.hpp"
#include "altreg/geometry.hpp"
#include "altreg/losses.hpp"

namespace altreg {

struct BestFixed {
  Vector point;
  double value;  // sum of losses at the point
};

/// Best fixed decision in hindsight: exact for linear losses (vertex /
/// scaled-gradient closed forms) and for quadratics over a ball; solver plus
/// boundary-grid refinement otherwise. Ties break at the lowest coordinate
/// index.
BestFixed best_fixed(const std::vector<LossFn>& losses, const Domain& dom);

/// Append-only regret accounting. Round t charges f_t at both the decision
/// x_t (standard) and the next decision x_{t+1} (cheating); the final call
/// supplies x_{T+1}. Alternating regret is standard plus cheating, exactly.
class RegretLedger {
 public:
  explicit RegretLedger(Domain dom);

  /// t must equal rounds()+1; anything else is an out-of-order call.
  void record(std::int64_t t, const Vector& x_t, const LossFn& f_t,
              const Vector& x_next);

  std::int64_t rounds() const { return rounds_; }
  const Domain& domain() const { return dom_; }
  const std::vector<LossFn>& losses() const { return losses_; }

  double standard_loss() const { return std_loss_; }
  double cheating_loss() const { return cht_loss_; }

  double comparator_loss(const Vector& u) const;
  double reg_std(const Vector& u) const { return std_loss_ - comparator_loss(u); }
  double reg_cht(const Vector& u) const { return cht_loss_ - comparator_loss(u); }
  double reg_alt(const Vector& u) const { return reg_std(u) + reg_cht(u); }

  /// Comparator minimizing the total loss; cached until the next record.
  const BestFixed& best() const;
  double reg_std() const { return reg_std(best().point); }
  double reg_cht() const { return reg_cht(best().point); }
  /// max_u RegAlt(u) when the comparator search is exact (linear losses,
  /// ball quadratics); a lower bound otherwise.
  double reg_alt() const { return reg_alt(best().point); }

  const std::vector<double>& per_round_standard() const { return round_std_; }
  const std::vector<double>& per_round_cheating() const { return round_cht_; }

 private:
  Domain dom_;
  std::int64_t rounds_ = 0;
  double std_loss_ = 0.0;
  double cht_loss_ = 0.0;
  std::vector<LossFn> losses_;
  std::vector<double> round_std_;
  std::vector<double> round_cht_;
  mutable bool best_valid_ = false;
  mutable BestFixed best_;
};

/// |direct alternating regret of a Hedge trace minus its KL telescoping
/// identity|. ps holds p_1..p_{T+1}, ells the T loss vectors. The trace is
/// validated against eta by recomputing p_2.
double hedge_identity_gap(const std::vector<Vector>& ps,
                          const std::vector<Vector>& ells, double eta,
                          const Vector& u);

}  // namespace altreg
