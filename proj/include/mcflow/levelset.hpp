#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mcflow/grid.hpp"

namespace mcflow {

struct LevelSetState {
  Field omega;
  double time = 0.0;
};

/// One forward-Euler step of  w_t = Lap w - (D2w grad w . grad w) / (|grad w|^2 + reg).
///
/// Central differences with mirrored ghost nodes. Throws InvalidArgument when
/// k exceeds h^2 / 4 or reg <= 0, NonFiniteValue if the update blows up.
LevelSetState ls_step(const LevelSetState& state, double k, double reg);

/// Regularization used by ls_run: 1e-10 * max|w0|^2.
double default_regularization(const Field& omega0);

struct LevelSetRun {
  std::vector<LevelSetState> snapshots;
  LevelSetState final_state;
  bool vanished = false;       ///< stopped because w had a single sign
  int steps = 0;
};

using LevelSetObserver = std::function<void(int step, const LevelSetState&)>;

/// round(t_end / k) steps with snapshots at the steps nearest to
/// `snapshot_times`; stops as soon as no node has w > 0 or every node does.
LevelSetRun ls_run(const Field& omega0, double k, double t_end,
                   std::span<const double> snapshot_times = {},
                   const LevelSetObserver& observer = {});

/// True when no node has w > 0, or every node does.
bool zero_set_empty(const Field& omega);

}  // namespace mcflow
