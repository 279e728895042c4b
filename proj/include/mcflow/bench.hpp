#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mcflow/grid.hpp"

namespace mcflow {

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.2;
  friend bool operator==(const Circle&, const Circle&) = default;
};

/// Two circles of equal radius centred at (+-(radius + gap/2), 0).
struct TwoCircles {
  double gap = 0.02;
  double radius = 0.14;
  friend bool operator==(const TwoCircles&, const TwoCircles&) = default;
};

/// Disk of radius 1/3 with two balls of radius 2/3 - M/2 centred at
/// (0, +-2/3) carved out, leaving two wedges joined by a neck of width M.
struct Wedges {
  double M = 0.01;
  friend bool operator==(const Wedges&, const Wedges&) = default;
};

/// I.i.d. uniform nodal values in [-0.9, 0.9], then `presmooth_steps` FIS
/// steps of size presmooth_k at interaction length presmooth_eps.
struct RandomField {
  std::uint64_t seed = 20190804;
  int presmooth_steps = 50;
  double presmooth_k = 1e-5;
  double presmooth_eps = 0.01;
  friend bool operator==(const RandomField&, const RandomField&) = default;
};

/// Spatially constant field; the profile is ignored.
struct Constant {
  double value = 1.0;
  friend bool operator==(const Constant&, const Constant&) = default;
};

using Shape = std::variant<Circle, TwoCircles, Wedges, RandomField, Constant>;

/// u = tanh(d / (sqrt(2) eps)), d the signed distance (positive inside).
struct TanhProfile {
  double eps = 0.01;
  friend bool operator==(const TanhProfile&, const TanhProfile&) = default;
};
/// u = d itself; the natural level-set initial datum.
struct SignedDistance {
  friend bool operator==(const SignedDistance&, const SignedDistance&) = default;
};

using Profile = std::variant<TanhProfile, SignedDistance>;

struct InitialCondition {
  Shape shape = Circle{};
  Profile profile = TanhProfile{};

  /// Throws InvalidArgument on non-positive sizes or negative counts.
  void validate() const;
  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

/// Signed distance-like function of the shape, positive inside the phase.
/// Not defined for RandomField or Constant.
double shape_distance(const Shape& shape, double x, double y);

/// Throws InvalidArgument when the geometry does not fit in the grid's box.
void validate_geometry(const InitialCondition& ic, const GridSpec& grid);

/// Throws InvalidArgument when the geometry does not fit in the grid's box.
Field make_initial_condition(const InitialCondition& ic, const GridSpec& grid);

/// Distance from the centroid of {u > 0} to the zero crossing of u along +x.
/// Throws VanishedInterface when there is nothing to measure.
double measure_radius(const Field& u);

/// 4-connected components of {nodes with u > threshold}; label -1 marks
/// nodes outside the set, components are numbered 0..count-1 in scan order.
struct ComponentLabels {
  std::vector<int> label;
  int count = 0;
};
ComponentLabels label_components(const Field& u, double threshold = 0.0);

/// Number of 4-connected components of {nodes with u > threshold}.
int count_components(const Field& u, double threshold = 0.0);

/// count_components, except 0 when the interface is gone (no node above the
/// threshold, or every node above it).
int interface_components(const Field& u, double threshold = 0.0);

enum class TopologyEvent {
  Merge,
  Split,
  Vanish,
  Appear,  ///< a component with no predecessor (tracker only)
};
enum class Classification { Merge, Separate, Vanish };

const char* to_string(TopologyEvent e) noexcept;
const char* to_string(Classification c) noexcept;

struct TimedEvent {
  TopologyEvent type;
  double time;
  friend bool operator==(const TimedEvent&, const TimedEvent&) = default;
};

struct TopologyTimeline {
  std::vector<double> times;
  std::vector<int> component_counts;
  std::vector<TimedEvent> events;
  Classification classification = Classification::Vanish;

  std::vector<TopologyEvent> event_types() const;
  int peak_count() const;
};

/// Derives events from a component-count sequence.
///
/// A rise is a Split, a drop to a nonzero count a Merge, a drop to zero a
/// Vanish (terminal: later entries are ignored). Classification: Vanish if
/// the first count is zero; otherwise Merge if any Merge occurred or the phase
/// stayed a single body; otherwise Separate.
TopologyTimeline classify_topology(const std::vector<double>& times,
                                   const std::vector<int>& counts);

/// Component tracking by overlap between consecutive labelings.
///
/// Between two observed states, a new component overlapping several old
/// ones is a Merge, an old component overlapping several new ones a Split,
/// an old component overlapping none a Vanish, and a new component
/// overlapping none an Appear. This tells a component shrinking away
/// (count 2 -> 1, Vanish) from two components joining (Merge), which counts
/// alone cannot. Events within one observation are ordered Merge, Split,
/// Vanish, Appear. When no node or every node is above the threshold the
/// interface is gone and the count is 0.
///
/// Classification: Vanish when the first state has no interface; Merge when
/// any Merge occurred, or the phase stayed one body throughout; otherwise
/// Separate.
class TopologyTracker {
 public:
  explicit TopologyTracker(double threshold = 0.0) : threshold_(threshold) {}

  void observe(double time, const Field& u);
  const TopologyTimeline& timeline() const noexcept { return timeline_; }

 private:
  double threshold_;
  ComponentLabels last_;
  bool have_last_ = false;
  bool split_ = false;
  TopologyTimeline timeline_;
};

}  // namespace mcflow
