#include "mcflow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mcflow/discretization.hpp"
#include "mcflow/error.hpp"
#include "mcflow/schemes.hpp"

namespace mcflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wedge_distance(double M, double x, double y) {
  const double big = 2.0 / 3.0;
  const double r_outer = big - 0.5 * M;
  const double d1 = std::hypot(x, y - big) - r_outer;
  const double d2 = std::hypot(x, y) - 1.0 / 3.0;
  const double d3 = std::hypot(x, y + big) - r_outer;
  return std::max({-d1, d2, -d3});
}

void require_inside(const GridSpec& g, double x0, double x1, double y0, double y1) {
  const double slack = 1e-12;
  if (x0 < g.x_min - slack || x1 > g.x_max + slack || y0 < g.y_min - slack ||
      y1 > g.y_max + slack)
    throw InvalidArgument("initial geometry exceeds the domain");
}

Field random_field(const RandomField& r, const GridSpec& grid) {
  std::mt19937_64 rng(r.seed);
  std::vector<double> v(grid.node_count());
  for (double& x : v) {
    // 53 random bits -> [0, 1); independent of the standard library's
    // distribution implementation.
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = -0.9 + 1.8 * unit;
  }
  Field u(grid, std::move(v));
  const StepParams p{r.presmooth_eps, r.presmooth_k};
  for (int s = 0; s < r.presmooth_steps; ++s) u = step_scheme(SchemeId::FIS, u, p);
  return u;
}

}  // namespace

void InitialCondition::validate() const {
  std::visit(overloaded{
                 [](const Circle& c) {
                   if (!(c.radius > 0.0)) throw InvalidArgument("circle radius must be positive");
                 },
                 [](const TwoCircles& c) {
                   if (!(c.radius > 0.0)) throw InvalidArgument("circle radius must be positive");
                   if (!(c.gap >= 0.0)) throw InvalidArgument("gap must be nonnegative");
                 },
                 [](const Wedges& w) {
                   if (!(w.M > 0.0) || !(w.M < 2.0 / 3.0))
                     throw InvalidArgument("wedge neck width M must lie in (0, 2/3)");
                 },
                 [](const RandomField& r) {
                   if (r.presmooth_steps < 0)
                     throw InvalidArgument("presmooth_steps must be nonnegative");
                   if (r.presmooth_steps > 0 && (!(r.presmooth_k > 0.0) || !(r.presmooth_eps > 0.0)))
                     throw InvalidArgument("presmoothing needs positive k and eps");
                 },
                 [](const Constant& c) {
                   if (!std::isfinite(c.value)) throw InvalidArgument("constant must be finite");
                 },
             },
             shape);
  if (const auto* t = std::get_if<TanhProfile>(&profile); t && !(t->eps > 0.0))
    throw InvalidArgument("tanh profile width must be positive");
}

double shape_distance(const Shape& shape, double x, double y) {
  return std::visit(
      overloaded{
          [&](const Circle& c) { return c.radius - std::hypot(x - c.cx, y - c.cy); },
          [&](const TwoCircles& c) {
            const double off = c.radius + 0.5 * c.gap;
            return std::max(c.radius - std::hypot(x - off, y), c.radius - std::hypot(x + off, y));
          },
          [&](const Wedges& w) { return -wedge_distance(w.M, x, y); },
          [](const RandomField&) -> double {
            throw InvalidArgument("random fields have no distance function");
          },
          [](const Constant&) -> double {
            throw InvalidArgument("constant fields have no distance function");
          },
      },
      shape);
}

void validate_geometry(const InitialCondition& ic, const GridSpec& grid) {
  ic.validate();
  grid.validate();
  if (const auto* c = std::get_if<Circle>(&ic.shape))
    require_inside(grid, c->cx - c->radius, c->cx + c->radius, c->cy - c->radius,
                   c->cy + c->radius);
  if (const auto* c = std::get_if<TwoCircles>(&ic.shape)) {
    const double reach = 2.0 * c->radius + 0.5 * c->gap;
    require_inside(grid, -reach, reach, -c->radius, c->radius);
  }
  if (std::get_if<Wedges>(&ic.shape))
    require_inside(grid, -1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0);
}

Field make_initial_condition(const InitialCondition& ic, const GridSpec& grid) {
  validate_geometry(ic, grid);
  if (const auto* r = std::get_if<RandomField>(&ic.shape)) return random_field(*r, grid);
  if (const auto* c = std::get_if<Constant>(&ic.shape)) return Field(grid, c->value);

  if (const auto* t = std::get_if<TanhProfile>(&ic.profile)) {
    const double scale = 1.0 / (std::sqrt(2.0) * t->eps);
    return Field::sample(grid, [&](double x, double y) {
      return std::tanh(shape_distance(ic.shape, x, y) * scale);
    });
  }
  return Field::sample(grid, [&](double x, double y) { return shape_distance(ic.shape, x, y); });
}

double measure_radius(const Field& u) {
  const GridSpec& g = u.grid();
  double sx = 0.0, sy = 0.0;
  long count = 0;
  for (int j = 0; j <= g.n; ++j)
    for (int i = 0; i <= g.n; ++i)
      if (u(i, j) > 0.0) {
        sx += g.x(i);
        sy += g.y(j);
        ++count;
      }
  if (count == 0) throw VanishedInterface("measure_radius: no positive phase left");
  const double cx = sx / count, cy = sy / count;
  double prev = sample_bilinear(u, cx, cy);
  if (!(prev > 0.0)) throw VanishedInterface("measure_radius: centroid lies outside the phase");

  const double step = 0.5 * g.h();
  for (double s = step; cx + s <= g.x_max + 1e-12; s += step) {
    const double cur = sample_bilinear(u, cx + s, cy);
    if (cur <= 0.0) return s - step + step * prev / (prev - cur);
    prev = cur;
  }
  throw VanishedInterface("measure_radius: no sign change along +x");
}

ComponentLabels label_components(const Field& u, double threshold) {
  const GridSpec& g = u.grid();
  const int m = g.nodes_per_side();
  const auto v = u.values();
  ComponentLabels out{std::vector<int>(v.size(), -1), 0};
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < v.size(); ++start) {
    if (out.label[start] >= 0 || !(v[start] > threshold)) continue;
    const int id = out.count++;
    out.label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(k % m), j = static_cast<int>(k / m);
      auto visit = [&](int a, int b) {
        if (a < 0 || b < 0 || a >= m || b >= m) return;
        const std::size_t q = static_cast<std::size_t>(b) * m + a;
        if (out.label[q] < 0 && v[q] > threshold) {
          out.label[q] = id;
          stack.push_back(q);
        }
      };
      visit(i - 1, j);
      visit(i + 1, j);
      visit(i, j - 1);
      visit(i, j + 1);
    }
  }
  return out;
}

int count_components(const Field& u, double threshold) {
  return label_components(u, threshold).count;
}

int interface_components(const Field& u, double threshold) {
  const auto v = u.values();
  const bool all_above =
      std::all_of(v.begin(), v.end(), [&](double x) { return x > threshold; });
  if (all_above) return 0;
  return count_components(u, threshold);
}

const char* to_string(TopologyEvent e) noexcept {
  switch (e) {
    case TopologyEvent::Merge:
      return "merge";
    case TopologyEvent::Split:
      return "split";
    case TopologyEvent::Vanish:
      return "vanish";
    case TopologyEvent::Appear:
      return "appear";
  }
  return "?";
}

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Merge:
      return "merge";
    case Classification::Separate:
      return "separate";
    case Classification::Vanish:
      return "vanish";
  }
  return "?";
}

std::vector<TopologyEvent> TopologyTimeline::event_types() const {
  std::vector<TopologyEvent> out;
  for (const auto& e : events) out.push_back(e.type);
  return out;
}

int TopologyTimeline::peak_count() const {
  return component_counts.empty()
             ? 0
             : *std::max_element(component_counts.begin(), component_counts.end());
}

TopologyTimeline classify_topology(const std::vector<double>& times,
                                   const std::vector<int>& counts) {
  if (times.size() != counts.size())
    throw InvalidArgument("classify_topology: times and counts differ in length");
  if (counts.empty()) throw InvalidArgument("classify_topology: empty count sequence");
  for (int c : counts)
    if (c < 0) throw InvalidArgument("classify_topology: negative component count");

  TopologyTimeline tl;
  tl.times = times;
  tl.component_counts = counts;
  if (counts.front() == 0) {
    tl.events.push_back({TopologyEvent::Vanish, times.front()});
    tl.classification = Classification::Vanish;
    return tl;
  }
  bool merged = false, split = false;
  int peak = counts.front();
  for (std::size_t i = 1; i < counts.size(); ++i) {
    const int before = counts[i - 1], now = counts[i];
    if (now == 0) {
      tl.events.push_back({TopologyEvent::Vanish, times[i]});
      break;
    }
    peak = std::max(peak, now);
    if (now > before) {
      tl.events.push_back({TopologyEvent::Split, times[i]});
      split = true;
    } else if (now < before) {
      tl.events.push_back({TopologyEvent::Merge, times[i]});
      merged = true;
    }
  }
  if (merged || (!split && peak == 1))
    tl.classification = Classification::Merge;
  else
    tl.classification = Classification::Separate;
  return tl;
}

void TopologyTracker::observe(double time, const Field& u) {
  if (!timeline_.times.empty() && !(time > timeline_.times.back()))
    throw InvalidArgument("TopologyTracker: times must increase");
  const auto v = u.values();
  const bool all_above = std::all_of(v.begin(), v.end(), [&](double x) { return x > threshold_; });
  // A phase filling the whole box is matched as one body covering every node;
  // the interface itself is gone, so it is recorded with count 0.
  ComponentLabels cur = all_above ? ComponentLabels{std::vector<int>(v.size(), 0), 1}
                                  : label_components(u, threshold_);
  if (have_last_ && cur.label.size() != last_.label.size())
    throw GridMismatch("TopologyTracker: grid changed between observations");

  const bool first = timeline_.times.empty();
  timeline_.times.push_back(time);
  const int interface_count = all_above ? 0 : cur.count;
  timeline_.component_counts.push_back(interface_count);

  if (first) {
    timeline_.classification =
        interface_count == 0 ? Classification::Vanish : Classification::Merge;
    if (interface_count == 0) timeline_.events.push_back({TopologyEvent::Vanish, time});
  } else if (timeline_.component_counts[timeline_.component_counts.size() - 2] > 0) {
    const int a = last_.count, b = cur.count;
    // Distinct overlapping pairs (old, new).
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t q = 0; q < cur.label.size(); ++q)
      if (last_.label[q] >= 0 && cur.label[q] >= 0) pairs.emplace_back(last_.label[q], cur.label[q]);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<int> old_links(a, 0), new_links(b, 0);
    for (const auto& [o, n] : pairs) {
      ++old_links[o];
      ++new_links[n];
    }
    auto emit = [&](TopologyEvent e, int times) {
      for (int r = 0; r < times; ++r) timeline_.events.push_back({e, time});
    };
    int merges = 0, splits = 0, vanishes = 0, appears = 0;
    for (int n = 0; n < b; ++n) merges += new_links[n] > 1;
    for (int o = 0; o < a; ++o) splits += old_links[o] > 1;
    for (int o = 0; o < a; ++o) vanishes += old_links[o] == 0;
    if (all_above) vanishes += 1;
    else
      for (int n = 0; n < b; ++n) appears += new_links[n] == 0;
    emit(TopologyEvent::Merge, merges);
    emit(TopologyEvent::Split, splits);
    emit(TopologyEvent::Vanish, vanishes);
    emit(TopologyEvent::Appear, appears);
    split_ = split_ || splits > 0;
  }

  if (timeline_.component_counts.front() > 0) {
    const bool merged = std::any_of(timeline_.events.begin(), timeline_.events.end(),
                                    [](const TimedEvent& e) { return e.type == TopologyEvent::Merge; });
    timeline_.classification = merged || (!split_ && timeline_.peak_count() == 1)
                                   ? Classification::Merge
                                   : Classification::Separate;
  }
  last_ = std::move(cur);
  have_last_ = true;
}

}  // namespace mcflow
