#include <cmath>

#include "doctest.h"
#include "mcflow/discretization.hpp"
#include "mcflow/energy.hpp"
#include "unit/support.hpp"

using namespace mcflow;

namespace {

double directional(const Field& grad, const Field& v) { return lumped_inner_product(grad, v); }

// High-resolution 1-D Simpson quadrature of  int 1/2 u'^2 + F(u)/eps^2  for
// u = tanh(x / (sqrt 2 eps)) on [-1/2, 1/2].
double tanh_profile_energy_1d(double eps) {
  const int m = 200000;
  const double a = std::sqrt(2.0) * eps;
  const double h = 1.0 / m;
  auto integrand = [&](double x) {
    const double t = std::tanh(x / a);
    const double du = (1.0 - t * t) / a;
    const double F = 0.25 * (t * t - 1.0) * (t * t - 1.0);
    return 0.5 * du * du + F / (eps * eps);
  };
  double s = integrand(-0.5) + integrand(0.5);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * integrand(-0.5 + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("double well values") {
  CHECK(double_well(1.0).F == 0.0);
  CHECK(double_well(1.0).f == 0.0);
  CHECK(double_well(0.0).F == 0.25);
  CHECK(double_well(0.0).f == 0.0);
  CHECK(double_well(2.0).F == 2.25);
  CHECK(double_well(2.0).f == 6.0);
  for (double u : {-1.7, -0.3, 0.2, 0.9, 1.4}) {
    const double s = 1e-6;
    CHECK(double_well(u).f ==
          doctest::Approx((double_well(u + s).F - double_well(u - s).F) / (2 * s)).epsilon(1e-8));
    CHECK(double_well_increment(u, 1e-3) ==
          doctest::Approx(double_well(u + 1e-3).F - double_well(u).F).epsilon(1e-9));
  }
}

TEST_CASE("j_eps examples") {
  const GridSpec g = GridSpec::unit_box(20);
  CHECK(j_eps(Field(g, 1.0), 0.37) == 0.0);
  CHECK(j_eps(Field(g, -1.0), 0.01) == 0.0);
  CHECK(j_eps(Field(g, 0.0), 0.1) == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("j_eps of a tanh profile matches the 1-D quadrature oracle") {
  const double eps = 0.02;
  const GridSpec g = GridSpec::with_spacing(GridSpec::unit_box(1), eps / 4);
  const Field u = Field::sample(g, [&](double x, double) { return std::tanh(x / (std::sqrt(2.0) * eps)); });
  const double oracle = tanh_profile_energy_1d(eps);
  CHECK(oracle == doctest::Approx(2.0 * std::sqrt(2.0) / (3.0 * eps)).epsilon(1e-3));
  CHECK(std::abs(j_eps(u, eps) - oracle) <= 0.02 * oracle);
}

TEST_CASE("step energy examples") {
  const GridSpec g = GridSpec::unit_box(8);
  const Field one(g, 1.0), minus(g, -1.0), zero(g, 0.0);
  CHECK(step_energy(one, one, {0.1, 1e-3}) == 0.0);
  CHECK(step_energy(one, minus, {0.3, 1.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(step_energy(zero, zero, {0.5, 123.0}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("penalized and scaled energy examples") {
  const GridSpec g = GridSpec::unit_box(8);
  const Field one(g, 1.0), zero(g, 0.0);
  StepParams p{0.5, 1.0, 4.0, Functional::Penalized};
  CHECK(penalized_step_energy(zero, zero, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(penalized_step_energy(one, zero, p) == doctest::Approx(-3.5).epsilon(1e-14));
  StepParams s{0.5, 1.0, 1.0, Functional::ScaledRemark};
  CHECK(scaled_step_energy(one, zero, s) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("delta = 0 collapses all functionals; diagonal identity") {
  const GridSpec g = GridSpec::unit_box(7);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field u = testing::random_field(g, seed), prev = testing::random_field(g, seed + 50);
    const StepParams p{0.2, 0.03, 0.0};
    const double e = step_energy(u, prev, p);
    CHECK(penalized_step_energy(u, prev, p) == e);
    CHECK(scaled_step_energy(u, prev, p) == e);
    CHECK(step_energy(prev, prev, p) == j_eps(prev, p.eps));
    const StepParams q{0.2, 0.03, 0.6};
    CHECK(penalized_step_energy(prev, prev, q) == doctest::Approx(j_eps(prev, q.eps)).epsilon(1e-13));
    CHECK(scaled_step_energy(prev, prev, q) == doctest::Approx(j_eps(prev, q.eps)).epsilon(1e-13));
  }
}

TEST_CASE("gradient examples") {
  const GridSpec g = GridSpec::unit_box(6);
  for (Functional f : {Functional::Plain, Functional::Penalized, Functional::ScaledRemark}) {
    const StepParams p{0.1, 0.01, 0.5, f};
    const Field grad = energy_gradient(Field(g, 1.0), Field(g, 1.0), p);
    for (double v : grad.values()) CHECK(v == 0.0);
  }
  const Field grad = energy_gradient(Field(g, 0.0), Field(g, 0.0), {0.1, 0.01});
  for (double v : grad.values()) CHECK(v == 0.0);
}

TEST_CASE("gradient matches central differences for every functional") {
  const GridSpec g = GridSpec::unit_box(8);  // 9 x 9 nodes
  const double sigma = 1e-5;
  for (Functional f : {Functional::Plain, Functional::Penalized, Functional::ScaledRemark}) {
    const StepParams p{0.3, 0.01, f == Functional::ScaledRemark ? 0.4 : 2.5, f};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Field u = testing::random_field(g, 1000 + seed);
      const Field prev = testing::random_field(g, 2000 + seed);
      const Field v = testing::random_field(g, 3000 + seed);
      const double analytic = directional(energy_gradient(u, prev, p), v);
      const double fd = (functional_value(testing::axpy(sigma, v, u), prev, p) -
                         functional_value(testing::axpy(-sigma, v, u), prev, p)) /
                        (2 * sigma);
      CHECK(std::abs(analytic - fd) <= 1e-6 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST_CASE("penalized gradient equals the plain gradient at the reduced length") {
  const GridSpec g = GridSpec::unit_box(10);
  for (double delta : {0.5, 3.0, 8.0}) {
    const Field u = testing::random_field(g, 7), prev = testing::random_field(g, 8);
    const StepParams pen{0.02, 1e-4, delta, Functional::Penalized};
    const StepParams plain{0.02 / std::sqrt(delta + 1.0), 1e-4, 0.0, Functional::Plain};
    const Field a = energy_gradient(u, prev, pen), b = energy_gradient(u, prev, plain);
    double scale = 0.0;
    for (double x : a.values()) scale = std::max(scale, std::abs(x));
    CHECK(testing::max_abs_diff(a, b) <= 1e-12 * scale);
  }
}

TEST_CASE("scaled gradient is (1 - delta) times the plain gradient with time step k(1 - delta)") {
  const GridSpec g = GridSpec::unit_box(10);
  const Field u = testing::random_field(g, 17), prev = testing::random_field(g, 18);
  const double delta = 0.3, k = 2e-3;
  const Field scaled = energy_gradient(u, prev, {0.05, k, delta, Functional::ScaledRemark});
  const Field plain = energy_gradient(u, prev, {0.05, k * (1 - delta), 0.0, Functional::Plain});
  double scale = 0.0;
  for (double x : scaled.values()) scale = std::max(scale, std::abs(x));
  std::vector<double> diff(scaled.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = scaled.values()[i] - (1 - delta) * plain.values()[i];
  for (double d : diff) CHECK(std::abs(d) <= 1e-12 * scale);
}

TEST_CASE("functional weights") {
  CHECK(functional_weights({0.1, 1, 0, Functional::Plain}).gradient_weight == 1.0);
  CHECK(functional_weights({0.1, 1, 3, Functional::Penalized}).potential_weight == 4.0);
  CHECK(functional_weights({0.1, 1, 0.25, Functional::ScaledRemark}).gradient_weight == 0.75);
}

TEST_CASE("step parameter validation") {
  CHECK_THROWS_AS(StepParams({0.0, 1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StepParams({0.1, -1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StepParams({0.1, 1.0, -0.5}).validate(), InvalidArgument);
  CHECK_THROWS_AS(StepParams({0.1, 1.0, 1.0, Functional::ScaledRemark}).validate(), InvalidArgument);
  CHECK_NOTHROW(StepParams({0.1, 1.0, 0.99, Functional::ScaledRemark}).validate());
}

TEST_CASE("energies reject mismatched grids") {
  CHECK_THROWS_AS(step_energy(Field(GridSpec::unit_box(3)), Field(GridSpec::unit_box(4)), {}),
                  GridMismatch);
}

}  // TEST_SUITE
