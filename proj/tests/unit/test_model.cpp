#include <limits>

#include "helpers.hpp"
#include "spectrum/error.hpp"
#include "spectrum/model.hpp"
#include "spectrum/presets.hpp"

using namespace spectrum;
using testing::near;
using testing::uniform;

TEST_CASE("licensed latency evaluates offset plus slope times load power") {
  const auto sp = ServiceProvider::incumbent("i", {0.0, 1.0, 1.0});
  CHECK(licensed_latency(sp, 0.5) == 0.5);
  CHECK(licensed_latency(sp, 0.0) == 0.0);
  const auto quad = ServiceProvider::incumbent("q", {0.1, 2.0, 2.0});
  // 0.1 + 2 * 0.5 * 0.5
  near(licensed_latency(quad, 0.5), 0.1 + 2.0 * 0.25, 1e-15);
}

TEST_CASE("entrants have no licensed latency") {
  try {
    licensed_latency(ServiceProvider::entrant("e"), 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoLicensedBand);
  }
}

TEST_CASE("unlicensed latency scales with one over capacity") {
  const UnlicensedBand band{2.0, {0.0, 1.0, 1.0}};
  near(unlicensed_latency(band, 5.0 / 6.0), 5.0 / 12.0, 1e-15);
  CHECK(std::isinf(unlicensed_latency(UnlicensedBand{0.0, {0.0, 1.0, 1.0}}, 0.3)));
  CHECK(unlicensed_latency(UnlicensedBand{0.0, {0.0, 1.0, 1.0}}, 0.0) == kBandAbsent);
  const UnlicensedBand wide{std::numeric_limits<double>::infinity(), {0.25, 1.0, 1.0}};
  CHECK(unlicensed_latency(wide, 1.0) == 0.25);
  near(unlicensed_latency(UnlicensedBand{1e12, {0.25, 1.0, 1.0}}, 1.0), 0.25, 1e-11);
  CHECK_FALSE(UnlicensedBand{0.0, {}}.present());
}

TEST_CASE("inverse demand for box and linear curves") {
  const CustomerClass box{1.0, DemandSpec{BoxDemand{1.0, 1.0}}};
  CHECK(inverse_demand(box, 0.5) == 1.0);
  CHECK(inverse_demand(box, 1.2) == 0.0);
  const CustomerClass lin{1.0, DemandSpec{LinearDemand{1.0, 4.0}}};
  near(inverse_demand(lin, 0.2), 0.2, 1e-15);
  CHECK(inverse_demand(lin, 1.0) == 0.0);
  CHECK(lin.demand.max_mass() == 0.25);
  near(lin.demand.integral(0.25), 1.0 * 0.25 - 2.0 * 0.0625, 1e-15);
  CHECK(box.demand.integral(3.0) == 1.0);
}

TEST_CASE("latency inverse and integral are consistent with evaluation") {
  for (int k = 0; k < 200; ++k) {
    const LatencySpec l{uniform(0.0, 1.0), uniform(0.1, 3.0), k % 2 ? 1.0 : uniform(1.0, 3.0)};
    const double x = uniform(0.0, 2.0);
    near(l.inverse(l(x)), x, 1e-9 * std::max(1.0, x));
    const double h = 1e-5;
    near((l.integral(x + h) - l.integral(x - h)) / (2 * h), l(x), 1e-6);
    CHECK(l.inverse(l.offset * 0.5) == 0.0);
  }
}

TEST_CASE("property: latencies are strictly increasing and convex") {
  for (int k = 0; k < 500; ++k) {
    const LatencySpec l{uniform(0.0, 1.0), uniform(0.01, 5.0), uniform(1.0, 4.0)};
    const double x = uniform(0.01, 3.0);
    const double h = uniform(1e-3, 0.1);
    CHECK(l(x + h) > l(x));
    if (h < x) CHECK(l(x + h) - 2 * l(x) + l(x - h) >= -1e-12 * std::max(1.0, l(x + h)));
    const double xl = uniform(0.0, 2.0), xr = xl + uniform(1e-3, 1.0), xm = 0.5 * (xl + xr);
    CHECK(l(xm) <= 0.5 * (l(xl) + l(xr)) + 1e-12);
  }
}

TEST_CASE("property: inverse demand is non-increasing") {
  for (int k = 0; k < 500; ++k) {
    const DemandSpec d = k % 2 ? DemandSpec{BoxDemand{uniform(0.1, 3.0), uniform(0.1, 3.0)}}
                               : DemandSpec{LinearDemand{uniform(0.1, 3.0), uniform(0.1, 5.0)}};
    const double a = uniform(0.0, 4.0), b = uniform(0.0, 4.0);
    CHECK(d.inverse(std::min(a, b)) >= d.inverse(std::max(a, b)));
  }
}

TEST_CASE("property: unlicensed latency strictly decreases in capacity") {
  for (int k = 0; k < 500; ++k) {
    const LatencySpec g{uniform(0.0, 1.0), uniform(0.1, 3.0), uniform(1.0, 3.0)};
    const double c1 = uniform(0.01, 5.0), c2 = c1 * uniform(1.01, 3.0), load = uniform(0.01, 2.0);
    CHECK(unlicensed_latency({c1, g}, load) > unlicensed_latency({c2, g}, load));
  }
}

TEST_CASE("validation accepts the reference homogeneous market with partial coverage") {
  const ValidationReport r = validate_market(homogeneous_box_market({}, 0.0));
  CHECK(r.ok());
  CHECK(r.warnings.empty());
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].message.find("partial coverage at C=0") != std::string::npos);
}

TEST_CASE("validation reports structural errors with field paths") {
  MarketConfig m = homogeneous_box_market({}, 1.0);
  m.providers.erase(m.providers.begin());
  ValidationReport r = validate_market(m);
  CHECK_FALSE(r.ok());
  CHECK(r.errors.front().path == "/providers");

  m = homogeneous_box_market({}, 1.0);
  m.providers[0].licensed->slope = -1.0;
  m.unlicensed.capacity = -2.0;
  m.classes[0].weight = 0.0;
  r = validate_market(m);
  std::vector<std::string> paths;
  for (const auto& e : r.errors) paths.push_back(e.path);
  CHECK(std::find(paths.begin(), paths.end(), "/providers/0/licensed/slope") != paths.end());
  CHECK(std::find(paths.begin(), paths.end(), "/unlicensed/capacity") != paths.end());
  CHECK(std::find(paths.begin(), paths.end(), "/classes/0/weight") != paths.end());

  MarketConfig dup = homogeneous_box_market({}, 1.0);
  dup.providers[1].id = "incumbent";
  CHECK_FALSE(validate_market(dup).ok());

  MarketConfig swapped = two_class_box_market({}, 1.0);
  std::swap(swapped.classes[0], swapped.classes[1]);
  CHECK_FALSE(validate_market(swapped).ok());
}

TEST_CASE("validation warns when the monopoly serves all demand") {
  HomogeneousBoxParams p;
  p.valuation = 2.5;
  const ValidationReport r = validate_market(homogeneous_box_market(p, 0.0));
  CHECK(r.ok());
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings[0].message.find("monopoly serves all demand") != std::string::npos);
}

TEST_CASE("validation warns on a single provider and on equal class weights") {
  HomogeneousBoxParams p;
  p.entrants = 0;
  CHECK_FALSE(validate_market(homogeneous_box_market(p, 1.0)).warnings.empty());
  TwoClassBoxParams q;
  q.low_weight = q.high_weight;
  const auto r = validate_market(two_class_box_market(q, 1.0));
  CHECK(r.ok());
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("market helpers") {
  const MarketConfig m = symmetric_linear_market(3, 4.0, 1.0, 2);
  CHECK(m.incumbent_count() == 3);
  CHECK(m.index_of("entrant2") == 4);
  CHECK(m.first_incumbent() == 0);
  CHECK(m.with_capacity(7.0).unlicensed.capacity == 7.0);
  CHECK(m.all_linear());
  CHECK_THROWS_AS(m.index_of("nobody"), Error);
  const MarketConfig d = divide_capacity_among_incumbents(m, 3.0);
  CHECK(d.providers[0].licensed->slope == 0.5);
  CHECK_FALSE(d.unlicensed.present());
}
