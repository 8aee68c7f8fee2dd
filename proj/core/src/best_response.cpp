#include "spectrum/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spectrum/error.hpp"
#include "spectrum/metrics.hpp"

namespace spectrum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLoadEps = 1e-10;

bool revenue_better(double candidate, double incumbent) {
  return candidate > incumbent + 1e-13 * std::max(1.0, std::abs(incumbent));
}

struct Evaluator {
  MarketConfig market;
  PriceProfile prices;
  std::size_t focal;

  Allocation at(double p) {
    prices.licensed[market.providers[focal].id] = p;
    return allocate(market, prices);
  }
  double revenue(double p, const Allocation& a) const {
    double r = p * a.licensed_load(focal);
    if (auto it = prices.unlicensed.find(market.providers[focal].id); it != prices.unlicensed.end()) {
      r += it->second * a.unlicensed_load(focal);
    }
    return r;
  }
  double revenue(double p) { return revenue(p, at(p)); }
};

std::size_t resolve_focal(const MarketConfig& market, std::string_view sp) {
  return sp.empty() ? market.first_incumbent() : market.index_of(sp);
}

double price_ceiling(const MarketConfig& market) {
  double hi = 0.0;
  for (const auto& c : market.classes) hi = std::max(hi, c.demand.choke_price());
  return hi;
}

// Lone incumbent, box demand, affine latencies throughout.
bool lone_box_incumbent(const MarketConfig& market, std::size_t classes) {
  return market.incumbent_count() == 1 && market.classes.size() == classes && market.all_linear() &&
         std::all_of(market.classes.begin(), market.classes.end(),
                     [](const CustomerClass& c) { return c.demand.is_box(); });
}

BestResponse finish(Evaluator& ev, double price, double revenue, SearchMethod method) {
  BestResponse br;
  br.method = method;
  if (!(revenue > 0.0)) {
    br.price = kInf;
    br.revenue = 0.0;
    br.regime = Regime::Unserved;
    return br;
  }
  br.price = price;
  br.revenue = revenue;
  br.regime = classify_regime(ev.market, ev.prices, ev.at(price), ev.focal);
  return br;
}

}  // namespace

const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::ServeBothTypes: return "ServeBothTypes";
    case Regime::ServeHighOnly: return "ServeHighOnly";
    case Regime::ServeLowOnly: return "ServeLowOnly";
    case Regime::BoundaryDeliveredW: return "BoundaryDeliveredW";
    case Regime::Interior: return "Interior";
    case Regime::Unserved: return "Unserved";
  }
  return "?";
}

const char* to_string(SearchMethod method) noexcept {
  switch (method) {
    case SearchMethod::ClosedForm: return "closed_form";
    case SearchMethod::PiecewiseQuadratic: return "piecewise_quadratic";
    case SearchMethod::GoldenSection: return "golden_section";
    case SearchMethod::GridFallback: return "grid_fallback";
  }
  return "?";
}

double revenue_at_price(const MarketConfig& market, double capacity, const PriceProfile& prices,
                        std::string_view sp) {
  const MarketConfig m = market.with_capacity(capacity);
  const std::size_t i = resolve_focal(m, sp);
  const Allocation a = allocate(m, prices);
  return revenues(m, prices, a).at(m.providers[i].id);
}

Regime classify_regime(const MarketConfig& market, const PriceProfile& prices, const Allocation& allocation,
                       std::size_t focal) {
  if (allocation.licensed_load(focal) <= kLoadEps) return Regime::Unserved;
  if (market.classes.size() == 2) {
    const bool h = allocation.licensed[focal][0] > kLoadEps;
    const bool l = allocation.licensed[focal][1] > kLoadEps;
    if (h && l) return Regime::ServeBothTypes;
    return h ? Regime::ServeHighOnly : Regime::ServeLowOnly;
  }
  const auto& demand = market.classes.front().demand;
  if (demand.is_box()) {
    const auto& box = demand.box();
    const double delivered = delivered_prices(market, prices, allocation).per_class.front();
    const double scale = std::max(1.0, box.valuation);
    if (allocation.served(0) >= box.mass - 1e-9 * std::max(1.0, box.mass) &&
        std::abs(delivered - box.valuation) <= 1e-9 * scale) {
      return Regime::BoundaryDeliveredW;
    }
  }
  return Regime::Interior;
}

BestResponse best_response_homogeneous(const MarketConfig& market, double capacity) {
  if (!lone_box_incumbent(market, 1)) {
    throw Error(ErrorKind::UseGenericPath,
                "closed-form best response needs one incumbent, one box-demand class and affine latencies");
  }
  const MarketConfig m = market.with_capacity(capacity);
  const auto& cls = m.classes.front();
  const double lambda = cls.weight;
  const double W = cls.demand.box().valuation;
  const double Q = cls.demand.box().mass;
  const LatencySpec& lic = *m.providers[m.first_incumbent()].licensed;
  const double o1 = lambda * lic.offset;
  const double s1 = lambda * lic.slope;

  BestResponse br;
  br.method = SearchMethod::ClosedForm;
  const double margin = W - o1;
  if (margin <= 0.0) {
    br.price = kInf;
    br.revenue = 0.0;
    br.regime = Regime::Unserved;
    return br;
  }
  const double x_mono = margin / (2.0 * s1);
  if (x_mono > Q) {
    throw Error(ErrorKind::RegimeViolation, "monopoly serves all demand at zero unlicensed capacity");
  }
  const double p_mono = margin - s1 * x_mono;
  br.price = p_mono;
  br.revenue = p_mono * x_mono;
  br.regime = Regime::Interior;
  if (!m.unlicensed.present()) return br;

  const double o2 = lambda * m.unlicensed.latency.offset;
  const double s2 = lambda * m.unlicensed.latency.slope / m.unlicensed.capacity;
  // Unlicensed band alone cannot carry the customers the monopolist leaves out.
  if (W <= o2 || s2 * (Q - x_mono) >= W - o2) return br;

  // Revenue is concave on the shared piece x >= x_b and increasing below it.
  const double x_b = Q - (W - o2) / s2;
  const double x_int = (o2 + s2 * Q - o1) / (2.0 * (s1 + s2));
  const double x = std::clamp(x_int, std::max(x_b, 0.0), Q);
  const double p = o2 + s2 * (Q - x) - o1 - s1 * x;
  if (x <= 0.0 || p <= 0.0) {
    br.price = kInf;
    br.revenue = 0.0;
    br.regime = Regime::Unserved;
    return br;
  }
  br.price = p;
  br.revenue = p * x;
  br.regime = x == x_b ? Regime::BoundaryDeliveredW : Regime::Interior;
  return br;
}

namespace {

// Support pattern of an allocation: which (provider, band, class) cells carry
// mass and which box classes are saturated.
std::vector<char> signature(const MarketConfig& market, const Allocation& a) {
  std::vector<char> sig;
  for (std::size_t i = 0; i < a.provider_count(); ++i) {
    for (std::size_t t = 0; t < a.class_count(); ++t) {
      sig.push_back(a.licensed[i][t] > kLoadEps);
      sig.push_back(a.unlicensed[i][t] > kLoadEps);
    }
  }
  for (std::size_t t = 0; t < market.classes.size(); ++t) {
    const auto& d = market.classes[t].demand;
    sig.push_back(d.is_box() && a.served(t) >= d.box().mass - kLoadEps);
  }
  return sig;
}

struct Piecewise {
  Evaluator& ev;
  std::vector<double> candidates;

  std::vector<char> sig_at(double p) { return signature(ev.market, ev.at(p)); }
  double load_at(double p) { return ev.at(p).licensed_load(ev.focal); }

  // Narrow a pattern change inside (a, b) to machine resolution; both sides
  // become candidates.
  void bisect(double a, double b, const std::vector<char>& sa) {
    for (int k = 0; k < 60 && b - a > 1e-15 * std::max(1.0, b); ++k) {
      const double mid = 0.5 * (a + b);
      if (sig_at(mid) == sa) {
        a = mid;
      } else {
        b = mid;
      }
    }
    candidates.push_back(a);
    candidates.push_back(b);
    // The signature flips at a small load threshold, not at the kink itself;
    // intersect the affine loads on either side to recover it.
    const double h = 1e-7 * std::max(1.0, b);
    const double l0 = a - 2.0 * h, l1 = a - h, r0 = b + h, r1 = b + 2.0 * h;
    if (l0 < 0.0 || sig_at(l0) != sa || sig_at(r1) != sig_at(b)) return;
    const double xl = load_at(l1), xr = load_at(r0);
    const double cl = (xl - load_at(l0)) / h;
    const double cr = (load_at(r1) - xr) / h;
    if (std::abs(cl - cr) <= 1e-9) return;
    const double kink = (xr - xl + cl * l1 - cr * r0) / (cl - cr);
    if (kink >= l1 && kink <= r0) candidates.push_back(kink);
  }

  // Within one pattern the focal load is affine in p and revenue is a
  // quadratic; its vertex, clipped, is the only interior candidate.
  void piece(double a, double b, int depth) {
    candidates.push_back(a);
    candidates.push_back(b);
    if (b - a <= 1e-13) return;
    const double u = a + (b - a) / 3.0;
    const double v = a + 2.0 * (b - a) / 3.0;
    const double xa = load_at(a), xu = load_at(u), xv = load_at(v), xb = load_at(b);
    const double c = (xv - xu) / (v - u);
    const double x0 = xu - c * u;
    const double tol = 1e-9 * std::max(1.0, std::abs(x0));
    const bool affine = std::abs(x0 + c * a - xa) <= tol && std::abs(x0 + c * b - xb) <= tol;
    if (!affine && depth < 40) {
      const double mid = 0.5 * (a + b);
      const auto sa = sig_at(a), sm = sig_at(mid), sb = sig_at(b);
      if (sa != sm) bisect(a, mid, sa);
      if (sm != sb) bisect(mid, b, sm);
      piece(a, mid, depth + 1);
      piece(mid, b, depth + 1);
      return;
    }
    if (c < 0.0) candidates.push_back(std::clamp(-x0 / (2.0 * c), a, b));
  }
};

}  // namespace

BestResponse best_response_heterogeneous(const MarketConfig& market, double capacity) {
  if (!lone_box_incumbent(market, 2)) {
    throw Error(ErrorKind::UseGenericPath,
                "piecewise best response needs one incumbent, two box-demand classes and affine latencies");
  }
  const MarketConfig m = market.with_capacity(capacity);
  Evaluator ev{m, uniform_profile(m, 0.0), m.first_incumbent()};
  const double hi = price_ceiling(m);

  constexpr int kScan = 256;
  Piecewise pw{ev, {}};
  std::vector<double> grid(kScan + 1);
  std::vector<std::vector<char>> sigs(kScan + 1);
  for (int k = 0; k <= kScan; ++k) {
    grid[k] = hi * k / kScan;
    sigs[k] = pw.sig_at(grid[k]);
  }
  for (int k = 0; k < kScan; ++k) {
    if (sigs[k] != sigs[k + 1]) pw.bisect(grid[k], grid[k + 1], sigs[k]);
  }
  std::vector<double> cuts = pw.candidates;
  cuts.push_back(0.0);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // Finer scan intervals between cuts keep each piece short enough for the
  // affinity check to catch a missed kink.
  std::vector<double> knots = cuts;
  for (double g : grid) knots.push_back(g);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) pw.piece(knots[k], knots[k + 1], 0);

  std::sort(pw.candidates.begin(), pw.candidates.end());
  pw.candidates.erase(std::unique(pw.candidates.begin(), pw.candidates.end()), pw.candidates.end());

  struct Scored {
    double price, revenue;
  };
  std::vector<Scored> scored;
  scored.reserve(pw.candidates.size());
  for (double p : pw.candidates) scored.push_back({p, ev.revenue(p)});

  Scored best{0.0, 0.0};
  for (const auto& s : scored) {
    if (revenue_better(s.revenue, best.revenue)) best = s;
  }
  BestResponse br = finish(ev, best.price, best.revenue, SearchMethod::PiecewiseQuadratic);
  if (br.regime == Regime::Unserved) return br;
  const double tie_tol = 1e-10 * std::max(1.0, best.revenue);
  for (const auto& s : scored) {
    if (s.price <= best.price || best.revenue - s.revenue > tie_tol) continue;
    const Regime r = classify_regime(ev.market, ev.prices, ev.at(s.price), ev.focal);
    if (r != br.regime && r != Regime::Unserved) {
      br.tie = BestResponse::Tie{s.price, r};
      break;
    }
  }
  return br;
}

std::optional<bool> revenue_concavity_holds(const MarketConfig& market, double capacity, int mesh) {
  if (market.incumbent_count() != 1 || market.classes.size() != 1 || !market.classes.front().demand.is_box()) {
    return std::nullopt;
  }
  const MarketConfig m = market.with_capacity(capacity);
  const auto& cls = m.classes.front();
  const double W = cls.demand.box().valuation;
  const double Q = cls.demand.box().mass;
  const LatencySpec& lic = *m.providers[m.first_incumbent()].licensed;
  auto f = [&](double x) {
    const double g = m.unlicensed.present() ? m.unlicensed.effective()(Q - x) : W / cls.weight;
    return x * (g - lic(x));
  };
  mesh = std::max(mesh, 4);
  const double h = Q / mesh;
  double scale = 0.0;
  for (int k = 0; k <= mesh; ++k) scale = std::max(scale, std::abs(f(k * h)));
  for (int k = 1; k < mesh; ++k) {
    const double x = k * h;
    if (f(x + h) - 2.0 * f(x) + f(x - h) > 1e-10 * std::max(1.0, scale)) return false;
  }
  return true;
}

namespace {

bool unimodal(const std::vector<double>& r) {
  const double tol = 1e-12 * std::max(1.0, *std::max_element(r.begin(), r.end()));
  std::size_t k = 0;
  while (k + 1 < r.size() && r[k + 1] >= r[k] - tol) ++k;
  while (k + 1 < r.size() && r[k + 1] <= r[k] + tol) ++k;
  return k + 1 == r.size();
}

// Dense scan of [lo, hi]; lowest price wins ties.
std::pair<double, double> grid_argmax(Evaluator& ev, double lo, double hi, int points) {
  double bp = lo, br = ev.revenue(lo);
  for (int k = 1; k < points; ++k) {
    const double p = lo + (hi - lo) * k / (points - 1);
    const double r = ev.revenue(p);
    if (revenue_better(r, br)) {
      bp = p;
      br = r;
    }
  }
  return {bp, br};
}

}  // namespace

BestResponse best_response_generic(const MarketConfig& market, double capacity, const PriceProfile& rivals,
                                   std::string_view focal, const GenericSearchOptions& options) {
  const MarketConfig m = market.with_capacity(capacity);
  Evaluator ev{m, rivals, resolve_focal(m, focal)};
  if (!m.providers[ev.focal].is_incumbent()) {
    throw Error(ErrorKind::NoLicensedBand, "best response needs an incumbent");
  }
  const double hi = price_ceiling(m);
  const int mesh = std::max(options.precondition_mesh, 8);

  std::vector<double> sampled(mesh + 1);
  for (int k = 0; k <= mesh; ++k) sampled[k] = ev.revenue(hi * k / mesh);

  bool ok;
  if (auto concave = revenue_concavity_holds(m, capacity, mesh)) {
    ok = *concave;
  } else {
    ok = unimodal(sampled);
  }

  if (ok) {
    std::size_t k = 0;
    for (std::size_t j = 1; j < sampled.size(); ++j) {
      if (revenue_better(sampled[j], sampled[k])) k = j;
    }
    double a = hi * (k == 0 ? 0.0 : static_cast<double>(k - 1)) / mesh;
    double b = hi * std::min<double>(static_cast<double>(k + 1), mesh) / mesh;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = ev.revenue(c), fd = ev.revenue(d);
    while (b - a > options.price_tolerance) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = ev.revenue(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = ev.revenue(d);
      }
    }
    double price = 0.5 * (a + b);
    double revenue = ev.revenue(price);
    if (revenue_better(sampled[k], revenue)) {
      price = hi * static_cast<double>(k) / mesh;
      revenue = sampled[k];
    }
    BestResponse br = finish(ev, price, revenue, SearchMethod::GoldenSection);
    br.precondition_ok = true;
    return br;
  }

  const int n = std::max(options.fallback_points, 2);
  auto [p, r] = grid_argmax(ev, 0.0, hi, n);
  double step = hi / (n - 1);
  for (int pass = 0; pass < options.refinement_passes; ++pass) {
    const double lo = std::max(0.0, p - step), up = std::min(hi, p + step);
    auto [p2, r2] = grid_argmax(ev, lo, up, n);
    if (revenue_better(r2, r) || (r2 >= r && p2 < p)) {
      p = p2;
      r = r2;
    }
    step = (up - lo) / (n - 1);
  }
  BestResponse br = finish(ev, p, r, SearchMethod::GridFallback);
  br.precondition_ok = false;
  return br;
}

}  // namespace spectrum
