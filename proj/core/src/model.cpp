#include "spectrum/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "spectrum/error.hpp"

namespace spectrum {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid config";
    case ErrorKind::NoLicensedBand: return "no licensed band";
    case ErrorKind::NoConsistentPattern: return "no consistent pattern";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::UseGenericPath: return "use generic path";
    case ErrorKind::RegimeViolation: return "regime violation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Parse: return "parse error";
  }
  return "unknown";
}

double LatencySpec::operator()(double load) const {
  if (exponent == 1.0) return offset + slope * load;
  return offset + slope * std::pow(load, exponent);
}

double LatencySpec::derivative(double load) const {
  if (exponent == 1.0) return slope;
  return slope * exponent * std::pow(load, exponent - 1.0);
}

double LatencySpec::inverse(double level) const {
  if (level <= offset) return 0.0;
  if (slope == 0.0) return std::numeric_limits<double>::infinity();
  const double scaled = (level - offset) / slope;
  if (exponent == 1.0) return scaled;
  return std::pow(scaled, 1.0 / exponent);
}

double LatencySpec::integral(double load) const {
  if (exponent == 1.0) return offset * load + 0.5 * slope * load * load;
  return offset * load + slope * std::pow(load, exponent + 1.0) / (exponent + 1.0);
}

LatencySpec UnlicensedBand::effective() const {
  if (!present()) throw Error(ErrorKind::InvalidConfig, "unlicensed band is absent");
  LatencySpec out = latency;
  out.slope = std::isinf(capacity) ? 0.0 : latency.slope / capacity;
  return out;
}

double DemandSpec::inverse(double q) const {
  if (const auto* box = std::get_if<BoxDemand>(&kind)) {
    return q <= box->mass ? box->valuation : 0.0;
  }
  const auto& lin = std::get<LinearDemand>(kind);
  return std::max(lin.intercept - lin.elasticity * q, 0.0);
}

double DemandSpec::integral(double q) const {
  if (q <= 0.0) return 0.0;
  if (const auto* box = std::get_if<BoxDemand>(&kind)) {
    return box->valuation * std::min(q, box->mass);
  }
  const auto& lin = std::get<LinearDemand>(kind);
  const double choke = lin.intercept / lin.elasticity;
  const double upto = std::min(q, choke);
  return lin.intercept * upto - 0.5 * lin.elasticity * upto * upto;
}

double DemandSpec::choke_price() const {
  if (const auto* box = std::get_if<BoxDemand>(&kind)) return box->valuation;
  return std::get<LinearDemand>(kind).intercept;
}

double DemandSpec::max_mass() const {
  if (const auto* box = std::get_if<BoxDemand>(&kind)) return box->mass;
  const auto& lin = std::get<LinearDemand>(kind);
  return lin.intercept / lin.elasticity;
}

ServiceProvider ServiceProvider::incumbent(std::string id, LatencySpec latency) {
  return ServiceProvider{std::move(id), latency};
}

ServiceProvider ServiceProvider::entrant(std::string id) {
  return ServiceProvider{std::move(id), std::nullopt};
}

std::vector<std::size_t> MarketConfig::incumbent_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < providers.size(); ++i) {
    if (providers[i].is_incumbent()) out.push_back(i);
  }
  return out;
}

std::size_t MarketConfig::incumbent_count() const {
  return static_cast<std::size_t>(std::count_if(
      providers.begin(), providers.end(), [](const auto& sp) { return sp.is_incumbent(); }));
}

std::size_t MarketConfig::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < providers.size(); ++i) {
    if (providers[i].id == id) return i;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown provider id '" + std::string(id) + "'");
}

std::size_t MarketConfig::first_incumbent() const {
  for (std::size_t i = 0; i < providers.size(); ++i) {
    if (providers[i].is_incumbent()) return i;
  }
  throw Error(ErrorKind::InvalidConfig, "market has no incumbent");
}

MarketConfig MarketConfig::with_capacity(double capacity) const {
  MarketConfig out = *this;
  out.unlicensed.capacity = capacity;
  return out;
}

bool MarketConfig::all_linear() const {
  for (const auto& sp : providers) {
    if (sp.licensed && !sp.licensed->is_linear()) return false;
  }
  return !unlicensed.present() || unlicensed.latency.is_linear();
}

double licensed_latency(const ServiceProvider& sp, double load) {
  if (!sp.licensed) {
    throw Error(ErrorKind::NoLicensedBand, "provider '" + sp.id + "' has no licensed band");
  }
  return (*sp.licensed)(load);
}

double unlicensed_latency(const UnlicensedBand& band, double load) {
  if (!band.present()) return kBandAbsent;
  return band.effective()(load);
}

double inverse_demand(const CustomerClass& cls, double q) {
  return cls.demand.inverse(q);
}

namespace {

void check_latency(const LatencySpec& l, const std::string& path, ValidationReport& report) {
  if (!(l.offset >= 0.0) || !std::isfinite(l.offset)) {
    report.errors.push_back({path + "/offset", "must be a finite nonnegative number"});
  }
  if (!(l.slope > 0.0) || !std::isfinite(l.slope)) {
    report.errors.push_back({path + "/slope", "must be a finite positive number"});
  }
  if (!(l.exponent >= 1.0) || !std::isfinite(l.exponent)) {
    report.errors.push_back({path + "/exponent", "must be >= 1 for a convex latency"});
  }
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_market(const MarketConfig& config) {
  ValidationReport report;

  if (config.providers.empty()) {
    report.errors.push_back({"/providers", "at least one provider is required"});
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < config.providers.size(); ++i) {
    const auto& sp = config.providers[i];
    const std::string path = "/providers/" + std::to_string(i);
    if (sp.id.empty()) report.errors.push_back({path + "/id", "must be non-empty"});
    if (!ids.insert(sp.id).second) {
      report.errors.push_back({path + "/id", "duplicate provider id '" + sp.id + "'"});
    }
    if (sp.licensed) check_latency(*sp.licensed, path + "/licensed", report);
  }
  if (!config.providers.empty() && config.incumbent_count() == 0) {
    report.errors.push_back({"/providers", "at least one incumbent (licensed provider) is required"});
  }
  if (config.providers.size() == 1) {
    report.warnings.push_back(
        {"/providers", "single provider: zero unlicensed pricing needs at least two providers"});
  }

  const auto& band = config.unlicensed;
  if (!(band.capacity >= 0.0)) {
    report.errors.push_back({"/unlicensed/capacity", "must be nonnegative"});
  }
  check_latency(band.latency, "/unlicensed/latency", report);

  if (config.classes.empty() || config.classes.size() > 2) {
    report.errors.push_back({"/classes", "one or two customer classes are required"});
  }
  for (std::size_t t = 0; t < config.classes.size(); ++t) {
    const auto& cls = config.classes[t];
    const std::string path = "/classes/" + std::to_string(t);
    if (!(cls.weight > 0.0) || !std::isfinite(cls.weight)) {
      report.errors.push_back({path + "/weight", "must be a finite positive number"});
    }
    if (const auto* box = std::get_if<BoxDemand>(&cls.demand.kind)) {
      if (!(box->valuation > 0.0)) report.errors.push_back({path + "/demand/valuation", "must be positive"});
      if (!(box->mass > 0.0)) report.errors.push_back({path + "/demand/mass", "must be positive"});
    } else {
      const auto& lin = cls.demand.linear();
      if (!(lin.intercept > 0.0)) report.errors.push_back({path + "/demand/intercept", "must be positive"});
      if (!(lin.elasticity > 0.0)) report.errors.push_back({path + "/demand/elasticity", "must be positive"});
    }
  }
  if (config.classes.size() == 2) {
    const double wh = config.classes[0].weight;
    const double wl = config.classes[1].weight;
    if (wh < wl) {
      report.errors.push_back({"/classes", "two classes must be ordered high-weight first"});
    } else if (wh == wl) {
      report.warnings.push_back({"/classes", "both classes carry the same congestion weight"});
    }
  }
  if (!report.ok()) return report;

  // Regime checks for the single-incumbent homogeneous box family.
  const auto incumbents = config.incumbent_indices();
  if (incumbents.size() == 1 && config.classes.size() == 1 && config.classes[0].demand.is_box()) {
    const auto& l = *config.providers[incumbents[0]].licensed;
    const auto& cls = config.classes[0];
    const auto& box = cls.demand.box();
    if (l.is_linear()) {
      const double margin = box.valuation - cls.weight * l.offset;
      const double monopoly_mass = margin / (2.0 * cls.weight * l.slope);
      if (margin <= 0.0) {
        report.warnings.push_back(
            {"/classes/0/demand/valuation", "valuation does not exceed the licensed fixed cost; the incumbent serves nobody"});
      } else if (monopoly_mass >= box.mass) {
        report.warnings.push_back(
            {"/classes/0/demand",
             "monopoly serves all demand at zero unlicensed capacity (mass " + fmt_double(monopoly_mass) +
                 " >= " + fmt_double(box.mass) + "); the capacity threshold analysis does not apply"});
      } else {
        report.notes.push_back({"/classes/0/demand", "partial coverage at C=0 (monopoly mass " +
                                                         fmt_double(monopoly_mass) + ")"});
      }
    }
    if (band.present()) {
      const auto g = band.effective();
      if (!(g(box.mass) > l(0.0))) {
        report.warnings.push_back(
            {"/unlicensed", "unlicensed latency at full load does not exceed the licensed fixed cost"});
      }
      if (!(l(box.mass) > g(0.0))) {
        report.warnings.push_back(
            {"/providers", "licensed latency at full load does not exceed the unlicensed fixed cost"});
      }
    }
  }
  return report;
}

}  // namespace spectrum
