#include "spectrum/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "spectrum/error.hpp"

namespace spectrum {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::Parse, path + ": " + message);
}

const Json& member(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const Json& obj, const std::string& key, const std::string& path, std::optional<double> fallback = {}) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    fail(path + "." + key, "missing");
  }
  if (!it->is_number()) fail(path + "." + key, "expected a number");
  return it->get<double>();
}

std::string text(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = member(obj, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

LatencySpec latency(const Json& j, const std::string& path) {
  return {number(j, "offset", path, 0.0), number(j, "slope", path), number(j, "exponent", path, 1.0)};
}

Json latency_json(const LatencySpec& l) {
  return Json{{"offset", l.offset}, {"slope", l.slope}, {"exponent", l.exponent}};
}

Json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

MarketConfig parse_market(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    fail("$", std::string("malformed JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) fail("$", "expected an object");
  MarketConfig m;

  const Json& providers = member(doc, "providers", "$");
  if (!providers.is_array()) fail("$.providers", "expected an array");
  for (std::size_t i = 0; i < providers.size(); ++i) {
    const std::string path = "$.providers[" + std::to_string(i) + "]";
    const Json& p = providers[i];
    const std::string id = text(p, "id", path);
    const std::string kind = text(p, "kind", path);
    if (kind == "incumbent") {
      m.providers.push_back(ServiceProvider::incumbent(id, latency(member(p, "licensed", path), path + ".licensed")));
    } else if (kind == "entrant") {
      if (p.contains("licensed")) fail(path + ".licensed", "entrants have no licensed band");
      m.providers.push_back(ServiceProvider::entrant(id));
    } else {
      fail(path + ".kind", "expected \"incumbent\" or \"entrant\"");
    }
  }

  const Json& band = member(doc, "unlicensed", "$");
  m.unlicensed.capacity = number(band, "capacity", "$.unlicensed");
  if (band.contains("latency")) {
    m.unlicensed.latency = latency(band["latency"], "$.unlicensed.latency");
  } else {
    m.unlicensed.latency = LatencySpec{0.0, 1.0, 1.0};
  }

  const Json& classes = member(doc, "classes", "$");
  if (!classes.is_array()) fail("$.classes", "expected an array");
  for (std::size_t t = 0; t < classes.size(); ++t) {
    const std::string path = "$.classes[" + std::to_string(t) + "]";
    CustomerClass c;
    c.weight = number(classes[t], "weight", path, 1.0);
    const Json& d = member(classes[t], "demand", path);
    const std::string kind = text(d, "kind", path + ".demand");
    if (kind == "box") {
      c.demand.kind = BoxDemand{number(d, "valuation", path + ".demand"), number(d, "mass", path + ".demand", 1.0)};
    } else if (kind == "linear") {
      c.demand.kind = LinearDemand{number(d, "intercept", path + ".demand"), number(d, "elasticity", path + ".demand")};
    } else {
      fail(path + ".demand.kind", "expected \"box\" or \"linear\"");
    }
    m.classes.push_back(c);
  }
  return m;
}

MarketConfig load_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_market(ss.str());
}

std::string market_to_json(const MarketConfig& market) {
  Json providers = Json::array();
  for (const auto& sp : market.providers) {
    Json p{{"id", sp.id}, {"kind", sp.is_incumbent() ? "incumbent" : "entrant"}};
    if (sp.licensed) p["licensed"] = latency_json(*sp.licensed);
    providers.push_back(p);
  }
  Json classes = Json::array();
  for (const auto& c : market.classes) {
    Json d;
    if (c.demand.is_box()) {
      d = Json{{"kind", "box"}, {"valuation", c.demand.box().valuation}, {"mass", c.demand.box().mass}};
    } else {
      d = Json{{"kind", "linear"}, {"intercept", c.demand.linear().intercept},
               {"elasticity", c.demand.linear().elasticity}};
    }
    classes.push_back(Json{{"weight", c.weight}, {"demand", d}});
  }
  Json doc{{"providers", providers},
           {"unlicensed", Json{{"capacity", num(market.unlicensed.capacity)},
                               {"latency", latency_json(market.unlicensed.latency)}}},
           {"classes", classes}};
  return doc.dump(2) + "\n";
}

namespace {

Json result_json(const MarketConfig& market, const EquilibriumResult& r) {
  Json lic = Json::object(), unl = Json::object();
  for (const auto& [id, p] : r.prices.licensed) lic[id] = num(p);
  for (const auto& [id, p] : r.prices.unlicensed) unl[id] = num(p);

  Json alloc_l = Json::object(), alloc_u = Json::object();
  for (std::size_t i = 0; i < market.providers.size() && i < r.allocation.provider_count(); ++i) {
    Json a = Json::array(), b = Json::array();
    for (double v : r.allocation.licensed[i]) a.push_back(v);
    for (double v : r.allocation.unlicensed[i]) b.push_back(v);
    alloc_l[market.providers[i].id] = a;
    alloc_u[market.providers[i].id] = b;
  }
  Json served = Json::array(), xw_class = Json::array(), delivered = Json::array();
  for (std::size_t t = 0; t < r.allocation.class_count(); ++t) {
    served.push_back(r.allocation.served(t));
    xw_class.push_back(r.allocation.unlicensed_class(t));
  }
  for (double d : r.delivered.per_class) delivered.push_back(num(d));

  Json rev = Json::object();
  for (const auto& sp : market.providers) {
    if (auto it = r.report.revenues.find(sp.id); it != r.report.revenues.end()) rev[sp.id] = it->second;
  }

  Json diag{{"method", r.diagnostics.method},
            {"iterations", r.diagnostics.iterations},
            {"wardrop_residual", r.diagnostics.wardrop_residual},
            {"deviation_margin", r.diagnostics.deviation_margin ? num(*r.diagnostics.deviation_margin) : Json()},
            {"warnings", r.diagnostics.warnings}};
  if (r.diagnostics.certificate) diag["certificate"] = Json::parse(certificate_to_json(*r.diagnostics.certificate));

  Json out{{"capacity", num(r.capacity)},
           {"prices", Json{{"licensed", lic}, {"unlicensed", unl}}},
           {"allocation", Json{{"licensed", alloc_l}, {"unlicensed", alloc_u}}},
           {"served", served},
           {"unlicensed_total", r.allocation.unlicensed_total()},
           {"unlicensed_by_class", xw_class},
           {"delivered", delivered},
           {"social_welfare", r.report.social_welfare},
           {"consumer_surplus", r.report.consumer_surplus},
           {"revenues", rev},
           {"congestion_cost", r.report.total_congestion_cost},
           {"regime", to_string(r.regime)}};
  out["tie"] = r.tie ? Json{{"price", num(r.tie->price)}, {"regime", to_string(r.tie->regime)}} : Json();
  out["diagnostics"] = diag;
  return out;
}

void cell(std::ostringstream& os, double v) { os << ',' << format_number(v); }

}  // namespace

std::string result_to_json(const MarketConfig& market, const EquilibriumResult& result) {
  return result_json(market, result).dump(2) + "\n";
}

std::string validation_to_json(const ValidationReport& report) {
  auto list = [](const std::vector<Issue>& issues) {
    Json a = Json::array();
    for (const auto& i : issues) a.push_back(Json{{"path", i.path}, {"message", i.message}});
    return a;
  };
  Json out{{"ok", report.ok()},
           {"errors", list(report.errors)},
           {"warnings", list(report.warnings)},
           {"notes", list(report.notes)}};
  return out.dump(2) + "\n";
}

std::string certificate_to_json(const Certificate& c) {
  Json out{{"max_gain", c.max_gain},
           {"worst_deviator", c.worst_deviator},
           {"kind", to_string(c.kind)},
           {"deviation_price", c.deviation_price},
           {"max_unlicensed_gain", c.max_unlicensed_gain},
           {"resolution", c.resolution}};
  return out.dump(2) + "\n";
}

std::string deviation_to_json(const DeviationReport& d) {
  Json out{{"max_gain", d.max_gain},
           {"deviator", d.deviator},
           {"kind", to_string(d.kind)},
           {"deviation_price", d.deviation_price},
           {"max_unlicensed_gain", d.max_unlicensed_gain},
           {"unlicensed_prices_zero", d.unlicensed_prices_zero},
           {"no_service_condition", d.no_service_condition ? Json(*d.no_service_condition) : Json()},
           {"unlicensed_pricing_consistent", d.unlicensed_pricing_consistent}};
  return out.dump(2) + "\n";
}

std::string sweep_to_csv(const MarketConfig& market, const SweepResult& sweep) {
  const auto inc = market.incumbent_indices();
  const bool two = market.classes.size() == 2;
  std::ostringstream os;
  os << "C";
  for (std::size_t i : inc) os << ",price_" << market.providers[i].id;
  os << ",p_w,x_licensed_h,x_licensed_l,X_w_h,X_w_l,delivered_h,delivered_l,SW,CS";
  for (const auto& sp : market.providers) os << ",revenue_" << sp.id;
  os << ",regime\n";
  const std::size_t columns = inc.size() + 9 + market.providers.size();

  for (const auto& s : sweep.samples) {
    os << format_number(s.capacity);
    if (!s.result) {
      for (std::size_t k = 0; k < columns; ++k) os << ',';
      os << ",error\n";
      continue;
    }
    const auto& r = *s.result;
    for (std::size_t i : inc) {
      auto it = r.prices.licensed.find(market.providers[i].id);
      os << ',';
      if (it != r.prices.licensed.end()) os << format_number(it->second);
    }
    os << ',';
    if (!r.prices.unlicensed.empty()) {
      double pw = std::numeric_limits<double>::infinity();
      for (const auto& [id, p] : r.prices.unlicensed) pw = std::min(pw, p);
      os << format_number(pw);
    }
    cell(os, r.allocation.licensed_class(0));
    os << ',';
    if (two) os << format_number(r.allocation.licensed_class(1));
    cell(os, r.allocation.unlicensed_class(0));
    os << ',';
    if (two) os << format_number(r.allocation.unlicensed_class(1));
    cell(os, r.delivered.per_class.at(0));
    os << ',';
    if (two) os << format_number(r.delivered.per_class.at(1));
    cell(os, r.report.social_welfare);
    cell(os, r.report.consumer_surplus);
    for (const auto& sp : market.providers) {
      auto it = r.report.revenues.find(sp.id);
      cell(os, it == r.report.revenues.end() ? 0.0 : it->second);
    }
    os << ',' << to_string(r.regime) << '\n';
  }
  return os.str();
}

std::string sweep_to_json(const MarketConfig& market, const SweepResult& sweep) {
  Json samples = Json::array();
  for (const auto& s : sweep.samples) {
    if (s.result) {
      samples.push_back(result_json(market, *s.result));
    } else {
      samples.push_back(Json{{"capacity", s.capacity}, {"error", s.error}});
    }
  }
  Json out{{"samples", samples}, {"summary", Json::parse(breakpoints_to_json(sweep))}};
  return out.dump(2) + "\n";
}

std::string breakpoints_to_json(const SweepResult& sweep) {
  Json bps = Json::array();
  for (const auto& b : sweep.breakpoints) {
    Json j{{"capacity", b.capacity}, {"kind", to_string(b.kind)}, {"lo", b.lo}, {"hi", b.hi}};
    if (b.kind == BreakpointKind::PriceJump) {
      j["price_before"] = b.before;
      j["price_after"] = b.after;
    }
    if (b.kind == BreakpointKind::PriceJump || b.kind == BreakpointKind::RegimeSwitch) {
      j["regime_before"] = to_string(b.regime_before);
      j["regime_after"] = to_string(b.regime_after);
    }
    bps.push_back(j);
  }
  Json cf;
  if (sweep.closed_form) {
    const auto& t = *sweep.closed_form;
    cf = Json{{"C1", num(t.c1)}, {"C2", num(t.c2)}, {"S0", num(t.s0)}, {"S_C2", num(t.sc2)},
              {"efficiency", num(t.efficiency())}};
  }
  Json errors = Json::array();
  for (const auto& s : sweep.samples) {
    if (!s.result) errors.push_back(Json{{"capacity", s.capacity}, {"error", s.error}});
  }
  Json out{{"breakpoints", bps}, {"closed_form", cf}, {"errors", errors}};
  return out.dump(2) + "\n";
}

}  // namespace spectrum
