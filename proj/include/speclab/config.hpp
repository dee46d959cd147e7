#pragma once

// Declarative run configuration (JSON), its validation, and the report
// serializers shared by the command-line front end and the tests. A config
// plus a seed determines every output byte: doubles are printed in
// round-trip form and map-like structures keep insertion order.

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "speclab/asymptotics.hpp"
#include "speclab/chi.hpp"
#include "speclab/common.hpp"
#include "speclab/domain.hpp"
#include "speclab/kernels.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

using Json = nlohmann::ordered_json;

struct Budgets {
  std::uint64_t max_indices = 50000000ull;        // kernel / projector terms
  std::uint64_t max_quadrature_nodes = 2000000ull;  // adaptive quadrature
};

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> suites = {
      "leading", "trace", "interior", "offdiag", "boundary", "oracles"};
  return suites;
}

struct RunConfig {
  DomainSpec domain;
  RotationGenerator generator;
  ChiProfile chi;
  std::vector<double> k_ladder;
  std::vector<NamedPoint> points;
  std::vector<NamedPair> pairs;
  double interior_depth = 0.04;
  std::vector<std::string> suites;
  std::string out_dir = "out";
  std::uint64_t seed = 2026;
  Budgets budgets;
  std::map<std::string, double> tolerances;  // optional per-suite overrides

  double tolerance_or(const std::string& suite, double fallback) const {
    const auto it = tolerances.find(suite);
    return it == tolerances.end() ? fallback : it->second;
  }

  void validate() const {
    domain.validate();
    generator.validate();
    if (generator.n() != domain.n) {
      throw ConfigError("generator weight count must equal domain dimension");
    }
    chi.validate();
    detail::check_ladder(k_ladder);
    if (budgets.max_indices == 0 || budgets.max_quadrature_nodes == 0) {
      throw ConfigError("budgets must be positive");
    }
    if (interior_depth < 0.0) {
      throw ConfigError("interior_depth must be nonnegative");
    }
    for (const std::string& s : suites) {
      const auto& known = known_suites();
      if (std::find(known.begin(), known.end(), s) == known.end()) {
        throw ConfigError("unknown suite: " + s);
      }
    }
    for (const NamedPoint& p : points) {
      if (static_cast<int>(p.z.size()) != domain.n) {
        throw ConfigError("point " + p.id + " has wrong dimension");
      }
      if (p.id.empty()) throw ConfigError("points need nonempty ids");
    }
    for (const NamedPair& p : pairs) {
      if (static_cast<int>(p.z.size()) != domain.n ||
          static_cast<int>(p.w.size()) != domain.n) {
        throw ConfigError("pair " + p.id + " has wrong dimension");
      }
      if (p.id.empty()) throw ConfigError("pairs need nonempty ids");
    }
  }

  // Canonical fingerprint: a normalized serialization hashed with FNV-1a.
  std::string hash() const {
    std::ostringstream s;
    s << domain.n << "|";
    for (double a : domain.a) s << format_double(a) << ",";
    s << "|";
    for (double l : generator.lambda) s << format_double(l) << ",";
    s << "|" << format_double(chi.center) << "," << format_double(chi.radius)
      << "," << format_double(chi.amplitude) << "|";
    for (double k : k_ladder) s << format_double(k) << ",";
    s << "|";
    for (const NamedPoint& p : points) {
      s << p.id << ":";
      for (const Complex& c : p.z) {
        s << format_double(c.real()) << "+" << format_double(c.imag()) << "i,";
      }
      s << ";";
    }
    s << "|";
    for (const NamedPair& p : pairs) {
      s << p.id << ":";
      for (const Complex& c : p.z) {
        s << format_double(c.real()) << "+" << format_double(c.imag()) << "i,";
      }
      s << "/";
      for (const Complex& c : p.w) {
        s << format_double(c.real()) << "+" << format_double(c.imag()) << "i,";
      }
      s << ";";
    }
    s << "|" << format_double(interior_depth) << "|";
    for (const std::string& name : suites) s << name << ",";
    s << "|" << seed << "|" << budgets.max_indices << ","
      << budgets.max_quadrature_nodes;
    for (const auto& kv : tolerances) {
      s << "|" << kv.first << "=" << format_double(kv.second);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(s.str())));
    return std::string(buf);
  }
};

namespace detail {

inline std::vector<Complex> parse_point(const Json& j, int n,
                                        const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ConfigError(what + " must be an array of " + std::to_string(n) +
                      " coordinates");
  }
  std::vector<Complex> z;
  for (const Json& c : j) {
    if (c.is_number()) {
      z.emplace_back(c.get<double>(), 0.0);
    } else if (c.is_array() && c.size() == 2 && c[0].is_number() &&
               c[1].is_number()) {
      z.emplace_back(c[0].get<double>(), c[1].get<double>());
    } else {
      throw ConfigError(what + " coordinates must be numbers or [re, im]");
    }
  }
  return z;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  RunConfig cfg;
  try {
    const Json& dj = j.at("domain");
    const std::string kind = dj.value("kind", std::string("ball"));
    const int n = dj.at("n").get<int>();
    if (kind == "ball") {
      cfg.domain = Ball(n);
    } else if (kind == "ellipsoid") {
      cfg.domain = HermitianEllipsoid(n, dj.at("a").get<std::vector<double>>());
    } else {
      throw ConfigError("domain.kind must be \"ball\" or \"ellipsoid\"");
    }
    cfg.generator =
        RotationGenerator(j.at("generator").at("lambda").get<std::vector<double>>());
    const Json& cj = j.at("chi");
    cfg.chi.center = cj.at("center").get<double>();
    cfg.chi.radius = cj.at("radius").get<double>();
    cfg.chi.amplitude = cj.value("amplitude", 1.0);
    cfg.k_ladder = j.at("k_ladder").get<std::vector<double>>();
    for (const Json& pj : j.value("points", Json::array())) {
      NamedPoint p;
      p.id = pj.at("id").get<std::string>();
      p.z = detail::parse_point(pj.at("z"), cfg.domain.n, "point " + p.id);
      cfg.points.push_back(std::move(p));
    }
    for (const Json& pj : j.value("pairs", Json::array())) {
      NamedPair p;
      p.id = pj.at("id").get<std::string>();
      p.z = detail::parse_point(pj.at("z"), cfg.domain.n, "pair " + p.id);
      p.w = detail::parse_point(pj.at("w"), cfg.domain.n, "pair " + p.id);
      cfg.pairs.push_back(std::move(p));
    }
    cfg.interior_depth = j.value("interior_depth", 0.04);
    cfg.suites = j.value("suites", known_suites());
    cfg.out_dir = j.value("out_dir", std::string("out"));
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(2026));
    if (j.contains("budgets")) {
      const Json& bj = j.at("budgets");
      cfg.budgets.max_indices =
          bj.value("max_indices", cfg.budgets.max_indices);
      cfg.budgets.max_quadrature_nodes =
          bj.value("max_quadrature_nodes", cfg.budgets.max_quadrature_nodes);
    }
    // Bound to a named value: items() keeps a reference to its json, which
    // would dangle if the temporary from value() were fed to it directly.
    const Json tolerances = j.value("tolerances", Json::object());
    for (const auto& kv : tolerances.items()) {
      cfg.tolerances[kv.key()] = kv.value().get<double>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

// ----------------------------------------------------------------------------
// Report serialization.

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  Budgets budgets;
};

inline Json report_to_json(const AsymptoticsReport& rep,
                           const Provenance& prov) {
  Json j;
  j["claim"] = rep.claim;
  j["verdict"] = rep.pass ? "pass" : "fail";
  j["tolerance"] = rep.tolerance;
  j["k_ladder"] = rep.k_ladder;
  Json values = Json::object();
  for (const auto& kv : rep.values) values[kv.first] = kv.second;
  j["values"] = values;
  Json series = Json::object();
  for (const auto& kv : rep.series) series[kv.first] = kv.second;
  j["series"] = series;
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  j["provenance"] = Json{{"config_hash", prov.config_hash},
                         {"seed", prov.seed},
                         {"budgets",
                          Json{{"max_indices", prov.budgets.max_indices},
                               {"max_quadrature_nodes",
                                prov.budgets.max_quadrature_nodes}}}};
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << text;
}

inline std::string summary_csv(
    const std::vector<AsymptoticsReport>& reports) {
  std::ostringstream out;
  out << "claim,verdict,tolerance\n";
  for (const AsymptoticsReport& r : reports) {
    out << r.claim << "," << (r.pass ? "pass" : "fail") << ","
        << format_double(r.tolerance) << "\n";
  }
  return out.str();
}

}  // namespace speclab
