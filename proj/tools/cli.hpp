#ifndef REVGEO_TOOLS_CLI_HPP
#define REVGEO_TOOLS_CLI_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "revgeo/revgeo.hpp"
#include "svg.hpp"

namespace revgeo::cli {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kDomain = 2, kNumerical = 3, kIo = 4 };

inline int exit_code(const Error& e) {
  if (e.kind() == ErrorKind::Io) return kIo;
  return e.numerical() ? kNumerical : kDomain;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// One table cell: a number, an integer or text.
using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string csv_field(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
  if (const auto* i = std::get_if<long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

/// Numbers go through the 12-digit text form so JSON and CSV agree.
inline Json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(fmt(x).c_str(), nullptr);
}

inline Json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return json_number(*d);
  if (const auto* i = std::get_if<long>(&c)) return *i;
  return std::get<std::string>(c);
}

inline Json json_rows(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

struct Options {
  double a = 2.0, b = 1.0;
  std::string format = "csv";
  std::string out;
  std::string config;
  double tol = 1e-5;
  double ell = 1.0;
  double beta0 = 0.119;
  int m = 0, n = 0, p = 0;
  double lambda_max = 100.0;
  double chi_min = -std::numbers::pi, chi_max = std::numbers::pi;
  int samples = 401;
  std::vector<double> energy;
  bool verify = false;
  double r1 = 0.0, theta1 = 0.0, r2 = 0.0, theta2 = std::numbers::pi;
  int winding = 2;
  double k1 = 1.0, k2 = 0.0;
};

struct Output {
  Table table;
  Json extra = Json::object();  // command-specific JSON fields
  std::vector<std::string> warnings;
  std::string svg;
  int status = kOk;
  std::string message;
};

inline Json surface_json(const SurfaceSpec& s) {
  return {{"a", json_number(s.a)}, {"b", json_number(s.b)}, {"c", json_number(s.c)},
          {"family", to_string(s.family)}};
}

inline double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// --- potential -------------------------------------------------------------

inline Output cmd_potential(const Options& o) {
  const SurfaceSpec s = make_torus(o.a, o.b);
  if (!(o.chi_max > o.chi_min) || o.samples < 2) {
    throw Error(ErrorKind::InvalidParameter, "need chi-min < chi-max and at least 2 samples");
  }
  Output out;
  out.table.columns = {"chi", "r", "U"};
  std::vector<std::pair<double, double>> pts;
  double top = 0.0;
  for (int i = 0; i < o.samples; ++i) {
    const double chi =
        i == o.samples - 1 ? o.chi_max : o.chi_min + i * (o.chi_max - o.chi_min) / (o.samples - 1);
    const double U = effective_potential(s, o.ell, chi * s.b);
    out.table.rows.push_back({chi, chi * s.b, U});
    pts.push_back({chi, U});
    if (std::isfinite(U)) top = std::max(top, U);
  }
  const double U0 = effective_potential(s, o.ell, 0.0);
  double ymax = std::min(top, 10.0 * U0);
  for (double E : o.energy) ymax = std::max(ymax, E);
  ymax = ymax > 0.0 ? 1.1 * ymax : 1.0;
  // Walls at the axis are drawn clipped at the top of the frame.
  for (auto& [x, y] : pts)
    if (std::isinf(y) || y > ymax) y = ymax;
  svg::Plot plot(o.chi_min, o.chi_max, 0.0, ymax);
  plot.title("effective potential, " + std::string(to_string(s.family)) + " torus, ell = " + fmt(o.ell));
  plot.labels("chi", "U");
  plot.path(pts);
  for (std::size_t i = 0; i < o.energy.size(); ++i)
    plot.hline(o.energy[i], svg::palette(i + 1), "E = " + fmt(o.energy[i]));
  out.svg = plot.str();
  out.extra["ell"] = json_number(o.ell);
  Json levels = Json::array();
  for (double E : o.energy) levels.push_back(json_number(E));
  out.extra["energies"] = levels;
  return out;
}

// --- geodesic --------------------------------------------------------------

inline Output cmd_geodesic(const Options& o) {
  const SurfaceSpec s = make_torus(o.a, o.b);
  double beta0 = o.beta0, r0 = 0.0, lmax = o.lambda_max;
  Output out;
  if (o.m != 0 || o.n != 0) {
    const ClosedGeodesic g = find_closed(s, {o.m, o.n, o.p});
    beta0 = g.beta0;
    r0 = g.start_r;
    lmax = g.period_length;
    out.extra["label"] = to_string(g.label);
  }
  if (!std::isfinite(beta0)) throw Error(ErrorKind::InvalidParameter, "beta0 must be finite");
  if (!(lmax > 0.0)) throw Error(ErrorKind::InvalidParameter, "lambda-max must be positive");
  IntegratorConfig cfg;
  cfg.max_lambda = lmax;
  const OrbitTrace tr = integrate(s, state_at(s, r0, 0.0, beta0, 1.0), cfg);

  out.table.columns = {"lambda", "r", "theta", "vr", "vtheta", "E", "ell", "event"};
  auto row = [&](const GeodesicState& st, const std::string& ev) {
    const auto c = conserved(s, st);
    out.table.rows.push_back({st.lambda, st.r, st.theta, st.vr, st.vtheta, c.E, c.ell, ev});
  };
  std::size_t e = 0;
  for (const auto& st : tr.states) {
    while (e < tr.events.size() && tr.events[e].lambda < st.lambda) {
      row(tr.events[e].state, to_string(tr.events[e].kind));
      ++e;
    }
    row(st, "");
  }
  for (; e < tr.events.size(); ++e) row(tr.events[e].state, to_string(tr.events[e].kind));
  if (tr.status == TraceStatus::Failed) {
    out.table.rows.push_back({tr.final_lambda(), NAN, NAN, NAN, NAN, NAN, NAN, std::string("failed")});
    out.status = kNumerical;
    out.message = "integration failed: " + tr.message;
  }

  // Unit-square (Xi, Theta) = (chi / 2 pi, theta / 2 pi) mod 1.
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::pair<double, double>> pts;
  const int samples = 4000;
  const double lend = tr.final_lambda();
  double px = NAN, py = NAN;
  for (int i = 0; i <= samples; ++i) {
    const GeodesicState st = tr.at(lend * i / samples);
    double xi = st.r / s.b / two_pi, th = st.theta / two_pi;
    xi -= std::floor(xi);
    th -= std::floor(th);
    if (std::isfinite(px) && (std::abs(xi - px) > 0.5 || std::abs(th - py) > 0.5)) pts.push_back({NAN, NAN});
    pts.push_back({xi, th});
    px = xi;
    py = th;
  }
  svg::Plot plot(0.0, 1.0, 0.0, 1.0, 520, 520);
  plot.title("geodesic, beta0 = " + fmt(beta0));
  plot.labels("Xi = chi / 2pi", "Theta = theta / 2pi");
  plot.path(pts);
  out.svg = plot.str();
  out.extra["beta0"] = json_number(beta0);
  out.extra["start_r"] = json_number(r0);
  out.extra["lambda_max"] = json_number(lmax);
  out.extra["trace_status"] = to_string(tr.status);
  out.extra["max_energy_drift"] = json_number(tr.max_energy_drift);
  return out;
}

// --- spectrum --------------------------------------------------------------

inline Output cmd_spectrum(const Options& o) {
  const SurfaceSpec s = make_torus(o.a, o.b);
  const int m_max = o.m > 0 ? o.m : 5, n_max = o.n > 0 ? o.n : 5;
  const auto entries = spectrum(s, m_max, n_max);
  Output out;
  out.table.columns = {"label", "m", "n", "p", "status", "beta0_rad", "beta0_deg", "start_r",
                       "length", "frequency", "residual", "verify_residual"};
  int bad = 0;
  for (const auto& en : entries) {
    const auto& l = en.label;
    std::vector<Cell> row{to_string(l), long{l.m}, long{l.n}, long{l.p}};
    if (!en.geodesic) {
      row.push_back(std::string(to_string(*en.error)));
      for (int i = 0; i < 7; ++i) row.push_back(NAN);
    } else {
      const ClosedGeodesic& g = *en.geodesic;
      double vr = NAN;
      if (o.verify) {
        try {
          vr = verify_closure(s, g);
        } catch (const Error& e) {
          out.warnings.push_back(to_string(l) + ": " + e.what());
        }
        if (!(vr <= o.tol)) ++bad;
      }
      row.insert(row.end(), {std::string("ok"), g.beta0, deg(g.beta0), g.start_r, g.period_length,
                             g.frequency, g.closure_residual, vr});
    }
    out.table.rows.push_back(std::move(row));
  }
  if (bad) {
    out.status = kNumerical;
    out.message = std::to_string(bad) + " label(s) exceed the closure tolerance " + fmt(o.tol);
  }

  // Frequency curves with the solved labels marked.
  const double pi = std::numbers::pi;
  const auto crit = critical_angles(s);
  svg::Plot plot(0.0, pi / 2.0, 0.0, 4.0);
  plot.title("theta frequency N(beta0)");
  plot.labels("beta0", "N");
  std::vector<std::pair<double, double>> bound, unbound;
  const double lo = crit.beta_crit.value_or(0.0);
  for (int i = 1; i < 400; ++i) {
    const double x = lo + (pi / 2.0 - lo) * i / 400.0;
    try {
      bound.push_back({x, theta_frequency_bound(s, x)});
    } catch (const Error&) {
    }
    if (crit.beta_crit) {
      const double y = *crit.beta_crit * i / 400.0;
      try {
        unbound.push_back({y, theta_frequency_unbound(s, y)});
      } catch (const Error&) {
      }
    }
  }
  plot.path(bound, svg::palette(0));
  plot.path(unbound, svg::palette(1));
  for (const auto& en : entries) {
    if (!en.geodesic || en.label.m == 0 || en.label.n == 0) continue;
    const double x = en.geodesic->beta0, y = static_cast<double>(en.label.m) / en.label.n;
    plot.path({{x - 0.004, y}, {x + 0.004, y}}, "#000", 2.0);
    plot.text(x, y, to_string(en.label));
  }
  out.svg = plot.str();
  out.extra["m_max"] = m_max;
  out.extra["n_max"] = n_max;
  out.extra["verified"] = o.verify;
  return out;
}

// --- bvp ------------------------------------------------------------------

inline Output cmd_bvp(const Options& o) {
  const SurfaceSpec s = make_torus(o.a, o.b);
  const BvpResult res = solve_two_point(s, {o.r1, o.theta1, o.r2, o.theta2, o.winding});
  Output out;
  out.table.columns = {"rank", "turning", "p_theta", "beta1_rad", "beta1_deg", "r_ext",
                       "azimuth_winding", "radial_winding", "length", "endpoint_error", "tie"};
  const double two_pi = 2.0 * std::numbers::pi;
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    const auto& sol = res.solutions[i];
    out.table.rows.push_back({static_cast<long>(i + 1), std::string(to_string(sol.turning)), sol.p_theta,
                              sol.beta1, deg(sol.beta1), sol.r_ext.value_or(NAN),
                              long{sol.azimuth_winding}, long{sol.radial_winding}, sol.arc_length,
                              sol.endpoint_error, std::string(sol.tie ? "yes" : "no")});
    for (const auto& [r, th] : sol.polyline) {
      xlo = std::min(xlo, th / two_pi);
      xhi = std::max(xhi, th / two_pi);
      ylo = std::min(ylo, r / s.b / two_pi);
      yhi = std::max(yhi, r / s.b / two_pi);
    }
  }
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  if (!(yhi > ylo)) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  svg::Plot plot(xlo, xhi, ylo, yhi);
  plot.title("two-point geodesics");
  plot.labels("theta / 2pi", "chi / 2pi");
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [r, th] : res.solutions[i].polyline) pts.push_back({th / two_pi, r / s.b / two_pi});
    plot.path(pts, svg::palette(i), i == 0 ? 2.0 : 1.0);
  }
  out.svg = plot.str();
  Json br = Json::array();
  for (const auto& b : res.branches) br.push_back(b);
  out.extra["branches"] = br;
  return out;
}

// --- flat -----------------------------------------------------------------

inline Output cmd_flat(const Options& o) {
  const int m_max = o.m > 0 ? o.m : 6, n_max = o.n > 0 ? o.n : 6;
  const auto lattice = flat_lattice(m_max, n_max);
  Output out;
  out.table.columns = {"label", "m", "n", "length"};
  svg::Plot plot(0.0, m_max, 0.0, n_max, 520, 520);
  plot.title("primitive period pairs [m,n]");
  plot.labels("m", "n");
  for (const auto& e : lattice) {
    out.table.rows.push_back({to_string(e.label), long{e.label.m}, long{e.label.n}, e.length});
    plot.path({{0.0, 0.0}, {double(e.label.m), double(e.label.n)}}, svg::palette(0), 0.8);
  }
  out.svg = plot.str();
  return out;
}

// --- kepler ---------------------------------------------------------------

inline Output cmd_kepler(const Options& o) {
  const ForceParams f{o.k1, o.k2};
  const std::vector<double> energies = o.energy.empty() ? std::vector<double>{-0.3} : o.energy;
  const auto circ = circular_radii(f, o.ell);
  Output out;
  out.table.columns = {"E", "classes", "pericenter", "apocenter", "apsidal_rad", "precession"};
  for (double E : energies) {
    std::string classes;
    try {
      for (auto c : classify_orbit(f, o.ell, E)) classes += (classes.empty() ? "" : "+") + std::string(to_string(c));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoMotion) throw;
      classes = "no-motion";
    }
    std::vector<Cell> row{E, classes};
    try {
      const ApsidalData a = apsidal(f, o.ell, E);
      row.insert(row.end(), {a.pericenter, a.apocenter, a.apsidal_angle, a.precession});
    } catch (const Error&) {
      row.insert(row.end(), {NAN, NAN, NAN, NAN});
    }
    out.table.rows.push_back(std::move(row));
  }
  Json cj = Json::array();
  for (const auto& c : circ) {
    Json j{{"r", json_number(c.r)}, {"stability", to_string(c.stability)}};
    j["kappa"] = c.stability == Stability::Stable ? json_number(epicyclic_frequency(f, o.ell, c.r)) : Json(nullptr);
    j["orbital_frequency"] = json_number(std::abs(o.ell) / (c.r * c.r));
    cj.push_back(j);
  }
  out.extra["k1"] = json_number(o.k1);
  out.extra["k2"] = json_number(o.k2);
  out.extra["ell"] = json_number(o.ell);
  out.extra["circular"] = cj;

  // Total potential with energy levels.
  double r_lo = 0.05, r_hi = 5.0;
  for (const auto& c : circ) {
    r_lo = std::min(r_lo, 0.5 * c.r);
    r_hi = std::max(r_hi, 4.0 * c.r);
  }
  std::vector<std::pair<double, double>> pts;
  double vmin = 0.0, vmax = 0.0;
  for (int i = 0; i <= 800; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / 800.0;
    const double v = total_potential(f, o.ell, r);
    pts.push_back({r, v});
  }
  for (const auto& c : circ) {
    const double v = total_potential(f, o.ell, c.r);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  for (double E : energies) {
    vmin = std::min(vmin, E);
    vmax = std::max(vmax, E);
  }
  const double pad = 0.2 * std::max(vmax - vmin, 0.1);
  svg::Plot plot(r_lo, r_hi, vmin - pad, vmax + pad);
  plot.title("total potential, k1 = " + fmt(o.k1) + ", k2 = " + fmt(o.k2));
  plot.labels("r", "V");
  plot.path(pts);
  for (std::size_t i = 0; i < energies.size(); ++i)
    plot.hline(energies[i], svg::palette(i + 1), "E = " + fmt(energies[i]));
  out.svg = plot.str();
  return out;
}

// --- expmap ---------------------------------------------------------------

inline Output cmd_expmap(const Options& o) {
  const SurfaceSpec s = make_torus(o.a, o.b);
  const int m_max = o.m > 0 ? o.m : 3, n_max = o.n > 0 ? o.n : 3;
  std::vector<ClosedLabel> labels;
  for (const auto& en : spectrum(s, m_max, n_max))
    if (en.geodesic && en.label.m > 0 && en.label.n > 0) labels.push_back(en.label);
  ExpMapRays rays = exp_map_rays(s, labels);
  std::sort(rays.rays.begin(), rays.rays.end(), [](const Ray& x, const Ray& y) {
    return x.length != y.length ? x.length < y.length : x.name < y.name;
  });
  Output out;
  out.warnings = rays.warnings;
  out.table.columns = {"name", "beta0_rad", "beta0_deg", "length"};
  double reach = 1.0;
  for (const auto& r : rays.rays) {
    out.table.rows.push_back({r.name, r.beta0, deg(r.beta0), r.length});
    reach = std::max(reach, r.length);
  }
  // Tangent plane at the origin: meridian direction up, equator direction right.
  svg::Plot plot(0.0, 1.05 * reach, 0.0, 1.05 * reach, 520, 520);
  plot.title("closed geodesics through the origin");
  plot.labels("L sin(beta0)", "L cos(beta0)");
  for (std::size_t i = 0; i < rays.rays.size(); ++i) {
    const auto& r = rays.rays[i];
    const double x = r.length * std::sin(r.beta0), y = r.length * std::cos(r.beta0);
    plot.path({{0.0, 0.0}, {x, y}}, svg::palette(i));
    plot.text(x, y, r.name);
  }
  out.svg = plot.str();
  return out;
}

// --- driver ---------------------------------------------------------------

inline void write_output(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  f << data;
  f.flush();
  if (!f) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

inline std::string render(const std::string& command, const Options& o, const Output& r) {
  if (o.format == "csv") return to_csv(r.table);
  if (o.format == "svg") return r.svg;
  Json j;
  j["schema"] = "revgeo/1";
  j["command"] = command;
  if (command != "flat" && command != "kepler") j["surface"] = surface_json(make_torus(o.a, o.b));
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) j[it.key()] = it.value();
  Json cols = Json::array();
  for (const auto& c : r.table.columns) cols.push_back(c);
  j["columns"] = cols;
  j["rows"] = json_rows(r.table);
  Json w = Json::array();
  for (const auto& s : r.warnings) w.push_back(s);
  j["warnings"] = w;
  j["status"] = r.status == kOk ? "ok" : "failed";
  return j.dump(2) + "\n";
}

/// Fills options absent from the command line with values from a JSON file
/// whose keys are the long flag names.
inline void apply_config(CLI::App& app, CLI::App& sub, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
  Json cfg;
  try {
    cfg = Json::parse(f);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Io, "config '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw Error(ErrorKind::InvalidParameter, "config '" + path + "' must be an object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string flag = "--" + it.key();
    CLI::Option* opt = sub.get_option_no_throw(flag);
    if (!opt) {
      bool known = false;
      for (const auto* other : app.get_subcommands({}))
        known = known || other->get_option_no_throw(flag) != nullptr;
      if (!known) throw Error(ErrorKind::InvalidParameter, "unknown config key '" + it.key() + "'");
      continue;
    }
    if (opt->count() > 0 || it.key() == "config") continue;
    std::vector<std::string> vals;
    auto text = [](const Json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      if (v.is_number_integer()) return std::to_string(v.get<long>());
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return std::string(buf);
    };
    if (it->is_array())
      for (const auto& v : *it) vals.push_back(text(v));
    else
      vals.push_back(text(*it));
    for (const auto& v : vals) opt->add_result(v);
    opt->run_callback();
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"revgeo: geodesics on tori and other surfaces of revolution", "revgeo"};
  app.require_subcommand(1);

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--a", o.a, "distance from the axis to the tube centre");
    sub->add_option("--b", o.b, "tube radius");
    sub->add_option("--format", o.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_option("--out", o.out, "output path (stdout when omitted)");
    sub->add_option("--config", o.config, "JSON file with defaults keyed by flag name");
    sub->add_option("--tol", o.tol, "tolerance for verification");
  };

  auto* pot = app.add_subcommand("potential", "effective potential U(chi)");
  common(pot);
  pot->add_option("--ell", o.ell, "angular momentum");
  pot->add_option("--chi-min", o.chi_min);
  pot->add_option("--chi-max", o.chi_max);
  pot->add_option("--samples", o.samples);
  pot->add_option("--energy", o.energy, "energy levels to overlay");

  auto* geo = app.add_subcommand("geodesic", "integrate a geodesic from the outer equator");
  common(geo);
  geo->add_option("--beta0", o.beta0, "launch angle from the meridian");
  geo->add_option("--lambda-max", o.lambda_max, "arc length to integrate");
  geo->add_option("--m", o.m, "closed label: radial oscillations");
  geo->add_option("--n", o.n, "closed label: revolutions");
  geo->add_option("--p", o.p, "closed label: 1 if it crosses the inner equator")->check(CLI::Range(0, 1));

  auto* spe = app.add_subcommand("spectrum", "closed geodesics [m,n;p]");
  common(spe);
  spe->add_option("--m", o.m, "largest m (default 5)");
  spe->add_option("--n", o.n, "largest n (default 5)");
  spe->add_flag("--verify", o.verify, "re-integrate each closed geodesic");

  auto* bvp = app.add_subcommand("bvp", "geodesics joining two points");
  common(bvp);
  bvp->add_option("--r1", o.r1);
  bvp->add_option("--theta1", o.theta1);
  bvp->add_option("--r2", o.r2);
  bvp->add_option("--theta2", o.theta2);
  bvp->add_option("--winding", o.winding, "extra azimuthal windings to search");

  auto* flat = app.add_subcommand("flat", "closed geodesics of the flat square torus");
  common(flat);
  flat->add_option("--m", o.m, "largest m (default 6)");
  flat->add_option("--n", o.n, "largest n (default 6)");

  auto* kep = app.add_subcommand("kepler", "central-force orbits in -k1/r - k2/r^3");
  common(kep);
  kep->add_option("--k1", o.k1);
  kep->add_option("--k2", o.k2);
  kep->add_option("--ell", o.ell, "angular momentum");
  kep->add_option("--energy", o.energy, "orbit energies (default -0.3)");

  auto* exp = app.add_subcommand("expmap", "closed geodesics as rays in the tangent plane");
  common(exp);
  exp->add_option("--m", o.m, "largest m (default 3)");
  exp->add_option("--n", o.n, "largest n (default 3)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "revgeo: " << e.what() << "\n";
    return kDomain;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    if (!o.config.empty()) apply_config(app, *sub, o.config);
    Output r;
    if (command == "potential") r = cmd_potential(o);
    else if (command == "geodesic") r = cmd_geodesic(o);
    else if (command == "spectrum") r = cmd_spectrum(o);
    else if (command == "bvp") r = cmd_bvp(o);
    else if (command == "flat") r = cmd_flat(o);
    else if (command == "kepler") r = cmd_kepler(o);
    else r = cmd_expmap(o);
    write_output(o.out, render(command, o, r), out);
    for (const auto& w : r.warnings) err << "revgeo: warning: " << w << "\n";
    if (r.status != kOk) err << "revgeo: " << r.message << "\n";
    return r.status;
  } catch (const Error& e) {
    err << "revgeo: " << e.what() << "\n";
    return exit_code(e);
  } catch (const CLI::ParseError& e) {
    err << "revgeo: config: " << e.what() << "\n";
    return kDomain;
  }
}

}  // namespace revgeo::cli

#endif  // REVGEO_TOOLS_CLI_HPP
