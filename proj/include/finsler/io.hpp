#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/circles.hpp"
#include "finsler/conformal.hpp"
#include "finsler/connection.hpp"
#include "finsler/linalg.hpp"

namespace finsler::io {

using nlohmann::json;

inline const char* to_string(TransportMode m) {
  return m == TransportMode::BaseCurve ? "base-curve" : "velocity-lift";
}

inline TransportMode transport_mode_from(const std::string& s) {
  if (s == "base-curve") return TransportMode::BaseCurve;
  if (s == "velocity-lift") return TransportMode::VelocityLift;
  throw std::invalid_argument("unknown transport mode '" + s + "'");
}

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::domain_error(std::string("refusing to serialize non-finite ") + what);
}

inline json finite_array(const Vec& v, const char* what) {
  json arr = json::array();
  for (double c : v) {
    require_finite(c, what);
    arr.push_back(c);
  }
  return arr;
}

inline Vec vec_from(const json& j) { return j.get<Vec>(); }

}  // namespace detail

/* Trace schema:
 * {
 *   "metric": "<spec string>", "kind": "circle"|"geodesic", "mode": "...",
 *   "k": <number>,
 *   "grid": {"s0":..., "ds":..., "count":...},
 *   "states": [[ [x...], [u...], [v...] ], ...]   (no [v...] for geodesics)
 *   "residuals": {"unit":[...], "orth":[...], "curv":[...]},
 *   "summary": {"max_unit":..., "max_orth":..., "max_curv":...,
 *               "aborted":..., "diagnostic":"...",
 *               "steps":..., "rhs_evals":..., "rejected":...}
 * }
 */
inline json trace_to_json(const CircleTrace& trace) {
  const bool circle = trace.kind == "circle";
  json states = json::array();
  for (const CurveState& st : trace.states) {
    json entry = json::array();
    entry.push_back(detail::finite_array(st.x, "position"));
    entry.push_back(detail::finite_array(st.u, "velocity"));
    if (circle) entry.push_back(detail::finite_array(st.v, "curvature vector"));
    states.push_back(std::move(entry));
  }
  json residuals;
  residuals["unit"] = detail::finite_array(trace.res_unit, "residual");
  if (circle) {
    residuals["orth"] = detail::finite_array(trace.res_orth, "residual");
    residuals["curv"] = detail::finite_array(trace.res_curv, "residual");
  }
  json j;
  j["metric"] = trace.metric;
  j["kind"] = trace.kind;
  j["mode"] = to_string(trace.mode);
  j["k"] = trace.k;
  j["grid"] = {{"s0", trace.s0}, {"ds", trace.ds}, {"count", trace.states.size()}};
  j["states"] = std::move(states);
  j["residuals"] = std::move(residuals);
  j["summary"] = {{"max_unit", max_abs(trace.res_unit)},
                  {"max_orth", max_abs(trace.res_orth)},
                  {"max_curv", max_abs(trace.res_curv)},
                  {"aborted", trace.aborted},
                  {"diagnostic", trace.diagnostic},
                  {"steps", trace.stats.steps},
                  {"rhs_evals", trace.stats.rhs_evals},
                  {"rejected", trace.stats.rejected}};
  return j;
}

inline CircleTrace trace_from_json(const json& j) {
  CircleTrace trace;
  trace.metric = j.at("metric").get<std::string>();
  trace.kind = j.at("kind").get<std::string>();
  trace.mode = transport_mode_from(j.at("mode").get<std::string>());
  trace.k = j.at("k").get<double>();
  trace.s0 = j.at("grid").at("s0").get<double>();
  trace.ds = j.at("grid").at("ds").get<double>();
  const bool circle = trace.kind == "circle";
  for (const json& entry : j.at("states")) {
    CurveState st;
    st.x = detail::vec_from(entry.at(0));
    st.u = detail::vec_from(entry.at(1));
    st.v = circle ? detail::vec_from(entry.at(2)) : Vec(st.x.size(), 0.0);
    trace.states.push_back(std::move(st));
  }
  if (trace.states.size() != j.at("grid").at("count").get<std::size_t>())
    throw std::invalid_argument("trace: grid count disagrees with states");
  trace.res_unit = detail::vec_from(j.at("residuals").at("unit"));
  if (circle) {
    trace.res_orth = detail::vec_from(j.at("residuals").at("orth"));
    trace.res_curv = detail::vec_from(j.at("residuals").at("curv"));
  }
  const json& s = j.at("summary");
  trace.aborted = s.at("aborted").get<bool>();
  trace.diagnostic = s.at("diagnostic").get<std::string>();
  trace.stats.steps = s.at("steps").get<std::size_t>();
  trace.stats.rhs_evals = s.at("rhs_evals").get<std::size_t>();
  trace.stats.rejected = s.at("rejected").get<std::size_t>();
  return trace;
}

inline std::string fmt17(double v) {
  detail::require_finite(v, "number");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV mirror of the trace states, one row per sample:
/// s, x1..xn, u1..un, v1..vn, res_unit[, res_orth, res_curv]
inline std::string trace_to_csv(const CircleTrace& trace) {
  const bool circle = trace.kind == "circle";
  const std::size_t n = trace.states.empty() ? 0 : trace.states.front().x.size();
  std::ostringstream out;
  out << "s";
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",u" << i;
  if (circle)
    for (std::size_t i = 1; i <= n; ++i) out << ",v" << i;
  out << ",res_unit";
  if (circle) out << ",res_orth,res_curv";
  out << "\n";
  for (std::size_t j = 0; j < trace.states.size(); ++j) {
    out << fmt17(trace.s0 + trace.ds * static_cast<double>(j));
    for (double c : trace.states[j].x) out << "," << fmt17(c);
    for (double c : trace.states[j].u) out << "," << fmt17(c);
    if (circle)
      for (double c : trace.states[j].v) out << "," << fmt17(c);
    out << "," << fmt17(trace.res_unit[j]);
    if (circle) out << "," << fmt17(trace.res_orth[j]) << "," << fmt17(trace.res_curv[j]);
    out << "\n";
  }
  return out.str();
}

/// Reads a curve from trace CSV (or any CSV whose header starts s,x1,...).
inline CurveSampling curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  std::size_t n = 0, ucols = 0;
  {
    std::istringstream head(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(head, col, ',')) cols.push_back(col);
    if (cols.empty() || cols[0] != "s") throw std::invalid_argument("csv: header must start with s");
    for (const std::string& c : cols) {
      if (c.size() >= 2 && c[0] == 'x' && std::isdigit(static_cast<unsigned char>(c[1]))) ++n;
      if (c.size() >= 2 && c[0] == 'u' && std::isdigit(static_cast<unsigned char>(c[1]))) ++ucols;
    }
    if (n == 0) throw std::invalid_argument("csv: no coordinate columns");
  }
  std::vector<Vec> xs, us;
  Vec ts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    Vec vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() < 1 + n + ucols) throw std::invalid_argument("csv: short row");
    ts.push_back(vals[0]);
    xs.emplace_back(vals.begin() + 1, vals.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    if (ucols == n)
      us.emplace_back(vals.begin() + 1 + static_cast<std::ptrdiff_t>(n),
                      vals.begin() + 1 + static_cast<std::ptrdiff_t>(2 * n));
  }
  if (ts.size() < 7) throw std::invalid_argument("csv: need at least 7 samples");
  const double dt = ts[1] - ts[0];
  for (std::size_t j = 1; j + 1 < ts.size(); ++j)
    if (std::abs(ts[j + 1] - ts[j] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("csv: grid is not uniform");
  return make_curve_sampling(ts[0], dt, std::move(xs), std::move(us));
}

inline json connection_to_json(const ConnectionSample& cs) {
  const std::size_t n = cs.n;
  auto mat = [&](const Mat& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < n; ++j) {
        detail::require_finite(m(i, j), "tensor entry");
        row.push_back(m(i, j));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  auto ten = [&](const Tensor3& t) {
    json blocks = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json rows = json::array();
      for (std::size_t j = 0; j < n; ++j) {
        json row = json::array();
        for (std::size_t k = 0; k < n; ++k) {
          detail::require_finite(t(i, j, k), "tensor entry");
          row.push_back(t(i, j, k));
        }
        rows.push_back(std::move(row));
      }
      blocks.push_back(std::move(rows));
    }
    return blocks;
  };
  json j;
  j["g"] = mat(cs.g);
  j["ginv"] = mat(cs.ginv);
  j["cartan"] = ten(cs.C);
  j["spray"] = detail::finite_array(cs.spray, "spray");
  j["N"] = mat(cs.N);
  j["Gamma"] = ten(cs.Gamma);
  return j;
}

inline json conformal_report_to_json(const ConformalReport& rep) {
  json probes = json::array();
  for (const ConformalProbe& p : rep.probes)
    probes.push_back({{"point", detail::finite_array(p.point, "point")},
                      {"sigma_hat", p.sigma_hat},
                      {"variance", p.variance},
                      {"tensor_residual", p.tensor_residual}});
  json j;
  j["verdict"] = to_string(rep.verdict);
  j["probes"] = std::move(probes);
  j["worst_variance"] = rep.worst_variance;
  if (!rep.worst_point.empty()) {
    j["worst_point"] = detail::finite_array(rep.worst_point, "point");
    j["worst_y1"] = detail::finite_array(rep.worst_y1, "direction");
    j["worst_y2"] = detail::finite_array(rep.worst_y2, "direction");
  }
  return j;
}

inline json preservation_report_to_json(const PreservationReport& rep) {
  json records = json::array();
  for (const CircleRecord& rec : rep.records) {
    json r;
    r["X"] = detail::finite_array(rec.X, "direction");
    r["Y"] = detail::finite_array(rec.Y, "direction");
    r["k"] = rec.k;
    r["gbar_XY"] = rec.gbar_XY;
    r["image_class"] = to_string(rec.image_class);
    r["image_max_rho"] = rec.image_max_rho;
    r["curvature_ratio"] = rec.curvature_ratio;
    r["integrator_error"] = rec.integrator_error;
    r["note"] = rec.note;
    records.push_back(std::move(r));
  }
  json j;
  j["verdict"] = to_string(rep.verdict);
  j["records"] = std::move(records);
  j["mean_curvature_ratio"] = rep.mean_curvature_ratio;
  j["errors"] = rep.errors;
  return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace finsler::io
