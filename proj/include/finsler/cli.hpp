#pragma once

#include <cmath>
#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsler/circles.hpp"
#include "finsler/conformal.hpp"
#include "finsler/connection.hpp"
#include "finsler/io.hpp"
#include "finsler/metric_spec.hpp"
#include "finsler/transport.hpp"

namespace finsler::cli {

namespace detail {

inline Vec parse_vector(const std::string& text) {
  return spec_detail::parse_numbers(text, 0);
}

// "--at x;y" values: point and direction separated by ';'
inline std::pair<Vec, Vec> parse_at(const std::string& text) {
  const std::size_t semi = text.find(';');
  if (semi == std::string::npos)
    throw std::invalid_argument("--at expects 'x1,..,xn;y1,..,yn'");
  return {parse_vector(text.substr(0, semi)), parse_vector(text.substr(semi + 1))};
}

inline void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) std::cout << contents;
  else
    io::write_file(out_path, contents);
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline CurveSampling load_curve(const std::string& path) {
  const std::string text = io::read_file(path);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const CircleTrace trace = io::trace_from_json(nlohmann::json::parse(text));
    return trace.sampling();
  }
  return io::curve_from_csv(text);
}

struct TraceArgs {
  std::string kind, metric, p, X, Y, out, mode = "base-curve";
  double k = 1.0, smax = 2.0 * M_PI, step = 0.0, abort_tol = 1e-3;
  bool adaptive = false;
};

struct CheckArgs {
  std::string metric, in, out, mode = "base-curve", expect;
  double rho_tol = 1e-4, geodesic_tol = 1e-6;
  std::size_t trim = 3;
};

struct FrenetArgs {
  std::string metric, in, out, mode = "base-curve";
};

struct VogelArgs {
  std::string metric_a, metric_b, point, kset = "0.5,1,2", out, mode = "base-curve";
  std::size_t pairs = 6, steps = 4000, directions = 16;
  unsigned seed = 20260101u;
  double periods = 1.0, rho_tol = 1e-4, geodesic_tol = 1e-6, abort_tol = 1e-3;
  bool expect = false, serial = false;
};

struct InfoArgs {
  std::string metric, at, out;
  bool fd = false;
};

struct IndicatrixArgs {
  double b = 0.3;
  std::size_t samples = 64;
  std::string out;
};

inline int run_metric_info(const InfoArgs& a) {
  const MetricSpec spec = parse_metric_spec(a.metric);
  const auto [x, y] = parse_at(a.at);
  const LineElement le = line_element(spec.metric, x, y);
  const ConnectionSample cs = connection_sample(
      spec.metric, le, a.fd ? DerivProvider::FiniteDifference : DerivProvider::Arithmetic);
  nlohmann::json j;
  j["metric"] = spec.render();
  j["x"] = x;
  j["y"] = y;
  j["F"] = spec.metric.norm(x, y);
  j.update(io::connection_to_json(cs));
  emit(a.out, j.dump(2) + "\n");
  return 0;
}

inline int run_trace(const TraceArgs& a) {
  const MetricSpec spec = parse_metric_spec(a.metric);
  const Vec p = parse_vector(a.p);
  const Vec xdir = parse_vector(a.X);
  IntegrateOptions opt;
  opt.step = a.step;
  opt.adaptive = a.adaptive;
  opt.abort_residual = a.abort_tol;
  opt.mode = io::transport_mode_from(a.mode);

  CircleTrace trace;
  if (a.kind == "geodesic") {
    const Vec X = scale(1.0 / spec.metric.norm(p, xdir), xdir);
    trace = geodesic_integrate(spec.metric, p, X, a.smax, opt);
  } else if (a.kind == "circle") {
    if (a.Y.empty()) throw std::invalid_argument("circle traces need --Y");
    const auto [X, Y] = orthonormal_pair(spec.metric, p, xdir, parse_vector(a.Y));
    const CircleSpec cs = make_circle_spec(spec.metric, p, X, Y, a.k);
    trace = circle_integrate(spec.metric, cs, a.smax, opt);
  } else {
    throw std::invalid_argument("--kind must be circle or geodesic");
  }
  trace.metric = spec.render();
  if (trace.aborted) std::cerr << "warning: trace aborted: " << trace.diagnostic << "\n";
  if (ends_with(a.out, ".csv")) emit(a.out, io::trace_to_csv(trace));
  else
    emit(a.out, io::trace_to_json(trace).dump(2) + "\n");
  return 0;
}

inline int run_check_circle(const CheckArgs& a) {
  const MetricSpec spec = parse_metric_spec(a.metric);
  const CurveSampling curve = load_curve(a.in);
  CircleTestOptions opt;
  opt.rho_tol = a.rho_tol;
  opt.geodesic_tol = a.geodesic_tol;
  opt.mode = io::transport_mode_from(a.mode);
  opt.edge_trim = a.trim;
  const CircleTestResult res = circle_test(spec.metric, curve, opt);
  nlohmann::json j;
  j["metric"] = spec.render();
  j["verdict"] = to_string(res.verdict);
  j["max_rho"] = res.max_rho;
  j["k1_min"] = res.k1_min;
  j["k1_max"] = res.k1_max;
  j["samples"] = curve.size();
  emit(a.out, j.dump(2) + "\n");
  if (!a.expect.empty() && a.expect != to_string(res.verdict)) return 2;
  return 0;
}

inline int run_frenet(const FrenetArgs& a) {
  const MetricSpec spec = parse_metric_spec(a.metric);
  const CurveSampling curve = load_curve(a.in);
  const FrenetData f = frenet_data(spec.metric, curve, io::transport_mode_from(a.mode));
  nlohmann::json j;
  j["metric"] = spec.render();
  j["geodesic"] = f.geodesic;
  j["k1"] = f.k1;
  j["k2_residual"] = f.k2_residual;
  double k1_min = 0.0, k1_max = 0.0, k2_max = 0.0;
  if (!f.k1.empty()) {
    k1_min = k1_max = f.k1.front();
    for (double v : f.k1) {
      k1_min = std::min(k1_min, v);
      k1_max = std::max(k1_max, v);
    }
  }
  for (double v : f.k2_residual) k2_max = std::max(k2_max, v);
  j["summary"] = {{"k1_min", k1_min}, {"k1_max", k1_max}, {"max_k2_residual", k2_max}};
  emit(a.out, j.dump(2) + "\n");
  return 0;
}

inline int run_vogel(const VogelArgs& a) {
  const MetricSpec ma = parse_metric_spec(a.metric_a);
  const MetricSpec mb = parse_metric_spec(a.metric_b);
  const Vec p = parse_vector(a.point);

  PreservationOptions opt;
  opt.k_values = parse_vector(a.kset);
  opt.pairs = a.pairs;
  opt.seed = a.seed;
  opt.periods = a.periods;
  opt.steps_per_period = a.steps;
  opt.rho_tol = a.rho_tol;
  opt.geodesic_tol = a.geodesic_tol;
  opt.abort_residual = a.abort_tol;
  opt.mode = io::transport_mode_from(a.mode);
  opt.concurrent = !a.serial;

  const PreservationReport pres = preservation_harness(ma.metric, mb.metric, p, opt);
  const ConformalReport conf =
      conformality_check(ma.metric, mb.metric, {p}, a.directions, a.seed);
  const OrthogonalityResult orth = orthogonality_transfer(ma.metric, mb.metric, p, 64, a.seed);

  nlohmann::json j;
  j["metric_a"] = ma.render();
  j["metric_b"] = mb.render();
  j["point"] = p;
  j["preservation"] = io::preservation_report_to_json(pres);
  j["conformality"] = io::conformal_report_to_json(conf);
  j["orthogonality"] = {{"worst", orth.worst}, {"X", orth.X}, {"Y", orth.Y}};
  emit(a.out, j.dump(2) + "\n");

  if (a.expect && (pres.verdict == PreservationVerdict::NonPreserving ||
                   conf.verdict == ConformalVerdict::NotConformal))
    return 2;
  return 0;
}

inline int run_indicatrix(const IndicatrixArgs& a) {
  if (!(a.b > 0.0 && a.b < 1.0)) throw std::invalid_argument("b out of range (0,1)");
  if (a.samples == 0) throw std::invalid_argument("--samples must be positive");
  std::string csv = "theta,u,v\n";
  for (std::size_t i = 0; i < a.samples; ++i) {
    const double theta = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(a.samples);
    const double u = (std::cos(theta) - a.b) / (1.0 - a.b * a.b);
    const double v = std::sin(theta) / std::sqrt(1.0 - a.b * a.b);
    csv += io::fmt17(theta) + "," + io::fmt17(u) + "," + io::fmt17(v) + "\n";
  }
  emit(a.out, csv);
  return 0;
}

}  // namespace detail

/// Dispatches one CLI invocation; args excludes the program name.
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"numerical Finsler geometry toolkit"};
  app.require_subcommand(1);

  detail::InfoArgs info;
  CLI::App* info_cmd = app.add_subcommand("metric-info", "connection data at one line element");
  info_cmd->add_option("--metric", info.metric, "metric spec string")->required();
  info_cmd->add_option("--at", info.at, "line element 'x1,..;y1,..'")->required();
  info_cmd->add_flag("--fd", info.fd, "use the finite-difference derivative provider");
  info_cmd->add_option("--out", info.out, "output file (default stdout)");

  detail::TraceArgs trace;
  CLI::App* trace_cmd = app.add_subcommand("trace", "integrate a circle or geodesic");
  trace_cmd->add_option("--kind", trace.kind, "circle | geodesic")->required();
  trace_cmd->add_option("--metric", trace.metric, "metric spec string")->required();
  trace_cmd->add_option("--p", trace.p, "start point, comma separated")->required();
  trace_cmd->add_option("--X", trace.X, "initial direction (normalized internally)")->required();
  trace_cmd->add_option("--Y", trace.Y, "normal direction (circle only)");
  trace_cmd->add_option("--k", trace.k, "circle curvature");
  trace_cmd->add_option("--smax", trace.smax, "arc length to integrate")->required();
  trace_cmd->add_option("--step", trace.step, "grid step (default period/4000)");
  trace_cmd->add_option("--mode", trace.mode, "base-curve | velocity-lift");
  trace_cmd->add_flag("--adaptive", trace.adaptive, "embedded 4(5) adaptive stepping");
  trace_cmd->add_option("--abort-tol", trace.abort_tol, "first-integral abort threshold");
  trace_cmd->add_option("--out", trace.out, "output file; .csv extension switches format");

  detail::CheckArgs check;
  CLI::App* check_cmd = app.add_subcommand("check-circle", "classify a sampled curve");
  check_cmd->add_option("--metric", check.metric, "metric spec string")->required();
  check_cmd->add_option("--in", check.in, "trace JSON or CSV file")->required();
  check_cmd->add_option("--rho-tol", check.rho_tol, "parallelism threshold")
      ->envname("FINSLER_RHO_TOL");
  check_cmd->add_option("--geodesic-tol", check.geodesic_tol, "k1 geodesic cutoff")
      ->envname("FINSLER_GEODESIC_TOL");
  check_cmd->add_option("--mode", check.mode, "base-curve | velocity-lift");
  check_cmd->add_option("--trim", check.trim, "edge samples excluded from the verdict");
  check_cmd->add_option("--expect", check.expect, "exit 2 unless the verdict matches");
  check_cmd->add_option("--out", check.out, "output file (default stdout)");

  detail::FrenetArgs frenet;
  CLI::App* frenet_cmd = app.add_subcommand("frenet", "curvature data of a unit-speed curve");
  frenet_cmd->add_option("--metric", frenet.metric, "metric spec string")->required();
  frenet_cmd->add_option("--in", frenet.in, "trace JSON or CSV file")->required();
  frenet_cmd->add_option("--mode", frenet.mode, "base-curve | velocity-lift");
  frenet_cmd->add_option("--out", frenet.out, "output file (default stdout)");

  detail::VogelArgs vogel;
  CLI::App* vogel_cmd =
      app.add_subcommand("vogel", "circle-preservation and conformality analysis");
  vogel_cmd->add_option("--metric-a", vogel.metric_a, "source metric")->required();
  vogel_cmd->add_option("--metric-b", vogel.metric_b, "target metric")->required();
  vogel_cmd->add_option("--point", vogel.point, "base point of the circle family")->required();
  vogel_cmd->add_option("--kset", vogel.kset, "curvatures, comma separated (0 = geodesic)");
  vogel_cmd->add_option("--pairs", vogel.pairs, "direction pairs per curvature");
  vogel_cmd->add_option("--seed", vogel.seed, "sampling seed");
  vogel_cmd->add_option("--periods", vogel.periods, "periods to integrate per circle");
  vogel_cmd->add_option("--steps", vogel.steps, "integration steps per period");
  vogel_cmd->add_option("--directions", vogel.directions, "probe directions for conformality");
  vogel_cmd->add_option("--rho-tol", vogel.rho_tol, "parallelism threshold")
      ->envname("FINSLER_RHO_TOL");
  vogel_cmd->add_option("--geodesic-tol", vogel.geodesic_tol, "k1 geodesic cutoff")
      ->envname("FINSLER_GEODESIC_TOL");
  vogel_cmd->add_option("--abort-tol", vogel.abort_tol, "first-integral abort threshold");
  vogel_cmd->add_option("--mode", vogel.mode, "base-curve | velocity-lift");
  vogel_cmd->add_flag("--serial", vogel.serial, "disable per-circle concurrency");
  vogel_cmd->add_flag("--expect", vogel.expect,
                      "exit 2 on non-preserving or not-conformal verdicts");
  vogel_cmd->add_option("--out", vogel.out, "output file (default stdout)");

  detail::IndicatrixArgs ind;
  CLI::App* ind_cmd = app.add_subcommand("indicatrix", "randers-plane unit circle as CSV");
  ind_cmd->add_option("--b", ind.b, "randers parameter in (0,1)")->required();
  ind_cmd->add_option("--samples", ind.samples, "number of angle samples")->required();
  ind_cmd->add_option("--out", ind.out, "output file (default stdout)");

  std::vector<const char*> argv;
  argv.push_back("finsler");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (info_cmd->parsed()) return detail::run_metric_info(info);
    if (trace_cmd->parsed()) return detail::run_trace(trace);
    if (check_cmd->parsed()) return detail::run_check_circle(check);
    if (frenet_cmd->parsed()) return detail::run_frenet(frenet);
    if (vogel_cmd->parsed()) return detail::run_vogel(vogel);
    if (ind_cmd->parsed()) return detail::run_indicatrix(ind);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace finsler::cli
