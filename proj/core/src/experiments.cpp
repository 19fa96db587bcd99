#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "cli_internal.hpp"
#include "parallel.hpp"
#include "sparselab/box_operator.hpp"
#include "sparselab/eigensolve.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/green.hpp"
#include "sparselab/localization.hpp"
#include "sparselab/oscillatory.hpp"
#include "sparselab/random.hpp"
#include "sparselab/wave_probe.hpp"

namespace sparselab::cli::detail {

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(std::int64_t v) { return std::to_string(v); }

std::string cell(const std::string& v) { return v; }

std::string cell(const Site& n) {
  std::string s;
  for (auto c : n.coords()) s += (s.empty() ? "" : " ") + std::to_string(c);
  return s;
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json site_json(const Site& n) { return std::vector<Coord>(n.coords().begin(), n.coords().end()); }

Site site_from(const Json& j) { return Site(j.get<std::vector<Coord>>()); }

Result green_decay(const Config& cfg) {
  const auto& r = cfg.resolved;
  const auto& p = r.at("green-decay");
  const int d = r.at("dimension");
  GreenOptions opts;
  opts.tolerance = p.at("tolerance");
  opts.max_order = p.at("max_order");
  const GreenKernel green(d, opts);
  const double lambda = p.at("lambda");
  const Site dir = site_from(p.at("direction"));
  const int n_max = p.at("n_max");
  const auto fit = green_decay_fit(green, lambda, dir, n_max, p.at("eps"));

  Result res;
  res.table.columns = {"k", "distance", "abs_g"};
  for (int k = 1; k <= n_max; ++k) {
    const Site n = static_cast<Coord>(k) * dir;
    res.table.rows.push_back({cell(std::int64_t{k}), cell(n.norm()), cell(std::abs(green(lambda, n)))});
  }
  const double g0 = green(lambda, Site::origin(d)).real();
  res.summary = {{"gamma", fit.gamma}, {"C", fit.C}, {"fit_residual", fit.residual}, {"fit_rms", fit.rms},
                 {"fit_points", fit.points}, {"g0", g0}};
  if (lambda < 0.0) res.summary["coupling_bound"] = 1.0 / g0;
  const auto env = combes_thomas_envelope(d, lambda);
  res.summary["envelope_gamma"] = env.gamma;
  res.summary["envelope_C"] = env.C;
  return res;
}

Result q_decay(const Config& cfg) {
  const auto& p = cfg.resolved.at("q-decay");
  QIntegralSpec spec;
  spec.tau1 = p.at("tau1");
  spec.profile = p.at("profile") == "smooth" ? BumpProfile::smooth : BumpProfile::cos_power;
  spec.center_angle = p.at("center_angle");
  spec.half_width = p.at("half_width");
  for (const auto& j : p.at("j")) spec.js.push_back(site_from(j));
  spec.gauss_points_per_period = p.at("points_per_period");
  spec.min_panels = p.at("min_panels");
  spec.refinement = p.at("refinement");
  spec.min_decades = p.at("min_decades");

  std::vector<double> q(spec.js.size());
  sparselab::detail::parallel_for(static_cast<int>(q.size()), cfg.threads,
                                  [&](int i) { q[static_cast<std::size_t>(i)] = q_integral(spec, spec.js[static_cast<std::size_t>(i)]); });
  std::map<Site, double> lookup;
  for (std::size_t i = 0; i < q.size(); ++i) lookup[spec.js[i]] = q[i];
  const auto fit = q_decay_fit(spec, [&](const Site& j) { return lookup.at(j); });

  Result res;
  res.table.columns = {"j", "abs_j", "q"};
  for (std::size_t i = 0; i < q.size(); ++i) res.table.rows.push_back({cell(spec.js[i]), cell(spec.js[i].norm()), cell(q[i])});
  res.summary = {{"exponent", fit.exponent}, {"fit_rms", fit.residual}, {"expected_exponent", -0.5}};
  return res;
}

LatticeField gaussian_packet(const LatticeBox& box, const Site& center, double width, const std::vector<double>& k) {
  LatticeField f(box);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site n = box.site(i);
    double r2 = 0.0, phase = 0.0;
    for (int a = 0; a < box.dim(); ++a) {
      const double x = static_cast<double>(n[a] - center[a]);
      r2 += x * x;
      phase += k[static_cast<std::size_t>(a)] * static_cast<double>(n[a]);
    }
    f.values()[static_cast<Eigen::Index>(i)] = std::polar(std::exp(-r2 / (2.0 * width * width)), phase);
  }
  f.values() /= f.norm();
  return f;
}

Result wave_probe(const Config& cfg) {
  const auto& r = cfg.resolved;
  const auto& p = r.at("wave-probe");
  const int d = r.at("dimension");
  const LatticeBox box(d, r.at("box").at("radius").get<Coord>(), Boundary::periodic);
  const Potential V = build_potential(r);
  const LatticeField f = gaussian_packet(box, site_from(p.at("packet_center")), p.at("packet_width"),
                                         p.at("momentum").get<std::vector<double>>());
  WaveProbeOptions opts;
  opts.tolerance = p.at("tolerance");
  opts.margin = p.at("margin");
  const auto times = p.at("times").get<std::vector<double>>();
  const auto report = wave_operator_probe(V, f, times, opts);

  Result res;
  res.table.columns = {"t", "norm", "increment"};
  double defect = 0.0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const auto& s = report.steps[i];
    res.table.rows.push_back({cell(s.t), cell(s.norm), cell(s.increment)});
    defect = std::max(defect, std::abs(s.norm - 1.0));
    if (s.increment > report.steps[peak].increment) peak = i;
  }
  bool monotone = true;
  for (std::size_t i = peak + 1; i < report.steps.size(); ++i) {
    if (report.steps[i].increment > report.steps[i - 1].increment) monotone = false;
  }
  const double first = report.steps.front().increment;
  const double last = report.steps.back().increment;
  res.summary = {{"first_increment", first},
                 {"final_increment", last},
                 {"final_over_first", first > 0.0 ? Json(last / first) : Json(nullptr)},
                 {"max_norm_defect", defect},
                 {"decreasing_after_peak", monotone},
                 {"peak_time", report.steps[peak].t},
                 {"initial_extent", report.initial_extent},
                 {"front_reach", report.front_reach}};
  return res;
}

Result simon_wolff(const Config& cfg) {
  const auto& r = cfg.resolved;
  const auto& p = r.at("simon-wolff");
  const int d = r.at("dimension");
  const Potential V = build_potential(r);
  const auto radii = p.at("radii").get<std::vector<Coord>>();
  const double lambda0 = p.at("lambda0");
  LocalizationOptions opts;
  opts.eps = p.at("eps");
  opts.near_eigen_threshold = p.at("near_eigen_threshold");
  opts.summable_threshold = p.at("summable_threshold");
  const double exclusion = p.at("exclusion");

  Site j = Site::origin(d);
  if (p.contains("j")) {
    j = site_from(p.at("j"));
  } else {
    const auto support = V.restricted(LatticeBox(d, radii.front())).support();
    if (!support.empty()) {
      j = *std::min_element(support.begin(), support.end(),
                            [](const Site& a, const Site& b) { return a.norm() < b.norm() || (a.norm() == b.norm() && a < b); });
    }
  }

  // Singularities of I + G_S V_S on the largest support are the eigenvalues of
  // H with V restricted to that box; the Dirichlet box locates them.
  const BoxOperator H(LatticeBox(d, radii.back(), Boundary::dirichlet), V);
  const Interval window{lambda0 - exclusion - 1e-9, -opts.eps + exclusion + 1e-9};
  std::vector<double> detected;
  for (const auto& e : eigs_in_window(H, window, static_cast<int>(std::min<Eigen::Index>(H.size(), 1 << 20)))) {
    detected.push_back(e.value);
  }

  const int samples = p.at("samples");
  std::mt19937_64 rng(derive_seed(r.at("seed").get<std::uint64_t>(), 0x53574C414D424441ULL));
  std::uniform_real_distribution<double> uniform(lambda0, -opts.eps);
  std::vector<double> lambdas;
  int rejected = 0;
  while (static_cast<int>(lambdas.size()) < samples) {
    const double lam = uniform(rng);
    const bool near = std::any_of(detected.begin(), detected.end(), [&](double e) { return std::abs(e - lam) < exclusion; });
    if (near) {
      if (++rejected > 1000 * samples) throw AccuracyError("simon-wolff: cannot sample lambda away from the eigenvalues");
      continue;
    }
    lambdas.push_back(lam);
  }

  const GreenKernel green(d);
  std::vector<SimonWolffReport> reports(lambdas.size());
  sparselab::detail::parallel_for(samples, cfg.threads, [&](int i) {
    reports[static_cast<std::size_t>(i)] = simon_wolff_resolve(green, lambdas[static_cast<std::size_t>(i)], j, V, radii, opts);
  });

  Result res;
  res.table.columns = {"sample", "lambda", "radius", "support_size", "psi_norm", "tail_norm",
                       "sigma_min", "sigma_min_t", "relative_change", "verdict"};
  std::map<std::string, int> verdicts;
  double worst_change = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& s : reports[i].steps) {
      res.table.rows.push_back({cell(static_cast<std::int64_t>(i)), cell(reports[i].lambda), cell(std::int64_t{s.radius}),
                                cell(static_cast<std::int64_t>(s.support_size)), cell(s.psi_norm), cell(s.tail_norm),
                                cell(s.sigma_min), cell(s.sigma_min_t), cell(s.relative_change), to_string(s.verdict)});
    }
    ++verdicts[to_string(reports[i].verdict)];
    const double change = reports[i].steps.back().relative_change;
    if (std::isfinite(change)) worst_change = std::max(worst_change, change);
  }
  res.summary = {{"j", site_json(j)},
                 {"detected_eigenvalues", detected.size()},
                 {"rejected_samples", rejected},
                 {"verdicts", verdicts},
                 {"worst_relative_change", reports.front().steps.size() > 1 ? Json(worst_change) : Json(nullptr)}};
  return res;
}

Result impurity(const Config& cfg) {
  const auto& r = cfg.resolved;
  const auto& p = r.at("impurity");
  const int d = r.at("dimension");
  ImpurityOptions opts;
  opts.green_tolerance = p.at("green_tolerance");
  opts.residual_tol = p.at("residual_tol");
  const auto betas = p.at("betas").get<std::vector<double>>();
  std::vector<std::optional<ImpurityLevel>> levels(betas.size());
  std::vector<std::string> status(betas.size(), "ok");
  sparselab::detail::parallel_for(static_cast<int>(betas.size()), cfg.threads, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      levels[k] = impurity_level(d, betas[k], opts);
    } catch (const NoBoundStateError&) {
      status[k] = "no-bound-state";
    }
  });

  Result res;
  res.table.columns = {"beta", "status", "lambda", "residual", "iterations"};
  int found = 0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (levels[i]) {
      ++found;
      res.table.rows.push_back({cell(betas[i]), status[i], cell(levels[i]->lambda), cell(levels[i]->residual),
                                cell(std::int64_t{levels[i]->iterations})});
    } else {
      res.table.rows.push_back({cell(betas[i]), status[i], "nan", "nan", "0"});
    }
  }
  res.summary = {{"levels_found", found}, {"levels_missing", static_cast<int>(betas.size()) - found}};
  return res;
}

Result spectrum_fill(const Config& cfg) {
  const auto& r = cfg.resolved;
  const auto& p = r.at("spectrum-fill");
  const SparseRule rule = build_rule(r);
  const double lambda0 = p.at("lambda0");
  const auto report = spectrum_fill_scan(lambda0, rule, r.at("box").at("radius").get<Coord>(), p.at("realizations"),
                                         r.at("seed").get<std::uint64_t>(), cfg.threads,
                                         r.at("potential").at("a").get<double>());
  Result res;
  res.table.columns = {"eigenvalue", "participation_ratio"};
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    res.table.rows.push_back({cell(report.eigenvalues[i]), cell(report.participation[i])});
  }
  res.summary = {{"a", report.a},
                 {"eigenvalues_in_window", report.eigenvalues.size()},
                 {"per_realization", report.per_realization},
                 {"largest_gap", report.largest_gap},
                 {"median_participation", report.median_participation},
                 {"infimum", number_or_null(report.infimum)},
                 {"below_lambda0", report.below_lambda0}};
  if (report.below_lambda0 > 0) {
    res.warnings.push_back(std::to_string(report.below_lambda0) + " eigenvalue(s) fell below lambda0 - 1e-8");
  }
  return res;
}

Result bump_measure(const Config& cfg) {
  const auto& r = cfg.resolved;
  const auto& p = r.at("bump-measure");
  const int d = r.at("dimension");
  const Potential V = build_potential(r);
  const SparseRule rule = build_rule(r);
  std::vector<Site> far;
  const auto ks = p.at("k").get<std::vector<Coord>>();
  for (Coord k : ks) far.push_back(Site::on_axis(d, rule.axis, power_rule_radius(k, rule.exponent)));
  std::vector<std::complex<double>> zs;
  for (const auto& z : p.at("z")) zs.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  const auto report = bump_measure_compare(V, far, p.at("beta"), zs, p.at("local_radius"),
                                           r.at("box").at("radius").get<Coord>());
  Result res;
  res.table.columns = {"k", "site", "amplitude", "sup_difference", "conjugate_defect"};
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    res.table.rows.push_back({cell(std::int64_t{ks[i]}), cell(row.site), cell(row.amplitude), cell(row.sup_difference),
                              cell(row.conjugate_defect)});
  }
  Json ref = Json::array();
  for (const auto& m : report.reference) ref.push_back({m.real(), m.imag()});
  res.summary = {{"strictly_decreasing", report.strictly_decreasing}, {"reference_m", ref}};
  return res;
}

Result one_plus_gv(const Config& cfg) {
  const auto& r = cfg.resolved;
  const auto& p = r.at("one-plus-gv");
  const int d = r.at("dimension");
  const Potential V = build_potential(r);
  const double lo = p.at("lambda_min");
  const double hi = p.at("lambda_max");
  const int points = p.at("points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = i + 1 == points ? hi : lo + (hi - lo) * i / (points - 1);
  }
  std::vector<Site> sites;
  if (p.contains("sites")) {
    for (const auto& s : p.at("sites")) sites.push_back(site_from(s));
  } else {
    for (const auto& s : V.support()) {
      if (s.norm() > 0.0) sites.push_back(s);
    }
  }
  const auto report = one_plus_gv_scan(GreenKernel(d), V, p.at("eps"), grid, sites);

  Result res;
  res.table.columns = {"site", "abs_n", "value", "threshold", "hits", "measure", "bound", "within_bound",
                       "resolution_warning"};
  bool all_within = true;
  for (const auto& e : report.entries) {
    const bool within = e.measure <= e.bound + report.spacing;
    all_within = all_within && within;
    res.table.rows.push_back({cell(e.site), cell(e.site.norm()), cell(e.value), cell(e.threshold),
                              cell(static_cast<std::int64_t>(e.hits)), cell(e.measure), cell(e.bound),
                              within ? "true" : "false", e.resolution_warning ? "true" : "false"});
    if (e.resolution_warning) {
      res.warnings.push_back("grid spacing " + cell(report.spacing) + " exceeds the window " + cell(e.threshold) +
                             " at n = " + cell(e.site));
    }
  }
  res.summary = {{"spacing", report.spacing}, {"all_within_bound", all_within}};
  return res;
}

}  // namespace

Result run_experiment(const Config& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "green-decay") return green_decay(cfg);
  if (e == "q-decay") return q_decay(cfg);
  if (e == "wave-probe") return wave_probe(cfg);
  if (e == "simon-wolff") return simon_wolff(cfg);
  if (e == "impurity") return impurity(cfg);
  if (e == "spectrum-fill") return spectrum_fill(cfg);
  if (e == "bump-measure") return bump_measure(cfg);
  if (e == "one-plus-gv") return one_plus_gv(cfg);
  throw ConfigError("config key 'experiment': unknown experiment '" + e + "'");
}

std::vector<Check> hypothesis_checks(const Config& cfg) {
  std::vector<Check> checks;
  const auto& r = cfg.resolved;
  if (!r.contains("potential")) return checks;
  const int d = r.at("dimension");
  const Coord R = r.at("box").at("radius").get<Coord>();
  const auto& pot = r.at("potential");
  const Potential V = build_potential(r);

  // A sum growing like R^s with s >= 0 has dyadic increments that do not shrink.
  {
    const std::vector<double> radii{static_cast<double>(R) / 4.0, static_cast<double>(R) / 2.0, static_cast<double>(R)};
    const auto s = weighted_partial_sums(V, radii);
    const double inc_outer = s[2] - s[1];
    const double inc_inner = s[1] - s[0];
    Check c;
    c.name = "weighted-sum-bounded";
    c.passed = inc_outer == 0.0 || inc_outer < inc_inner;
    c.detail = "sum |V(n)|/|n|^((d-1)/2) at R/4, R/2, R: " + cell(s[0]) + ", " + cell(s[1]) + ", " + cell(s[2]);
    checks.push_back(c);
  }

  const std::string rule = pot.at("rule");
  if (rule == "explicit") {
    checks.push_back({"sparseness-ratio-increasing", true, false,
                      "finite support of " + std::to_string(V.support().size()) + " sites; the condition holds vacuously"});
  } else if (rule == "power-axis" || rule == "power-shells") {
    const SparseRule sr = build_rule(r);
    const double delta = pot.at("delta");
    std::vector<double> ratios;
    for (Coord radius : {std::max<Coord>(1, R / 16), std::max<Coord>(1, R / 4), R}) {
      ratios.push_back(tail_sparseness_ratio(sparse_support(sr, radius), delta, radius));
    }
    Check c;
    c.name = "sparseness-ratio-increasing";
    c.passed = std::isfinite(ratios[0]) && ratios[0] < ratios[1] && ratios[1] < ratios[2];
    c.detail = "min d(n)/|n|^delta over |n| >= R'/4 at R' = R/16, R/4, R: " + cell(ratios[0]) + ", " + cell(ratios[1]) +
               ", " + cell(ratios[2]);
    checks.push_back(c);
  } else {
    checks.push_back({"sparseness-ratio-increasing", false, false, "potential rule '" + rule + "' is not sparse"});
  }

  if (pot.contains("a") && (cfg.experiment == "spectrum-fill" || cfg.experiment == "simon-wolff")) {
    const double lambda0 = r.at(cfg.experiment).at("lambda0");
    const double bound = spectrum_fill_amplitude(d, lambda0);
    const double a = pot.at("a");
    Check c;
    c.name = "amplitude-within-coupling-bound";
    c.warning_only = true;
    c.passed = a <= bound * (1.0 + 1e-12);
    c.detail = "a = " + cell(a) + ", coupling bound 1/G(lambda0;0) = " + cell(bound);
    checks.push_back(c);
  }
  return checks;
}

}  // namespace sparselab::cli::detail
