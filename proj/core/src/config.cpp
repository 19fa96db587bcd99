#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>

#include <toml.hpp>

#include "cli_internal.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/green.hpp"
#include "sparselab/localization.hpp"

namespace sparselab::cli::detail {

namespace {

Json to_json(const toml::node& node, const std::string& key) {
  if (const auto* t = node.as_table()) {
    Json o = Json::object();
    for (auto&& [k, v] : *t) {
      const std::string name(k.str());
      o[name] = to_json(v, key.empty() ? name : key + "." + name);
    }
    return o;
  }
  if (const auto* a = node.as_array()) {
    Json arr = Json::array();
    for (const auto& v : *a) arr.push_back(to_json(v, key));
    return arr;
  }
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  if (const auto* s = node.as_string()) return s->get();
  throw ConfigError("config key '" + key + "': unsupported value type");
}

// Reads one table, records every resolved value in `out`, and rejects keys it
// was never asked about.
class Reader {
 public:
  Reader(const Json& root, const std::string& section, Json& out)
      : out_(out), prefix_(section.empty() ? "" : section + ".") {
    if (section.empty()) {
      src_ = &root;
    } else if (root.contains(section)) {
      src_ = &root.at(section);
      if (!src_->is_object()) throw ConfigError("config key '" + section + "': expected a table");
    }
  }

  bool has(const std::string& key) const { return src_ && src_->contains(key); }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    const Json* v = lookup(key, def.has_value());
    const double x = v ? as_number(*v, key) : *def;
    if (!std::isfinite(x)) fail(key, "must be finite");
    out_[key] = x;
    return x;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = std::nullopt) {
    const Json* v = lookup(key, def.has_value());
    const std::int64_t x = v ? as_integer(*v, key) : *def;
    out_[key] = x;
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    const Json* v = lookup(key, true);
    if (v && !v->is_boolean()) fail(key, "expected true or false");
    const bool x = v ? v->get<bool>() : def;
    out_[key] = x;
    return x;
  }

  std::string choice(const std::string& key, std::optional<std::string> def, std::initializer_list<const char*> allowed) {
    const Json* v = lookup(key, def.has_value());
    if (v && !v->is_string()) fail(key, "expected a string");
    const std::string x = v ? v->get<std::string>() : *def;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return x == a; })) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      fail(key, "'" + x + "' is not one of " + list);
    }
    out_[key] = x;
    return x;
  }

  std::string text(const std::string& key, const std::string& def) {
    const Json* v = lookup(key, true);
    if (v && !v->is_string()) fail(key, "expected a string");
    return v ? v->get<std::string>() : def;
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) {
    const Json* v = lookup(key, def.has_value());
    std::vector<double> xs;
    if (v) {
      if (!v->is_array()) fail(key, "expected an array of numbers");
      for (const auto& e : *v) xs.push_back(as_number(e, key));
    } else {
      xs = *def;
    }
    out_[key] = xs;
    return xs;
  }

  std::vector<std::int64_t> integers(const std::string& key, std::optional<std::vector<std::int64_t>> def = std::nullopt) {
    const Json* v = lookup(key, def.has_value());
    std::vector<std::int64_t> xs;
    if (v) {
      if (!v->is_array()) fail(key, "expected an array of integers");
      for (const auto& e : *v) xs.push_back(as_integer(e, key));
    } else {
      xs = *def;
    }
    out_[key] = xs;
    return xs;
  }

  std::vector<std::vector<double>> number_lists(const std::string& key, std::size_t width,
                                                std::optional<std::vector<std::vector<double>>> def = std::nullopt) {
    const Json* v = lookup(key, def.has_value());
    std::vector<std::vector<double>> xs;
    if (v) {
      if (!v->is_array()) fail(key, "expected an array of arrays");
      for (const auto& row : *v) {
        if (!row.is_array() || row.size() != width) fail(key, "every entry needs " + std::to_string(width) + " numbers");
        std::vector<double> r;
        for (const auto& e : row) r.push_back(as_number(e, key));
        xs.push_back(r);
      }
    } else {
      xs = *def;
    }
    out_[key] = xs;
    return xs;
  }

  std::vector<Site> sites(const std::string& key, int dim, std::optional<std::vector<Site>> def = std::nullopt) {
    const Json* v = lookup(key, def.has_value());
    std::vector<Site> xs;
    if (v) {
      if (!v->is_array()) fail(key, "expected an array of integer coordinate arrays");
      for (const auto& row : *v) xs.push_back(site_of(row, key, dim));
    } else {
      xs = *def;
    }
    Json arr = Json::array();
    for (const auto& s : xs) arr.push_back(std::vector<Coord>(s.coords().begin(), s.coords().end()));
    out_[key] = arr;
    return xs;
  }

  Site site(const std::string& key, int dim, std::optional<Site> def = std::nullopt) {
    const Json* v = lookup(key, def.has_value());
    const Site s = v ? site_of(*v, key, dim) : *def;
    out_[key] = std::vector<Coord>(s.coords().begin(), s.coords().end());
    return s;
  }

  void skip(const std::string& key) { used_.insert(key); }

  void finish() const {
    if (!src_) return;
    for (const auto& [k, v] : src_->items()) {
      if (!used_.count(k)) throw ConfigError("config key '" + prefix_ + k + "': unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config key '" + prefix_ + key + "': " + what);
  }

 private:
  const Json* lookup(const std::string& key, bool optional) {
    used_.insert(key);
    if (src_ && src_->contains(key)) return &src_->at(key);
    if (!optional) throw ConfigError("missing required config key '" + prefix_ + key + "'");
    return nullptr;
  }

  double as_number(const Json& v, const std::string& key) const {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  std::int64_t as_integer(const Json& v, const std::string& key) const {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
  }

  Site site_of(const Json& row, const std::string& key, int dim) const {
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      fail(key, "every site needs " + std::to_string(dim) + " integer coordinates");
    }
    std::vector<Coord> c;
    for (const auto& e : row) c.push_back(as_integer(e, key));
    return Site(std::move(c));
  }

  const Json* src_ = nullptr;
  Json& out_;
  std::string prefix_;
  std::set<std::string> used_;
};

void require(bool ok, const Reader& r, const std::string& key, const std::string& what) {
  if (!ok) r.fail(key, what);
}

void require_off_band(const Reader& r, const std::string& key, double lambda, int d, double eps) {
  require(lambda < -eps || lambda > 4.0 * d + eps, r, key,
          "must lie outside [-eps, 4d + eps] = [" + std::to_string(-eps) + ", " + std::to_string(4.0 * d + eps) + "]");
}

struct Context {
  int dim = 1;
  std::optional<double> lambda0;  // for the default uniform amplitude
  Coord radius = 0;
};

void read_box(const Json& root, Json& resolved, const std::string& experiment, Context& ctx) {
  if (!root.contains("box")) throw ConfigError("missing required config key 'box.radius'");
  Json out = Json::object();
  Reader r(root, "box", out);
  ctx.radius = r.integer("radius");
  require(ctx.radius >= 1, r, "radius", "must be >= 1");
  require(ctx.radius <= (ctx.dim == 1 ? 1000000 : ctx.dim == 2 ? 2000 : 100), r, "radius",
          "is too large for dimension " + std::to_string(ctx.dim));
  if (experiment == "wave-probe") {
    r.choice("boundary", "periodic", {"periodic"});
  } else if (experiment == "spectrum-fill") {
    r.choice("boundary", "dirichlet", {"dirichlet"});
  }
  r.finish();
  resolved["box"] = out;
}

void read_potential(const Json& root, Json& resolved, const std::string& experiment, const Context& ctx) {
  if (!root.contains("potential")) throw ConfigError("missing required config key 'potential.rule'");
  Json out = Json::object();
  Reader r(root, "potential", out);
  const std::string rule = r.choice("rule", std::nullopt, {"zero", "power-axis", "power-shells", "explicit", "decaying"});
  const bool power = rule == "power-axis" || rule == "power-shells";
  std::size_t explicit_count = 0;
  if (power) {
    require(r.number("exponent", 2.0) > 1.0, r, "exponent", "must exceed 1 for a sparse support");
    require(r.integer("k_min", 1) >= 0, r, "k_min", "must be >= 0");
    if (rule == "power-axis") {
      r.boolean("mirrored", false);
      const auto axis = r.integer("axis", 0);
      require(axis >= 0 && axis < ctx.dim, r, "axis", "must index a coordinate axis");
    }
  } else if (rule == "explicit") {
    const auto sites = r.sites("sites", ctx.dim);
    for (const auto& s : sites) require(s.norm_inf() <= ctx.radius, r, "sites", "site " + s.str() + " lies outside the box");
    explicit_count = sites.size();
  } else if (rule == "decaying") {
    require(r.number("power", 0.25) > 0.0, r, "power", "must be positive");
  }
  if (power || rule == "explicit") {
    require(r.number("delta", 0.4) > 0.0, r, "delta", "must be positive");
    const std::string amp = power ? r.choice("amplitude", std::nullopt, {"constant", "uniform", "inverse-k"})
                                  : r.choice("amplitude", std::nullopt, {"constant", "uniform", "explicit"});
    if (amp == "constant") {
      require(r.number("value", 1.0) != 0.0, r, "value", "must be nonzero");
    } else if (amp == "uniform") {
      if (ctx.lambda0 && !r.has("a")) {
        r.number("a", spectrum_fill_amplitude(ctx.dim, *ctx.lambda0));
      } else {
        require(r.number("a") > 0.0, r, "a", "must be positive");
      }
    } else if (amp == "inverse-k") {
      r.number("beta", -1.0);
    } else {
      const auto values = r.numbers("values");
      require(values.size() == explicit_count, r, "values", "needs one value per site");
    }
    if (experiment == "spectrum-fill") require(amp == "uniform", r, "amplitude", "spectrum-fill needs 'uniform'");
  } else if (experiment == "spectrum-fill") {
    r.fail("rule", "spectrum-fill needs a power rule");
  }
  r.finish();
  resolved["potential"] = out;
}

void read_green_decay(Reader& r, const Context& ctx) {
  const double eps = r.number("eps", 0.1);
  require(eps > 0.0, r, "eps", "must be positive");
  require_off_band(r, "lambda", r.number("lambda"), ctx.dim, eps);
  const Site dir = r.site("direction", ctx.dim, Site::on_axis(ctx.dim, 0, 1));
  require(dir.norm_inf() > 0, r, "direction", "must be a nonzero lattice vector");
  require(r.integer("n_max", 20) >= 2, r, "n_max", "must be >= 2");
  const double tol = r.number("tolerance", 1e-10);
  require(tol > 0.0 && tol <= 1e-6, r, "tolerance", "must lie in (0, 1e-6]");
  const auto max_order = r.integer("max_order", GreenKernel(ctx.dim).max_order());
  require(max_order >= 64 && max_order <= (1 << 24), r, "max_order", "must lie in [64, 2^24]");
}

void read_q_decay(Reader& r) {
  const double tau1 = r.number("tau1", 2.0);
  require(tau1 > 0.0 && tau1 < 8.0 && std::abs(tau1 - 4.0) > 1e-9, r, "tau1", "must lie in (0, 4) or (4, 8)");
  r.choice("profile", "smooth", {"smooth", "cos-power"});
  r.number("center_angle", 0.0);
  const double hw = r.number("half_width", 0.7);
  require(hw > 0.0 && hw <= std::numbers::pi, r, "half_width", "must lie in (0, pi]");
  const auto js = r.sites("j", 2);
  require(js.size() >= 3, r, "j", "needs at least three sites");
  for (const auto& j : js) require(j.norm() > 0.0, r, "j", "j = 0 carries no decay");
  require(r.integer("points_per_period", 20) >= 20, r, "points_per_period", "must be >= 20");
  require(r.integer("min_panels", 16) >= 1, r, "min_panels", "must be >= 1");
  require(r.number("refinement", 1.0) > 0.0, r, "refinement", "must be positive");
  const double decades = r.number("min_decades", 1.2);
  require(decades >= 0.0, r, "min_decades", "must be nonnegative");
  double lo = js.front().norm(), hi = lo;
  for (const auto& j : js) {
    lo = std::min(lo, j.norm());
    hi = std::max(hi, j.norm());
  }
  require(std::log10(hi / lo) + 1e-12 >= decades, r, "j", "must span at least min_decades decades in |j|");
}

void read_wave_probe(Reader& r, const Context& ctx) {
  std::vector<double> times;
  if (r.has("times")) {
    require(!r.has("t_max") && !r.has("steps"), r, "times", "give either times or t_max with steps");
    times = r.numbers("times");
  } else {
    const double t_max = r.number("t_max");
    const auto steps = r.integer("steps");
    require(t_max > 0.0, r, "t_max", "must be positive");
    require(steps >= 1 && steps <= 100000, r, "steps", "must lie in [1, 100000]");
    for (std::int64_t k = 1; k <= steps; ++k) times.push_back(t_max * static_cast<double>(k) / static_cast<double>(steps));
    r.numbers("times", times);
  }
  require(!times.empty(), r, "times", "must not be empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] > 0.0 && (i == 0 || times[i] > times[i - 1]), r, "times", "must be positive and strictly increasing");
  }
  const Site c = r.site("packet_center", ctx.dim, Site::origin(ctx.dim));
  require(c.norm_inf() <= ctx.radius, r, "packet_center", "lies outside the box");
  require(r.number("packet_width", 3.0) > 0.0, r, "packet_width", "must be positive");
  const auto k = r.numbers("momentum", std::vector<double>(static_cast<std::size_t>(ctx.dim), 0.0));
  require(static_cast<int>(k.size()) == ctx.dim, r, "momentum", "needs one component per dimension");
  const double tol = r.number("tolerance", 1e-10);
  require(tol > 0.0 && tol <= 1e-4, r, "tolerance", "must lie in (0, 1e-4]");
  require(r.integer("margin", 4) >= 0, r, "margin", "must be >= 0");
}

void read_simon_wolff(Reader& r, Context& ctx) {
  const double lambda0 = r.number("lambda0", -1.0);
  const double eps = r.number("eps", 0.1);
  require(eps > 0.0, r, "eps", "must be positive");
  require(lambda0 < -eps, r, "lambda0", "must lie below -eps");
  ctx.lambda0 = lambda0;
  require(r.integer("samples", 4) >= 1, r, "samples", "must be >= 1");
  const auto radii = r.integers("radii");
  require(!radii.empty(), r, "radii", "must not be empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] >= 1 && (i == 0 || radii[i] > radii[i - 1]), r, "radii", "must be positive and strictly increasing");
    require(radii[i] <= ctx.radius, r, "radii", "must not exceed box.radius");
  }
  if (r.has("j")) r.site("j", ctx.dim);
  else r.skip("j");
  require(r.number("near_eigen_threshold", 1e-6) > 0.0, r, "near_eigen_threshold", "must be positive");
  require(r.number("summable_threshold", 1e-3) > 0.0, r, "summable_threshold", "must be positive");
  require(r.number("exclusion", 1e-4) >= 0.0, r, "exclusion", "must be nonnegative");
}

void read_impurity(Reader& r) {
  const auto betas = r.numbers("betas");
  require(!betas.empty(), r, "betas", "must not be empty");
  for (double b : betas) require(b < 0.0, r, "betas", "every beta must be negative");
  const double gt = r.number("green_tolerance", 1e-13);
  require(gt > 0.0 && gt <= 1e-8, r, "green_tolerance", "must lie in (0, 1e-8]");
  require(r.number("residual_tol", 1e-10) > 0.0, r, "residual_tol", "must be positive");
}

void read_spectrum_fill(Reader& r, Context& ctx) {
  const double lambda0 = r.number("lambda0", -1.0);
  require(lambda0 < 0.0, r, "lambda0", "must be negative");
  ctx.lambda0 = lambda0;
  const auto n = r.integer("realizations", 20);
  require(n >= 0 && n <= 100000, r, "realizations", "must lie in [0, 100000]");
}

void read_bump_measure(Reader& r, const Context&) {
  require(r.number("beta", -1.0) != 0.0, r, "beta", "must be nonzero");
  const auto ks = r.integers("k");
  require(!ks.empty(), r, "k", "must not be empty");
  for (std::size_t i = 0; i < ks.size(); ++i) require(ks[i] >= 1 && (i == 0 || ks[i] > ks[i - 1]), r, "k", "must be positive and increasing");
  const auto zs = r.number_lists("z", 2, std::vector<std::vector<double>>{{0.0, 1.0}, {-0.5, 0.5}});
  require(!zs.empty(), r, "z", "must not be empty");
  for (const auto& z : zs) require(z[1] > 0.0, r, "z", "every z needs a positive imaginary part");
  require(r.integer("local_radius", 40) >= 1, r, "local_radius", "must be >= 1");
}

void read_one_plus_gv(Reader& r, const Context& ctx) {
  const double eps = r.number("eps", 0.5);
  require(eps > 0.0, r, "eps", "must be positive");
  const double lo = r.number("lambda_min");
  const double hi = r.number("lambda_max");
  require(lo < hi, r, "lambda_max", "must exceed lambda_min");
  require(hi <= -eps || lo >= 4.0 * ctx.dim + eps, r, "lambda_min", "grid must avoid (-eps, 4d + eps)");
  require(r.integer("points", 2501) >= 2, r, "points", "must be >= 2");
  if (r.has("sites")) {
    for (const auto& s : r.sites("sites", ctx.dim)) require(s.norm() > 0.0, r, "sites", "n = 0 is not allowed");
  } else {
    r.skip("sites");
  }
}

}  // namespace

Config load_config(const std::string& path, const Overrides& overrides) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw IoError("cannot read config file '" + path + "'");
  {
    std::ifstream probe(path);
    if (!probe) throw IoError("cannot read config file '" + path + "'");
  }
  Json root;
  try {
    root = to_json(toml::parse_file(path), "");
  } catch (const toml::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid TOML: " + std::string(e.description()));
  }

  Config cfg;
  Json& res = cfg.resolved;
  res = Json::object();
  Reader top(root, "", res);
  cfg.experiment = top.choice("experiment", std::nullopt,
                              {"green-decay", "q-decay", "wave-probe", "simon-wolff", "impurity", "spectrum-fill",
                               "bump-measure", "one-plus-gv"});
  Context ctx;
  ctx.dim = static_cast<int>(top.integer("dimension"));
  require(ctx.dim >= 1 && ctx.dim <= 3, top, "dimension", "must be 1, 2 or 3");
  if (cfg.experiment == "q-decay") require(ctx.dim == 2, top, "dimension", "q-decay is defined for dimension 2");

  const std::int64_t seed = top.integer("seed", 0);
  require(seed >= 0, top, "seed", "must be nonnegative");
  if (overrides.seed) res["seed"] = *overrides.seed;

  Json dummy = Json::object();
  {
    Reader run(root, "", dummy);
    cfg.threads = static_cast<int>(run.integer("threads", 1));
    cfg.output_dir = run.text("output_dir", "results");
  }
  top.skip("threads");
  top.skip("output_dir");
  if (overrides.threads) cfg.threads = *overrides.threads;
  if (overrides.out) cfg.output_dir = *overrides.out;
  if (cfg.threads < 1 || cfg.threads > 1024) throw ConfigError("config key 'threads': must lie in [1, 1024]");

  const std::string& e = cfg.experiment;
  const bool uses_potential = e == "wave-probe" || e == "simon-wolff" || e == "spectrum-fill" || e == "bump-measure" ||
                              e == "one-plus-gv";
  if (uses_potential) {
    read_box(root, res, e, ctx);
    top.skip("box");
  }

  Json params = Json::object();
  Reader p(root, e, params);
  if (e == "green-decay") read_green_decay(p, ctx);
  else if (e == "q-decay") read_q_decay(p);
  else if (e == "wave-probe") read_wave_probe(p, ctx);
  else if (e == "simon-wolff") read_simon_wolff(p, ctx);
  else if (e == "impurity") read_impurity(p);
  else if (e == "spectrum-fill") read_spectrum_fill(p, ctx);
  else if (e == "bump-measure") read_bump_measure(p, ctx);
  else if (e == "one-plus-gv") read_one_plus_gv(p, ctx);
  p.finish();
  res[e] = params;
  top.skip(e);

  if (uses_potential) {
    read_potential(root, res, e, ctx);
    top.skip("potential");
    if (e == "bump-measure") {
      const auto& pot = res["potential"];
      if (pot["rule"] != "power-axis") throw ConfigError("config key 'potential.rule': bump-measure needs 'power-axis'");
    }
  }
  top.finish();
  return cfg;
}

std::string hash_of(const Json& resolved) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : resolved.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SparseRule build_rule(const Json& resolved) {
  const auto& pot = resolved.at("potential");
  const std::string rule = pot.at("rule");
  SparseRule r;
  r.dim = resolved.at("dimension").get<int>();
  if (rule == "power-axis" || rule == "power-shells") {
    r.family = rule == "power-axis" ? SparseFamily::power_axis : SparseFamily::power_shells;
    r.exponent = pot.at("exponent").get<double>();
    r.k_min = pot.at("k_min").get<Coord>();
    if (rule == "power-axis") {
      r.mirrored = pot.at("mirrored").get<bool>();
      r.axis = pot.at("axis").get<int>();
    }
  } else if (rule == "explicit") {
    r.family = SparseFamily::explicit_sites;
    for (const auto& s : pot.at("sites")) r.sites.emplace_back(s.get<std::vector<Coord>>());
  } else {
    throw ConfigError("config key 'potential.rule': '" + rule + "' is not a sparse rule");
  }
  return r;
}

Potential build_potential(const Json& resolved) {
  const int d = resolved.at("dimension").get<int>();
  const Coord R = resolved.at("box").at("radius").get<Coord>();
  const auto& pot = resolved.at("potential");
  const std::string rule = pot.at("rule");
  if (rule == "zero") return Potential(d);
  if (rule == "decaying") {
    const double power = pot.at("power").get<double>();
    const LatticeBox box(d, R);
    std::map<Site, double> entries;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Site n = box.site(i);
      entries.emplace(n, std::pow(1.0 + n.norm(), -power));
    }
    return Potential(d, std::move(entries));
  }

  const SparseRule r = build_rule(resolved);
  const auto support = sparse_support(r, R);
  const std::string amp = pot.at("amplitude");
  if (amp == "constant") return constant_potential(d, support.sites, pot.at("value").get<double>());
  if (amp == "uniform") {
    return sample_potential(d, support.sites, pot.at("a").get<double>(), resolved.at("seed").get<std::uint64_t>());
  }
  std::map<Site, double> entries;
  if (amp == "inverse-k") {
    const double beta = pot.at("beta").get<double>();
    for (const auto& n : support.sites) {
      const Coord shell = r.family == SparseFamily::power_axis ? (n[r.axis] < 0 ? -n[r.axis] : n[r.axis]) : n.norm_inf();
      Coord k = r.k_min;
      while (power_rule_radius(k, r.exponent) < shell) ++k;
      entries.emplace(n, k == 0 ? beta : beta + 1.0 / static_cast<double>(k));
    }
  } else {
    const auto values = pot.at("values").get<std::vector<double>>();
    for (std::size_t i = 0; i < r.sites.size(); ++i) entries.emplace(r.sites[i], values[i]);
  }
  return Potential(d, std::move(entries));
}

}  // namespace sparselab::cli::detail
