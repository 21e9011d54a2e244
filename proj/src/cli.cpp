#include "pim/cli.hpp"

#include "pim/config.hpp"
#include "pim/contour_io.hpp"
#include "pim/engine.hpp"
#include "pim/marginal.hpp"
#include "pim/nonparam.hpp"
#include "pim/predict.hpp"
#include "pim/validity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace pim {

namespace {

// flag name -> config key; flags and file keys are the same settings
const std::vector<std::pair<std::string, std::string>> flag_keys = {
    {"model", "model.name"},       {"args", "model.args"},        {"interest", "model.interest"},
    {"shapes", "model.shapes"},    {"data", "data.y"},            {"data-file", "data.file"},
    {"prior", "prior.family"},       {"grid", "engine.grid"},       {"engine", "engine.name"},
    {"mc", "engine.mc"},           {"seed", "engine.seed"},       {"threads", "engine.threads"},
    {"levels", "engine.levels"},   {"resamples", "engine.resamples"}, {"frac", "engine.frac"},
    {"option", "predict.option"},  {"zgrid", "predict.zgrid"},    {"k", "predict.k"},
    {"alpha", "region.alpha"},     {"n-sim", "validate.n_sim"},   {"thetas", "validate.thetas"},
    {"output", "output.file"},
};

std::string flag_for(const std::string& key) {
  for (const auto& [f, k] : flag_keys)
    if (k == key) return "--" + f;
  return "";
}

std::string with_braces(const std::string& s) {
  if (!s.empty() && s.front() == '{') return s;
  return "{" + s + "}";
}

// --data y=7 | y=[1,2] | 1,2,3 | counts=[..]
void apply_data_flag(Config& c, const std::string& s) {
  auto eq = s.find('=');
  if (eq != std::string::npos && s.find_first_of("[{") > eq) {
    std::string name = s.substr(0, eq);
    c.set("data." + name, Config::parse_value(s.substr(eq + 1), "data." + name));
    return;
  }
  std::string body = s;
  if (body.find(',') != std::string::npos && body.front() != '[') body = "[" + body + "]";
  c.set("data.y", Config::parse_value(body, "data.y"));
}

// --prior family[:k=v,...]
void apply_prior_flag(Config& c, const std::string& s) {
  auto colon = s.find(':');
  std::string family = s.substr(0, colon);
  c.set("prior.family", ConfigValue{family, 0});
  if (colon == std::string::npos) return;
  auto t = Config::parse_value(with_braces(s.substr(colon + 1)), "prior.family");
  for (const auto& [k, v] : std::get<ConfigTable>(t.v)) c.set("prior." + k, v);
}

// [variant.<name>.<section>] keys replace the base keys; all variant keys are then dropped
void apply_variant(Config& c, const std::string& name) {
  const std::string prefix = "variant." + name + ".";
  bool found = false;
  for (const auto& k : c.keys()) {
    if (k.rfind(prefix, 0) != 0) continue;
    found = true;
    c.set(k.substr(prefix.size()), c.at(k));
  }
  if (!name.empty() && !found) throw ConfigError("no variant named '" + name + "' in the config file", "variant");
  for (const auto& k : c.keys())
    if (k.rfind("variant.", 0) == 0) c.erase(k);
}

void apply_flags(Config& c, const std::map<std::string, std::string>& flags) {
  for (const auto& [flag, value] : flags) {
    std::string key;
    for (const auto& [f, k] : flag_keys)
      if (f == flag) key = k;
    if (flag == "data") {
      apply_data_flag(c, value);
    } else if (flag == "prior") {
      apply_prior_flag(c, value);
    } else if (flag == "args") {
      c.set(key, Config::parse_value(with_braces(value), key));
    } else if (flag == "data-file" || flag == "output" || flag == "grid" || flag == "zgrid" || flag == "shapes") {
      c.set(key, ConfigValue{value, 0});
    } else if (flag == "thetas") {
      std::string body = value.front() == '[' ? value : "[" + value + "]";
      c.set(key, Config::parse_value(body, key));
    } else {
      c.set(key, Config::parse_value(value, key));
    }
  }
}

// ---- problem assembly

enum class ModelKind { binomial, normal_known, normal_unknown, gamma, multinomial, odds_ratio, ar1, gig, linkage,
                       el_mean, el_quantile };

ModelKind model_kind(const Config& c) {
  static const std::map<std::string, ModelKind> names = {
      {"binomial", ModelKind::binomial},     {"normal-known", ModelKind::normal_known},
      {"normal-unknown", ModelKind::normal_unknown}, {"gamma", ModelKind::gamma},
      {"multinomial", ModelKind::multinomial}, {"odds-ratio", ModelKind::odds_ratio},
      {"ar1", ModelKind::ar1},               {"gig", ModelKind::gig},
      {"linkage", ModelKind::linkage},       {"el-mean", ModelKind::el_mean},
      {"el-quantile", ModelKind::el_quantile}};
  std::string n = c.string("model.name");
  auto it = names.find(n);
  if (it == names.end()) throw ConfigError("unknown model '" + n + "'", "model.name", c.line("model.name"));
  return it->second;
}

std::vector<double> read_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'", "data.file");
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto comma = line.find(',');
    std::string cell = line.substr(0, comma);
    if (cell.size() >= 2 && cell.front() == '"') cell = cell.substr(1, cell.size() - 2);
    if (cell.empty()) continue;
    try {
      std::size_t used = 0;
      double x = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      out.push_back(x);
    } catch (const std::exception&) {
      if (!first) throw ConfigError("non-numeric cell '" + cell + "'", "data.file");
    }
    first = false;
  }
  if (out.empty()) throw ConfigError("data file has no values", "data.file");
  return out;
}

Data read_data(const Config& c) {
  std::vector<double> v;
  if (c.has("data.file")) {
    v = read_column(c.string("data.file"));
  } else if (c.has("data.y")) {
    v = c.numbers("data.y");
  } else if (c.has("data.counts")) {
    v = c.numbers("data.counts");
  } else {
    throw ConfigError("required key is missing", "data.y");
  }
  if (v.empty()) throw ConfigError("no observations", c.has("data.file") ? "data.file" : "data.y");
  return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
}

struct Args {
  ConfigTable t;
  int line = 0;
  double num(const std::string& name) const { return table_number(t, name, "model.args", line); }
  double num(const std::string& name, double fallback) const { return table_number(t, name, fallback, "model.args"); }
  int integer(const std::string& name) const {
    double x = num(name);
    if (x != std::floor(x)) throw ConfigError("'" + name + "' must be an integer", "model.args", line);
    return static_cast<int>(x);
  }
};

int as_count(double x, const std::string& key) {
  if (x != std::floor(x) || x < 0) throw ConfigError("expected a non-negative integer count", key);
  return static_cast<int>(x);
}

double scalar(const Data& y, const std::string& what) {
  if (y.size() != 1) throw ConfigError(what + " takes a single observation", "data.y");
  return y(0);
}

std::vector<double> axis_values(const std::string& spec, const std::string& key) {
  try {
    auto d = ParamDomain::parse(spec, {"x"});
    std::vector<double> out;
    for (Index i = 0; i < d.size(); ++i) out.push_back(d.point(i)(0));
    return out;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), key);
  }
}

struct Problem {
  ModelKind kind{};
  std::string model_name;
  Data y;
  std::unique_ptr<Model> model;
  std::unique_ptr<Fiber> fiber;
  std::unique_ptr<SplitFamily> split;
  std::unique_ptr<Prior> prior;
  std::unique_ptr<PrecisePrior> source;  // prob2poss-of input
  std::string engine = "mc";
  IMConfig cfg;
  double quantile = 0.5;
  std::size_t resamples = 2000;
  double frac = 0.5;
  std::vector<double> phis;

  const ConditionalModel* conditional() const { return dynamic_cast<const ConditionalModel*>(model.get()); }
};

void build_model(const Config& c, Problem& p) {
  p.kind = model_kind(c);
  p.model_name = c.string("model.name");
  p.y = read_data(c);
  Args a{c.table("model.args"), c.line("model.args")};
  const Data& y = p.y;
  const auto n_obs = static_cast<int>(y.size());
  switch (p.kind) {
    case ModelKind::binomial:
      p.model = std::make_unique<Binomial>(a.integer("n"));
      if (as_count(scalar(y, "binomial"), "data.y") > a.integer("n")) throw ConfigError("count exceeds n", "data.y");
      break;
    case ModelKind::normal_known:
      if (p.engine == "split") {
        p.split = std::make_unique<NormalMeanSplit>(a.num("sigma"));
      } else {
        p.model = std::make_unique<NormalKnownVar>(a.num("sigma"), a.integer("n"));
        scalar(y, "normal-known");
      }
      break;
    case ModelKind::normal_unknown: {
      auto m = std::make_unique<NormalUnknownVar>(n_obs);
      if (auto i = c.string_or("model.interest")) {
        if (*i == "mean") p.fiber = std::make_unique<NormalMeanFiber>(*m);
        else if (*i == "variance") p.fiber = std::make_unique<NormalVarianceFiber>(*m);
        else throw ConfigError("normal-unknown interest is 'mean' or 'variance'", "model.interest", c.line("model.interest"));
      }
      p.model = std::move(m);
      break;
    }
    case ModelKind::gamma: {
      if (p.engine == "split") {
        p.split = std::make_unique<GammaMeanSplit>();
        break;
      }
      if (!(y.size() > 1 && (y.array() > 0.0).all())) throw ConfigError("gamma data must be positive, at least two values", "data.y");
      auto m = std::make_unique<GammaIID>(n_obs);
      if (auto i = c.string_or("model.interest")) {
        if (*i != "mean") throw ConfigError("gamma interest is 'mean'", "model.interest", c.line("model.interest"));
        auto shapes = axis_values(c.string_or("model.shapes").value_or("0.25:40:160"), "model.shapes");
        p.fiber = std::make_unique<GammaMeanFiber>(*m, shapes);
      }
      p.model = std::move(m);
      break;
    }
    case ModelKind::multinomial: {
      int n = 0;
      for (Index i = 0; i < y.size(); ++i) n += as_count(y(i), "data.y");
      p.model = std::make_unique<Multinomial>(static_cast<int>(y.size()), n);
      break;
    }
    case ModelKind::odds_ratio: {
      if (y.size() != 2) throw ConfigError("odds-ratio data is y = [y1, y2]", "data.y");
      int y1 = as_count(y(0), "data.y"), y2 = as_count(y(1), "data.y");
      if (y1 > a.integer("n1") || y2 > a.integer("n2")) throw ConfigError("count exceeds its group size", "data.y");
      p.model = std::make_unique<OddsRatioConditional>(a.integer("n1"), a.integer("n2"), y1 + y2);
      p.y = scalar_data(y2);
      break;
    }
    case ModelKind::ar1:
      p.model = std::make_unique<AR1Conditional>(a.num("sigma"), a.num("y1"));
      scalar(y, "ar1");
      break;
    case ModelKind::gig:
      p.model = std::make_unique<GigConditional>(a.integer("n"), a.num("u"));
      if (!(scalar(y, "gig") > 0.0)) throw ConfigError("gig estimate must be positive", "data.y");
      break;
    case ModelKind::linkage:
      if (y.size() != 4) throw ConfigError("linkage data is four cell counts", "data.y");
      for (Index i = 0; i < 4; ++i) as_count(y(i), "data.y");
      break;
    case ModelKind::el_mean:
      break;
    case ModelKind::el_quantile:
      p.quantile = a.num("r");
      break;
  }
}

void build_prior(const Config& c, Problem& p) {
  std::string family = c.string_or("prior.family").value_or("vacuous");
  if (c.has("prior.kind")) {
    std::string k = c.string("prior.kind");
    if (k != "vacuous" && k != "precise" && k != "possibilistic")
      throw ConfigError("prior kind is vacuous, precise or possibilistic", "prior.kind", c.line("prior.kind"));
    if (k == "vacuous" && !c.has("prior.family")) family = "vacuous";
  }
  auto num = [&](const std::string& name) { return c.number("prior." + name); };
  std::string kind;
  if (family == "vacuous") {
    p.prior = std::make_unique<VacuousPrior>();
    kind = "vacuous";
  } else if (family == "markov") {
    p.prior = std::make_unique<MarkovPrior>(num("K"));
    kind = "possibilistic";
  } else if (family == "point") {
    auto at = c.numbers("prior.at");
    p.prior = std::make_unique<PointMassPrior>(Eigen::Map<const Vec>(at.data(), static_cast<Index>(at.size())));
    kind = "possibilistic";
  } else if (family == "beta") {
    p.prior = std::make_unique<BetaPrior>(num("a"), num("b"));
    kind = "precise";
  } else if (family == "normal") {
    p.prior = std::make_unique<NormalPrior>(num("mean"), num("sd"));
    kind = "precise";
  } else if (family == "prob2poss-of") {
    std::string of = c.string("prior.of");
    if (of == "beta") p.source = std::make_unique<BetaPrior>(num("a"), num("b"));
    else if (of == "normal") p.source = std::make_unique<NormalPrior>(num("mean"), num("sd"));
    else throw ConfigError("prob2poss-of takes of = \"beta\" or \"normal\"", "prior.of", c.line("prior.of"));
    if (p.cfg.grid.dims() != 1) throw ConfigError("prob2poss-of needs a 1-D grid", "engine.grid");
    Rng rng = substream(p.cfg.seed, 0, 0x6e);
    auto mc = static_cast<std::size_t>(c.integer("prior.mc", 100000));
    p.prior = std::make_unique<GridPrior>(prob2poss(*p.source, p.cfg.grid, mc, rng));
    kind = "possibilistic";
  } else {
    throw ConfigError("unknown prior family '" + family + "'", "prior.family", c.line("prior.family"));
  }
  if (c.has("prior.kind") && c.string("prior.kind") != kind)
    throw ConfigError("family '" + family + "' is a " + kind + " prior", "prior.kind", c.line("prior.kind"));
}

bool needs_seed(const Problem& p, const Config& c) {
  std::string fam = c.string_or("prior.family").value_or("vacuous");
  if (fam == "beta" || fam == "normal" || fam == "prob2poss-of") return true;
  return p.engine == "mc" || p.engine == "importance" || p.engine == "naive" || p.engine == "bootstrap";
}

std::string default_grid(const Problem& p) {
  switch (p.kind) {
    case ModelKind::binomial: return "0:1:201";
    case ModelKind::linkage: return "0:1:101";
    case ModelKind::multinomial: {
      std::string s;
      for (Index j = 0; j + 1 < p.y.size(); ++j) s += (j ? "," : "") + std::string("0:1:51");
      return s;
    }
    default: return "";
  }
}

std::vector<std::string> axis_names(const Problem& p) {
  switch (p.kind) {
    case ModelKind::normal_unknown:
      if (!p.fiber) return {"mean", "variance"};
      return {p.fiber->name()};
    case ModelKind::gamma:
      if (!p.fiber && !p.split) return {"shape", "scale"};
      return {"mean"};
    case ModelKind::multinomial: {
      std::vector<std::string> v;
      for (Index j = 0; j + 1 < p.y.size(); ++j) v.push_back("p" + std::to_string(j + 1));
      return v;
    }
    case ModelKind::linkage: return {"phi"};
    case ModelKind::el_mean: return {"mean"};
    case ModelKind::el_quantile: return {"quantile"};
    default: return {"theta"};
  }
}

EngineKind engine_kind(const std::string& e) {
  if (e == "pivot") return EngineKind::pivot;
  if (e == "exact") return EngineKind::exact;
  if (e == "importance") return EngineKind::importance;
  return EngineKind::mc;
}

Problem build_problem(const Config& c, bool need_grid = true) {
  Problem p;
  p.engine = c.string_or("engine.name").value_or("mc");
  static const std::vector<std::string> engines = {"mc", "pivot", "exact", "importance", "naive", "bootstrap", "split"};
  if (std::find(engines.begin(), engines.end(), p.engine) == engines.end())
    throw ConfigError("unknown engine '" + p.engine + "'", "engine.name", c.line("engine.name"));
  build_model(c, p);
  if (needs_seed(p, c) && !c.has("engine.seed"))
    throw ConfigError("--seed is mandatory for Monte Carlo engines", "engine.seed");
  p.cfg.seed = static_cast<std::uint64_t>(c.integer("engine.seed", 0));
  p.cfg.mc_size = static_cast<std::size_t>(c.integer("engine.mc", 10000));
  p.cfg.alpha_levels = static_cast<std::size_t>(c.integer("engine.levels", 100));
  p.cfg.engine = engine_kind(p.engine);
  if (auto r = c.string_or("engine.rule")) {
    if (*r == "exact") p.cfg.rule = ChoquetRule::exact;
    else if (*r == "midpoint") p.cfg.rule = ChoquetRule::midpoint;
    else if (*r != "auto") throw ConfigError("rule is auto, exact or midpoint", "engine.rule", c.line("engine.rule"));
  }
  p.resamples = static_cast<std::size_t>(c.integer("engine.resamples", 2000));
  p.frac = c.number("engine.frac", 0.5);
  if (need_grid) {
    std::string spec = c.string_or("engine.grid").value_or(default_grid(p));
    if (spec.empty()) throw ConfigError("required key is missing", "engine.grid");
    try {
      p.cfg.grid = ParamDomain::parse(spec, axis_names(p));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what(), "engine.grid", c.line("engine.grid"));
    }
    if (p.kind == ModelKind::multinomial) p.cfg.embed = simplex_config(static_cast<int>(p.y.size()), 2).embed;
    if (p.kind == ModelKind::linkage) p.phis = axis_values(spec, "engine.grid");
  }
  build_prior(c, p);
  return p;
}

const PossibilisticPrior* possibilistic(const Problem& p) {
  return p.prior->kind() == PriorKind::precise ? nullptr : dynamic_cast<const PossibilisticPrior*>(p.prior.get());
}

void require_vacuous(const Problem& p, const std::string& what) {
  if (p.prior->kind() != PriorKind::vacuous) throw ConfigError(what + " supports only the vacuous prior", "prior.family");
}

Contour compute_contour(const Problem& p) {
  const auto& cfg = p.cfg;
  if (p.engine == "bootstrap") {
    require_vacuous(p, "bootstrap engine");
    if (p.kind == ModelKind::el_mean) {
      return im_bootstrap([](const Data& y, double t) { return el_mean_eta(y, t); }, p.y,
                          [](const Data& y) { return y.mean(); }, p.resamples, cfg);
    }
    if (p.kind == ModelKind::el_quantile) {
      double r = p.quantile;
      return im_bootstrap([r](const Data& y, double t) { return el_quantile_eta(y, r, t); }, p.y,
                          [r](const Data& y) { return sample_quantile(y, r); }, p.resamples, cfg);
    }
    throw ConfigError("bootstrap engine takes model el-mean or el-quantile", "engine.name");
  }
  if (p.kind == ModelKind::el_mean || p.kind == ModelKind::el_quantile)
    throw ConfigError("empirical likelihood models run with engine bootstrap", "engine.name");
  if (p.engine == "split") {
    require_vacuous(p, "split engine");
    if (!p.split) throw ConfigError("split engine takes model normal-known or gamma", "engine.name");
    return im_split_lr(*p.split, p.y, p.frac, cfg);
  }
  if (p.kind == ModelKind::linkage) {
    require_vacuous(p, "linkage");
    return im_linkage(p.y, p.phis, cfg);
  }
  if (p.fiber) {
    require_vacuous(p, "marginal inference");
    return im_marginal(*p.fiber, p.y, cfg);
  }
  if (p.engine == "naive") {
    require_vacuous(p, "naive engine");
    return im_vacuous_naive(*p.model, p.y, cfg);
  }
  if (p.prior->kind() == PriorKind::precise)
    return im_complete(*p.model, dynamic_cast<const PrecisePrior&>(*p.prior), p.y, cfg);
  const auto* cm = p.conditional();
  if (p.prior->kind() == PriorKind::vacuous) return cm ? im_conditional(*cm, p.y, cfg) : im_vacuous(*p.model, p.y, cfg);
  return cm ? im_conditional(*cm, *possibilistic(p), p.y, cfg) : im_partial(*p.model, *possibilistic(p), p.y, cfg);
}

// ---- output

std::string meta_path(const std::string& out) {
  std::string base = out;
  if (base.size() > 4 && base.compare(base.size() - 4, 4, ".csv") == 0) base.resize(base.size() - 4);
  return base + ".meta.json";
}

nlohmann::json settings_json(const Config& c) {
  nlohmann::json j;
  for (const auto& k : c.keys()) {
    if (k == "engine.threads" || k == "output.file") continue;
    const auto& v = c.at(k);
    if (v.is_number()) j[k] = std::get<double>(v.v);
    else if (v.is_string()) j[k] = std::get<std::string>(v.v);
    else if (std::holds_alternative<bool>(v.v)) j[k] = std::get<bool>(v.v);
    else if (v.is_array()) j[k] = value_numbers(v, k);
    else {
      nlohmann::json t;
      for (const auto& [name, x] : std::get<ConfigTable>(v.v))
        if (x.is_number()) t[name] = std::get<double>(x.v);
      j[k] = t;
    }
  }
  return j;
}

void emit_text(const Config& c, const std::string& text, std::ostream& out) {
  if (auto f = c.string_or("output.file")) {
    std::ofstream os(*f, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + *f + "'", "output.file");
    os << text;
  } else {
    out << text;
  }
}

void emit_contour(const Config& c, const std::string& command, const Contour& res, std::ostream& out) {
  std::ostringstream csv;
  write_csv(csv, res);
  emit_text(c, csv.str(), out);
  if (auto f = c.string_or("output.file")) {
    auto j = meta_json(res);
    j["command"] = command;
    j["settings"] = settings_json(c);
    std::ofstream os(meta_path(*f), std::ios::binary);
    os << j.dump(2) << "\n";
  }
}

// ---- commands

int cmd_contour(const Config& c, std::ostream& out) {
  Problem p = build_problem(c);
  emit_contour(c, "contour", compute_contour(p), out);
  return 0;
}

int cmd_region(const Config& c, std::ostream& out) {
  Problem p = build_problem(c);
  double alpha = c.number("region.alpha", 0.1);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)", "region.alpha", c.line("region.alpha"));
  Contour res = compute_contour(p);
  auto r = region(res, alpha);
  nlohmann::json j;
  j["alpha"] = alpha;
  j["level"] = 1.0 - alpha;
  j["members"] = r.count();
  j["grid_points"] = res.size();
  j["touches_boundary"] = r.touches_boundary;
  auto iv = nlohmann::json::array();
  for (const auto& [lo, hi] : r.intervals) iv.push_back({lo, hi});
  j["intervals"] = iv;
  if (res.domain().dims() > 1 || !res.domain().is_interval(0)) {
    auto pts = nlohmann::json::array();
    for (Index i = 0; i < res.size(); ++i)
      if (r.members(i)) {
        auto x = res.domain().point(i);
        pts.push_back(std::vector<double>(x.data(), x.data() + x.size()));
      }
    j["points"] = pts;
  }
  j["contour"] = meta_json(res);
  emit_text(c, j.dump(2) + "\n", out);
  return 0;
}

int cmd_predict(const Config& c, std::ostream& out) {
  const auto option = c.integer("predict.option", 3);
  if (option < 1 || option > 3) throw ConfigError("option is 1, 2 or 3", "predict.option", c.line("predict.option"));
  ModelKind kind = model_kind(c);
  const bool multinomial = kind == ModelKind::multinomial;
  Problem p = build_problem(c, !multinomial);
  if (multinomial) {
    require_vacuous(p, "multinomial prediction");
    if (option != 3) throw ConfigError("multinomial prediction uses option 3", "predict.option");
    IMConfig cfg = simplex_config(static_cast<int>(p.y.size()), static_cast<int>(c.integer("predict.steps", 100)));
    cfg.seed = p.cfg.seed;
    cfg.mc_size = p.cfg.mc_size;
    cfg.engine = p.cfg.engine;
    emit_contour(c, "predict", predict_multinomial(p.y, cfg), out);
    return 0;
  }
  std::unique_ptr<JointPredModel> jm;
  Data y = p.y;
  if (kind == ModelKind::normal_known) {
    const auto& m = dynamic_cast<const NormalKnownVar&>(*p.model);
    jm = std::make_unique<NormalPred>(m.sigma(), m.n());
  } else if (kind == ModelKind::gamma) {
    jm = std::make_unique<GammaMaxPred>(static_cast<int>(c.integer("predict.k", 1)), static_cast<int>(y.size()));
  } else {
    throw ConfigError("prediction supports normal-known, multinomial and gamma", "model.name", c.line("model.name"));
  }
  if (p.fiber) throw ConfigError("prediction does not take an interest", "model.interest");
  std::string zspec = c.string("predict.zgrid");
  ParamDomain zg;
  try {
    zg = ParamDomain::parse(zspec, {"z"});
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), "predict.zgrid", c.line("predict.zgrid"));
  }
  const auto* precise = dynamic_cast<const PrecisePrior*>(p.prior.get());
  const auto* poss = possibilistic(p);
  Contour res = [&] {
    if (option == 1) {
      if (p.prior->kind() == PriorKind::vacuous) return predict_opt1(*jm, y, zg, p.cfg);
      return predict_opt1(*jm, compute_contour(p), zg, p.cfg);
    }
    if (option == 2) {
      if (precise) return predict_opt2(*jm, *precise, y, zg, p.cfg);
      if (p.prior->kind() == PriorKind::vacuous) return predict_opt2(*jm, y, zg, p.cfg);
      throw NotSupported("option 2 takes a vacuous or precise prior");
    }
    if (precise) return predict_opt3(*jm, *precise, y, zg, p.cfg);
    if (p.prior->kind() == PriorKind::vacuous) return predict_opt3(*jm, y, zg, p.cfg);
    return predict_opt3(*jm, *poss, y, zg, p.cfg);
  }();
  emit_contour(c, "predict", res, out);
  return 0;
}

std::uint64_t data_hash(const Data& y) {
  std::uint64_t h = 1469598103934665603ull;
  for (Index i = 0; i < y.size(); ++i) {
    std::uint64_t bits;
    double v = y(i);
    std::memcpy(&bits, &v, sizeof bits);
    h = (h ^ bits) * 1099511628211ull;
  }
  return h;
}

// plausibility of the true value for one simulated data set
PointBuilder point_builder(const Problem& p) {
  if (p.prior->kind() == PriorKind::vacuous) {
    // truth plus the estimate, so the two-point contour reaches 1
    return [&p](const Data& y, const Param& theta) {
      IMConfig cfg = p.cfg;
      cfg.grid = ParamDomain::labels("theta", {"truth", "mle"});
      Param hat = p.model->mle(y);
      cfg.embed = [theta, hat](const Param& x) { return x(0) < 0.5 ? theta : hat; };
      const auto* cm = p.conditional();
      return (cm ? im_conditional(*cm, y, cfg) : im_vacuous(*p.model, y, cfg))(0);
    };
  }
  if (p.prior->kind() == PriorKind::precise) {
    return [&p](const Data& y, const Param& theta) {
      Rng rng = substream(p.cfg.seed, data_hash(y), 0x2e);
      return complete_plausibility(*p.model, dynamic_cast<const PrecisePrior&>(*p.prior), y, theta, p.cfg.mc_size, rng);
    };
  }
  if (!p.conditional()) {
    auto im = std::make_shared<PartialIM>(*p.model, *possibilistic(p), p.cfg);
    return [im](const Data& y, const Param& theta) { return im->plausibility(y, theta); };
  }
  return [&p](const Data& y, const Param& theta) {
    auto cell = p.cfg.grid.locate(theta);
    if (!cell || std::abs(p.cfg.grid.point(*cell)(0) - theta(0)) > 1e-12)
      throw InvalidArgument("validation thetas must lie on the grid for this model and prior");
    return im_conditional(*p.conditional(), *possibilistic(p), y, p.cfg)(*cell);
  };
}

int cmd_validate(const Config& c, std::ostream& out) {
  const auto n_sim = static_cast<std::size_t>(c.integer("validate.n_sim", 5000));
  if (n_sim < 10) throw ConfigError("n_sim must be at least 10", "validate.n_sim", c.line("validate.n_sim"));
  if (!c.has("engine.seed")) throw ConfigError("--seed is mandatory for validation runs", "engine.seed");
  const auto seed = static_cast<std::uint64_t>(c.integer("engine.seed"));
  std::vector<ValidityReport> reports;
  if (!c.has("model.name")) {
    reports = validity_suite(n_sim, seed);
  } else {
    const std::string fam = c.string_or("prior.family").value_or("vacuous");
    Problem p = build_problem(c, fam == "markov" || fam == "point" || fam == "prob2poss-of");
    if (!p.model || p.fiber || p.model->param_dim() != 1 || p.kind == ModelKind::multinomial)
      throw ConfigError("validation from a config takes a one-parameter model", "model.name", c.line("model.name"));
    if (p.engine != "mc" && p.engine != "pivot" && p.engine != "exact")
      throw ConfigError("validation runs the mc, pivot or exact engine", "engine.name", c.line("engine.name"));
    auto thetas = c.numbers("validate.thetas");
    std::vector<Generator> gens;
    auto build = point_builder(p);
    for (double t : thetas) {
      Param theta = scalar_param(t);
      if (p.conditional()) {
        gens.push_back({"theta=" + format_number(t), [&p, build, theta](Rng& rng) {
                          Data y = p.model->sample(theta, rng);
                          return build(y, theta);
                        }});
      } else {
        gens.push_back(at_param(*p.model, theta, build, "theta=" + format_number(t)));
      }
    }
    reports.push_back(check_strong_validity(gens, n_sim, seed, default_alpha_grid(), p.model_name));
  }
  nlohmann::json j = nlohmann::json::array();
  bool pass = true;
  for (const auto& r : reports) {
    j.push_back(r.to_json());
    pass = pass && r.pass;
  }
  nlohmann::json doc{{"pass", pass}, {"reports", j}};
  if (c.has("output.file")) {
    emit_text(c, doc.dump(2) + "\n", out);
    for (const auto& r : reports) out << r.table() << "\n";
  } else {
    out << doc.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"possibilistic inferential models"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  std::map<std::string, std::string> flags;
  std::string config_path, variant;
  app.add_option("--config", config_path, "settings file with [model] [data] [prior] [engine] sections");
  app.add_option("--variant", variant, "named [variant.<name>.*] override block of the config file");
  std::map<std::string, std::string> help = {
      {"model", "binomial | normal-known | normal-unknown | gamma | multinomial | odds-ratio | ar1 | gig | linkage | "
                "el-mean | el-quantile"},
      {"args", "model arguments, e.g. n=25 or sigma=2,n=15"},
      {"data", "y=7, y=[1,2] or a bare list"},
      {"data-file", "one-column CSV of observations"},
      {"prior", "vacuous | markov:K=1 | beta:a=2,b=2 | normal:mean=0,sd=1 | point:at=0 | prob2poss-of:of=beta,a=2,b=2"},
      {"grid", "lo:hi:n per axis, axes separated by ','"},
      {"engine", "mc | pivot | exact | importance | naive | bootstrap | split"},
      {"output", "output file; contours also write <stem>.meta.json"},
  };
  std::map<std::string, std::string> raw;
  for (const auto& [f, k] : flag_keys) {
    std::string names = f == "output" ? "-o,--output" : "--" + f;
    auto h = help.count(f) ? help[f] : k;
    app.add_option_function<std::string>(names, [&raw, f = f](const std::string& v) { raw[f] = v; }, h);
  }
  auto* contour = app.add_subcommand("contour", "plausibility contour on a grid, written as CSV");
  auto* region_cmd = app.add_subcommand("region", "plausibility region at level 1 - alpha, written as JSON");
  auto* predict = app.add_subcommand("predict", "predictive plausibility contour for a future observation");
  auto* validate = app.add_subcommand("validate", "empirical strong-validity check");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    Config c = config_path.empty() ? Config{} : Config::load(config_path);
    apply_variant(c, variant);
    apply_flags(c, raw);
    if (c.has("engine.threads")) set_threads(static_cast<unsigned>(c.integer("engine.threads")));
    try {
      if (contour->parsed()) return cmd_contour(c, out);
      if (region_cmd->parsed()) return cmd_region(c, out);
      if (predict->parsed()) return cmd_predict(c, out);
      if (validate->parsed()) return cmd_validate(c, out);
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const NotSupported& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "engine error: " << e.what() << "\n";
      return 3;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what();
    auto f = flag_for(e.key());
    if (!f.empty()) err << " (" << f << ")";
    err << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "engine error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace pim
