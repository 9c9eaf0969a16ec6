#include "axistable/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "axistable/errors.hpp"

namespace axistable {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& v) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return out;
  } catch (...) {
  }
  throw config_error("[" + section + "] " + key + ": expected a number, got '" +
                     v + "'");
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(section, key, tok));
  if (out.empty())
    throw config_error("[" + section + "] " + key + ": empty list");
  return out;
}

// strict reader: every fetched key is marked consumed
struct Reader {
  const ConfigFile& cf;
  std::set<std::pair<std::string, std::string>> consumed;
  std::set<std::string> known_sections;

  bool has(const std::string& sec, const std::string& key) {
    auto s = cf.sections.find(sec);
    return s != cf.sections.end() && s->second.count(key) > 0;
  }
  std::optional<std::string> get(const std::string& sec, const std::string& key) {
    known_sections.insert(sec);
    auto s = cf.sections.find(sec);
    if (s == cf.sections.end()) return std::nullopt;
    auto it = s->second.find(key);
    if (it == s->second.end()) return std::nullopt;
    consumed.insert({sec, key});
    return it->second;
  }
  void number(const std::string& sec, const std::string& key, double* out) {
    if (auto v = get(sec, key)) *out = parse_double(sec, key, *v);
  }
  void integer(const std::string& sec, const std::string& key, int* out) {
    if (auto v = get(sec, key)) {
      const double d = parse_double(sec, key, *v);
      if (d != std::floor(d))
        throw config_error("[" + sec + "] " + key + ": expected an integer");
      *out = static_cast<int>(d);
    }
  }
  void u64(const std::string& sec, const std::string& key, std::uint64_t* out) {
    if (auto v = get(sec, key)) {
      const double d = parse_double(sec, key, *v);
      *out = static_cast<std::uint64_t>(d);
    }
  }
  void text(const std::string& sec, const std::string& key, std::string* out) {
    if (auto v = get(sec, key)) *out = *v;
  }
  void list(const std::string& sec, const std::string& key,
            std::vector<double>* out) {
    if (auto v = get(sec, key)) *out = parse_list(sec, key, *v);
  }

  void finish() const {
    for (const auto& [sec, keys] : cf.sections) {
      if (!known_sections.count(sec))
        throw config_error("unknown section [" + sec + "]");
      for (const auto& [key, value] : keys)
        if (!consumed.count({sec, key}))
          throw config_error("unknown key '" + key + "' in section [" + sec + "]");
    }
  }
};

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cf;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("line " + std::to_string(lineno) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      cf.sections[section];  // a section may legitimately be empty
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw config_error("line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (cf.sections[section].count(key))
      throw config_error("duplicate key '" + key + "' in section [" + section + "]");
    cf.sections[section][key] = value;
  }
  return cf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

std::string ConfigFile::serialize() const {
  std::ostringstream out;
  for (const auto& [sec, keys] : sections) {
    out << "[" << sec << "]\n";
    for (const auto& [key, value] : keys) out << key << " = " << value << "\n";
    out << "\n";
  }
  return out.str();
}

Potential PotentialBlock::build() const {
  if (family == "product_polynomial") {
    if (static_cast<int>(epsilons.size()) != dimension)
      throw config_error("potential: epsilons length must equal dimension");
    return Potential::product_polynomial(epsilons);
  }
  if (family == "product_log_corrected") {
    if (static_cast<int>(epsilons.size()) != dimension)
      throw config_error("potential: epsilons length must equal dimension");
    return Potential::product_log_corrected(alpha, epsilons);
  }
  if (family == "variable_order") {
    if (static_cast<int>(coefficients.size()) != dimension)
      throw config_error("potential: one coefficient expression per coordinate");
    std::vector<Coefficient> cs;
    for (const auto& c : coefficients) cs.push_back(Coefficient::parse(c));
    return Potential::variable_order(std::move(cs));
  }
  throw config_error("unknown potential family '" + family + "'");
}

double RunConfig::gamma_or_default(double block_gamma) const {
  if (block_gamma > 0.0) return block_gamma;
  return 0.5 * std::min(potential.alpha, 1.0);
}

RunConfig RunConfig::load(const std::string& path, const std::string& task) {
  ConfigFile cf = ConfigFile::parse_file(path);
  Reader r{cf, {}, {}};
  RunConfig rc;
  rc.task = task;

  r.text("potential", "family", &rc.potential.family);
  r.integer("potential", "dimension", &rc.potential.dimension);
  r.number("potential", "alpha", &rc.potential.alpha);
  r.list("potential", "epsilons", &rc.potential.epsilons);
  for (int i = 1; i <= rc.potential.dimension; ++i) {
    std::string expr;
    r.text("potential", "coeff_" + std::to_string(i), &expr);
    if (!expr.empty()) rc.potential.coefficients.push_back(expr);
  }
  StableIndex check(rc.potential.alpha);
  (void)check;

  r.number("criteria", "gamma", &rc.criteria.gamma);
  r.number("criteria", "r_min", &rc.criteria.r_min);
  r.number("criteria", "ladder_span", &rc.criteria.ladder_span);
  r.integer("criteria", "shells_per_decade", &rc.criteria.shells_per_decade);
  r.integer("criteria", "directions", &rc.criteria.directions);
  r.number("criteria", "phi_target", &rc.criteria.phi_target);

  r.number("rates", "s_lo", &rc.rates.s_lo);
  r.number("rates", "s_hi", &rc.rates.s_hi);
  r.integer("rates", "points_per_decade", &rc.rates.points_per_decade);
  r.number("rates", "c1", &rc.rates.c1);
  r.number("rates", "c2", &rc.rates.c2);
  r.number("rates", "c", &rc.rates.c);
  r.number("rates", "eps_slack", &rc.rates.eps_slack);

  r.text("form", "kind", &rc.form.kind);
  r.number("form", "s", &rc.form.s);
  r.number("form", "r", &rc.form.r);
  r.number("form", "t", &rc.form.t);
  r.number("form", "constant", &rc.form.constant);
  r.integer("form", "battery", &rc.form.battery);
  r.integer("form", "battery_dim", &rc.form.battery_dim);

  r.number("lyapunov", "gamma", &rc.lyapunov.gamma);
  r.number("lyapunov", "r_min", &rc.lyapunov.r_min);
  r.number("lyapunov", "r_max", &rc.lyapunov.r_max);
  r.integer("lyapunov", "steps", &rc.lyapunov.steps);
  r.integer("lyapunov", "directions", &rc.lyapunov.directions);

  r.list("gap", "boxes", &rc.gap.boxes);
  r.integer("gap", "n", &rc.gap.n);

  r.number("simulate", "horizon", &rc.simulate.horizon);
  r.integer("simulate", "trajectories", &rc.simulate.trajectories);
  r.number("simulate", "delta", &rc.simulate.delta);
  r.integer("simulate", "points_per_decade", &rc.simulate.points_per_decade);
  r.number("simulate", "t_min_fraction", &rc.simulate.t_min_fraction);
  r.integer("simulate", "f_axis", &rc.simulate.f_axis);
  r.number("simulate", "f_center", &rc.simulate.f_center);
  r.number("simulate", "f_radius", &rc.simulate.f_radius);

  std::string manifest_task;
  r.text("run", "task", &manifest_task);
  if (!manifest_task.empty() && manifest_task != task)
    throw config_error("config declares task '" + manifest_task +
                       "' but the subcommand is '" + task + "'");
  r.u64("run", "seed", &rc.seed);
  r.text("run", "out", &rc.out_dir);
  r.number("run", "tol", &rc.tol);
  r.integer("run", "threads", &rc.threads);

  r.finish();
  return rc;
}

std::string RunConfig::manifest() const {
  ConfigFile cf;
  auto& pot = cf.sections["potential"];
  pot["family"] = potential.family;
  pot["dimension"] = std::to_string(potential.dimension);
  pot["alpha"] = format_double(potential.alpha);
  {
    std::string eps;
    for (double e : potential.epsilons) {
      if (!eps.empty()) eps += " ";
      eps += format_double(e);
    }
    pot["epsilons"] = eps;
  }
  for (std::size_t i = 0; i < potential.coefficients.size(); ++i)
    pot["coeff_" + std::to_string(i + 1)] = potential.coefficients[i];

  auto& cr = cf.sections["criteria"];
  cr["gamma"] = format_double(criteria.gamma);
  cr["r_min"] = format_double(criteria.r_min);
  cr["ladder_span"] = format_double(criteria.ladder_span);
  cr["shells_per_decade"] = std::to_string(criteria.shells_per_decade);
  cr["directions"] = std::to_string(criteria.directions);
  cr["phi_target"] = format_double(criteria.phi_target);

  auto& ra = cf.sections["rates"];
  ra["s_lo"] = format_double(rates.s_lo);
  ra["s_hi"] = format_double(rates.s_hi);
  ra["points_per_decade"] = std::to_string(rates.points_per_decade);
  ra["c1"] = format_double(rates.c1);
  ra["c2"] = format_double(rates.c2);
  ra["c"] = format_double(rates.c);
  ra["eps_slack"] = format_double(rates.eps_slack);

  auto& fo = cf.sections["form"];
  fo["kind"] = form.kind;
  fo["s"] = format_double(form.s);
  fo["r"] = format_double(form.r);
  fo["t"] = format_double(form.t);
  fo["constant"] = format_double(form.constant);
  fo["battery"] = std::to_string(form.battery);
  fo["battery_dim"] = std::to_string(form.battery_dim);

  auto& ly = cf.sections["lyapunov"];
  ly["gamma"] = format_double(lyapunov.gamma);
  ly["r_min"] = format_double(lyapunov.r_min);
  ly["r_max"] = format_double(lyapunov.r_max);
  ly["steps"] = std::to_string(lyapunov.steps);
  ly["directions"] = std::to_string(lyapunov.directions);

  auto& ga = cf.sections["gap"];
  {
    std::string boxes;
    for (double b : gap.boxes) {
      if (!boxes.empty()) boxes += " ";
      boxes += format_double(b);
    }
    ga["boxes"] = boxes;
    ga["n"] = std::to_string(gap.n);
  }

  auto& si = cf.sections["simulate"];
  si["horizon"] = format_double(simulate.horizon);
  si["trajectories"] = std::to_string(simulate.trajectories);
  si["delta"] = format_double(simulate.delta);
  si["points_per_decade"] = std::to_string(simulate.points_per_decade);
  si["t_min_fraction"] = format_double(simulate.t_min_fraction);
  si["f_axis"] = std::to_string(simulate.f_axis);
  si["f_center"] = format_double(simulate.f_center);
  si["f_radius"] = format_double(simulate.f_radius);

  auto& ru = cf.sections["run"];
  ru["task"] = task;
  ru["seed"] = std::to_string(seed);
  ru["out"] = out_dir;
  ru["tol"] = format_double(tol);
  ru["threads"] = std::to_string(threads);

  return cf.serialize();
}

}  // namespace axistable
