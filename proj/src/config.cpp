#include "stheat/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace stheat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s.front() == '-') throw std::invalid_argument("not a nonnegative integer: '" + s + "'");
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& xs, Fn&& render) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += render(xs[i]);
  }
  return out;
}

std::vector<double> doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item));
  return out;
}

std::vector<std::size_t> sizes_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split(s, ',')) out.push_back(to_u64(item));
  return out;
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define STHEAT_SIZE_KEY(sec, key, field)                                                 \
  Key {                                                                                  \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = to_u64(v); },  \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }              \
  }
#define STHEAT_REAL_KEY(sec, key, field)                                                   \
  Key {                                                                                    \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(v); }, \
        [](const ExperimentConfig& c) { return fmt(c.field); }                           \
  }
#define STHEAT_TEXT_KEY(sec, key, field)                                              \
  Key {                                                                               \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = v; },       \
        [](const ExperimentConfig& c) { return c.field; }                            \
  }
#define STHEAT_REALS_KEY(sec, key, field)                                                 \
  Key {                                                                                   \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = doubles(v); },  \
        [](const ExperimentConfig& c) { return join(c.field, fmt); }                    \
  }
#define STHEAT_SIZES_KEY(sec, key, field)                                                    \
  Key {                                                                                      \
    sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = sizes_list(v); },  \
        [](const ExperimentConfig& c) {                                                    \
          return join(c.field, [](std::size_t x) { return std::to_string(x); });           \
        }                                                                                  \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      STHEAT_TEXT_KEY("experiment", "name", name),
      STHEAT_SIZE_KEY("grid", "J", J),
      STHEAT_SIZE_KEY("grid", "N", N),
      STHEAT_REAL_KEY("grid", "T", T),
      STHEAT_SIZES_KEY("grid", "n_levels", n_levels),
      STHEAT_SIZES_KEY("grid", "j_levels", j_levels),
      Key{"grid", "sizes",
          [](ExperimentConfig& c, const std::string& v) {
            c.sizes.clear();
            for (const auto& item : split(v, ',')) {
              const auto parts = split(item, 'x');
              if (parts.size() != 2) throw std::invalid_argument("sizes entries look like 16x64");
              c.sizes.emplace_back(to_u64(parts[0]), to_u64(parts[1]));
            }
          },
          [](const ExperimentConfig& c) {
            return join(c.sizes, [](const std::pair<std::size_t, std::size_t>& s) {
              return std::to_string(s.first) + "x" + std::to_string(s.second);
            });
          }},
      STHEAT_REAL_KEY("noise", "rho", rho),
      STHEAT_REALS_KEY("noise", "gammas", gammas),
      Key{"noise", "basis",
          [](ExperimentConfig& c, const std::string& v) {
            if (v == "sine") {
              c.noise_basis = NoiseBasis::Sine;
            } else if (v == "cosine") {
              c.noise_basis = NoiseBasis::Cosine;
            } else {
              throw std::invalid_argument("basis must be sine or cosine");
            }
          },
          [](const ExperimentConfig& c) {
            return std::string(c.noise_basis == NoiseBasis::Sine ? "sine" : "cosine");
          }},
      STHEAT_SIZE_KEY("noise", "modes", noise_modes),
      STHEAT_TEXT_KEY("operator", "law", law),
      STHEAT_REAL_KEY("operator", "kappa", kappa),
      STHEAT_REAL_KEY("operator", "a_min", a_min),
      STHEAT_REAL_KEY("operator", "a_max", a_max),
      STHEAT_REALS_KEY("operator", "kappas", kappas),
      STHEAT_REALS_KEY("load", "u0", u0),
      STHEAT_REALS_KEY("load", "f", f),
      STHEAT_REAL_KEY("load", "psi", psi),
      STHEAT_REALS_KEY("load", "psi_diag", psi_diag),
      STHEAT_REAL_KEY("regularity", "beta", beta),
      STHEAT_REALS_KEY("regularity", "betas", betas),
      STHEAT_REAL_KEY("multiplicative", "g0", g0),
      STHEAT_REAL_KEY("multiplicative", "p", p),
      STHEAT_SIZE_KEY("multiplicative", "m_colloc", m_colloc),
      STHEAT_REAL_KEY("multiplicative", "tol", tol),
      STHEAT_SIZE_KEY("multiplicative", "max_iter", max_iter),
      STHEAT_TEXT_KEY("multiplicative", "time_profile", time_profile),
      STHEAT_REAL_KEY("multiplicative", "bump_center", bump_center),
      STHEAT_REAL_KEY("multiplicative", "bump_width", bump_width),
      STHEAT_SIZE_KEY("multiplicative", "segments", segments),
      STHEAT_SIZE_KEY("mc", "paths", paths),
      STHEAT_SIZE_KEY("mc", "seed", seed),
      STHEAT_SIZE_KEY("mc", "first_path", first_path),
      STHEAT_SIZE_KEY("mc", "random_triples", random_triples),
      STHEAT_TEXT_KEY("output", "dir", out_dir),
  };
  return table;
}

#undef STHEAT_SIZE_KEY
#undef STHEAT_REAL_KEY
#undef STHEAT_TEXT_KEY
#undef STHEAT_REALS_KEY
#undef STHEAT_SIZES_KEY

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("config: " + message);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(J >= 1, "grid.J must be >= 1");
  require(N >= 1, "grid.N must be >= 1");
  require(T > 0.0 && std::isfinite(T), "grid.T must be positive");
  for (auto n : n_levels) require(n >= 1, "grid.n_levels entries must be >= 1");
  for (auto j : j_levels) require(j >= 1, "grid.j_levels entries must be >= 1");
  for (auto [j, n] : sizes) require(j >= 1 && n >= 1, "grid.sizes entries must be >= 1");
  for (double g : gammas) require(g >= 0.0 && std::isfinite(g), "noise.gammas must be >= 0");
  require(std::isfinite(rho), "noise.rho must be finite");
  require(law == "constant" || law == "uniform", "operator.law must be constant or uniform");
  require(a_min > 0.0, "operator.a_min must be positive");
  require(a_max >= a_min, "operator.a_max must be >= operator.a_min");
  if (law == "constant") {
    require(kappa >= a_min && kappa <= a_max, "operator.kappa must lie in [a_min, a_max]");
  }
  for (double k : kappas) require(k > 0.0, "operator.kappas entries must be positive");
  require(u0.size() <= J || !j_levels.empty(), "load.u0 has more entries than grid.J");
  require(std::isfinite(psi), "load.psi must be finite");
  require(beta >= 0.0, "regularity.beta must be >= 0");
  for (double b : betas) require(b >= 0.0, "regularity.betas entries must be >= 0");
  require(p > 2.0, "multiplicative.p must exceed 2");
  require(tol > 0.0, "multiplicative.tol must be positive");
  require(max_iter >= 1, "multiplicative.max_iter must be >= 1");
  require(time_profile == "flat" || time_profile == "bump",
          "multiplicative.time_profile must be flat or bump");
  require(bump_width > 0.0, "multiplicative.bump_width must be positive");
  require(segments >= 1 && segments <= N, "multiplicative.segments must lie in [1, N]");
  require(m_colloc == 0 || m_colloc >= 2 * J + 1, "multiplicative.m_colloc must be 0 or >= 2J+1");
  require(paths >= 2, "mc.paths must be >= 2");
  require(!out_dir.empty(), "output.dir must not be empty");
}

QSpec ExperimentConfig::make_q(std::size_t J_override) const {
  const std::size_t Jq = J_override ? J_override : (noise_modes ? noise_modes : J);
  if (!gammas.empty()) {
    require(gammas.size() >= Jq, "noise.gammas has fewer entries than noise modes");
    return QSpec(std::vector<double>(gammas.begin(), gammas.begin() + static_cast<long>(Jq)));
  }
  return QSpec::power_law(Jq, rho);
}

OperatorSpec ExperimentConfig::make_operator() const {
  if (law == "uniform") return OperatorSpec::uniform(a_min, a_max);
  return OperatorSpec(a_min, a_max, KappaLaw{KappaLaw::Kind::Constant, kappa, {}});
}

LoadSpec ExperimentConfig::make_load(std::size_t J_override) const {
  const std::size_t Jl = J_override ? J_override : J;
  LoadSpec load;
  require(u0.size() <= Jl, "load.u0 has more entries than modes");
  require(f.size() <= Jl, "load.f has more entries than modes");
  std::vector<double> u(Jl, 0.0);
  std::copy(u0.begin(), u0.end(), u.begin());
  load.u0 = SpectralVec(u);
  if (!f.empty()) {
    std::vector<double> fv(Jl, 0.0);
    std::copy(f.begin(), f.end(), fv.begin());
    load.f.emplace_back(fv);
  }
  if (!psi_diag.empty()) {
    require(psi_diag.size() == Jl, "load.psi_diag must have one entry per mode");
    load.psi_diag = psi_diag;
  } else if (psi != 0.0) {
    load.psi_diag.assign(Jl, psi);
  }
  return load;
}

GSpec ExperimentConfig::make_g() const {
  GSpec g;
  g.g0 = g0;
  g.p = p;
  g.m_colloc = m_colloc;
  g.noise_basis = noise_basis;
  if (time_profile == "bump") {
    const double c = bump_center;
    const double w = bump_width;
    g.time_profile = [c, w](double t) { return std::exp(-0.5 * (t - c) * (t - c) / (w * w)); };
  }
  return g;
}

ExperimentConfig parse_config(std::istream& is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key '" + section + "' outside any section");
    }
    for (const auto& [name, value] : body) {
      const Key* match = nullptr;
      for (const auto& k : keys()) {
        if (section == k.section && name == k.name) match = &k;
      }
      if (!match) throw std::invalid_argument("config: unknown key [" + section + "] " + name);
      try {
        match->set(cfg, trim(value.data()));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: [" + section + "] " + name + ": " + e.what());
      } catch (const std::out_of_range&) {
        throw std::invalid_argument("config: [" + section + "] " + name + ": out of range");
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  return parse_config(in);
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string current;
  for (const auto& k : keys()) {
    if (current != k.section) {
      if (!current.empty()) os << '\n';
      current = k.section;
      os << '[' << current << "]\n";
    }
    os << k.name << " = " << k.get(cfg) << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : keys()) j[k.section][k.name] = k.get(cfg);
  return j;
}

}  // namespace stheat
