#include "stokep/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>

#include "stokep/csv.hpp"

namespace stokep::cli {

TwoBodyParams RunConfig::two_body_params() const {
  return TwoBodyParams(m, k, sigma_r, sigma_phi);
}

PolarState RunConfig::initial_polar() const { return {r0, phi0, v0, w0}; }

LangevinParams RunConfig::langevin_params() const { return {mu_ou, sigma, x0}; }

SchemeConfig RunConfig::scheme_config() const {
  return {scheme, Srk2Coefficients::from_label(coeffs), brownian_variance};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::size_t line,
                      std::string_view expected) {
  std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  throw ConfigError(where + "invalid value '" + std::string(value) + "' for '" +
                        std::string(key) + "' (expected " + std::string(expected) + ")",
                    line, std::string(key));
}

double parse_plain(std::string_view key, std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    bad(key, text, line, "a real number");
  }
  return v;
}

/// Decimal or scientific literal, or base^exponent (e.g. 2^-10).
double to_real(std::string_view key, std::string_view text, std::size_t line) {
  text = trim(text);
  double v = 0.0;
  if (const auto caret = text.find('^'); caret != std::string_view::npos) {
    v = std::pow(parse_plain(key, trim(text.substr(0, caret)), line),
                 parse_plain(key, trim(text.substr(caret + 1)), line));
  } else {
    v = parse_plain(key, text, line);
  }
  if (!std::isfinite(v)) bad(key, text, line, "a finite real number");
  return v;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view text, std::size_t line) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    bad(key, text, line, "a non-negative integer");
  }
  return v;
}

std::vector<std::string> to_names(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Key {
  std::string_view name;
  std::string_view section;
  std::function<void(RunConfig&, std::string_view, std::size_t)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_KEY(section, field)                                                        \
  Key {                                                                                 \
    #field, section,                                                                    \
        [](RunConfig& c, std::string_view v, std::size_t l) { c.field = to_real(#field, v, l); }, \
        [](const RunConfig& c) { return csv::format_real(c.field); }                    \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"model", "model",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            v = trim(v);
            if (v == "two_body") {
              c.model = ModelKind::TwoBody;
            } else if (v == "langevin") {
              c.model = ModelKind::Langevin;
            } else {
              bad("model", v, l, "two_body or langevin");
            }
          },
          [](const RunConfig& c) {
            return std::string(c.model == ModelKind::TwoBody ? "two_body" : "langevin");
          }},
      REAL_KEY("two_body", m),
      REAL_KEY("two_body", k),
      REAL_KEY("two_body", sigma_r),
      REAL_KEY("two_body", sigma_phi),
      REAL_KEY("two_body", r0),
      REAL_KEY("two_body", phi0),
      REAL_KEY("two_body", v0),
      REAL_KEY("two_body", w0),
      REAL_KEY("langevin", mu_ou),
      REAL_KEY("langevin", sigma),
      REAL_KEY("langevin", x0),
      REAL_KEY("run", T),
      REAL_KEY("run", h),
      Key{"scheme", "run",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            v = trim(v);
            if (v == "em") {
              c.scheme = Scheme::EulerMaruyama;
            } else if (v == "srk2") {
              c.scheme = Scheme::Srk2;
            } else {
              bad("scheme", v, l, "em or srk2");
            }
          },
          [](const RunConfig& c) { return std::string(to_string(c.scheme)); }},
      Key{"coeffs", "run",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            v = trim(v);
            if (v == "heun") {
              c.coeffs = CoefficientSet::HeunAnalog;
            } else if (v == "search") {
              c.coeffs = CoefficientSet::NumericalSearch;
            } else {
              bad("coeffs", v, l, "heun or search");
            }
          },
          [](const RunConfig& c) { return std::string(to_string(c.coeffs)); }},
      REAL_KEY("run", brownian_variance),
      Key{"n", "run",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            c.n = to_integer<std::size_t>("n", v, l);
          },
          [](const RunConfig& c) { return std::to_string(c.n); }},
      Key{"seed", "run",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            c.seed = to_integer<std::uint64_t>("seed", v, l);
          },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      Key{"workers", "run",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            c.workers = to_integer<unsigned>("workers", v, l);
          },
          [](const RunConfig& c) { return std::to_string(c.workers); }},
      Key{"output", "run",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            v = trim(v);
            if (v.empty()) bad("output", v, l, "a path or '-'");
            c.output = std::string(v);
          },
          [](const RunConfig& c) { return c.output; }},
      Key{"observables", "ensemble",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            auto names = to_names(v);
            if (names.empty()) bad("observables", v, l, "a comma-separated list");
            c.observables = std::move(names);
          },
          [](const RunConfig& c) {
            std::string s;
            for (const auto& o : c.observables) s += (s.empty() ? "" : ",") + o;
            return s;
          }},
      Key{"steps", "converge",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            try {
              c.steps = parse_real_list(v);
            } catch (const InvalidArgument&) {
              bad("steps", v, l, "a comma-separated list of step sizes");
            }
          },
          [](const RunConfig& c) {
            std::string s;
            for (double h : c.steps) s += (s.empty() ? "" : ",") + csv::format_real(h);
            return s;
          }},
      Key{"reference", "converge",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            v = trim(v);
            if (v == "analytic") {
              c.reference = WeakReference::Analytic;
            } else if (v == "reference") {
              c.reference = WeakReference::ReferenceSolution;
            } else if (v == "exact") {
              c.reference = WeakReference::ExactSchemeExpectation;
            } else if (v == "auto") {
              c.reference.reset();
            } else {
              bad("reference", v, l, "analytic, reference, exact or auto");
            }
          },
          [](const RunConfig& c) {
            return c.reference ? std::string(to_string(*c.reference)) : std::string("auto");
          }},
      REAL_KEY("converge", h_ref),
      Key{"structure_points", "structure",
          [](RunConfig& c, std::string_view v, std::size_t l) {
            c.structure_points = to_integer<std::size_t>("structure_points", v, l);
          },
          [](const RunConfig& c) { return std::to_string(c.structure_points); }},
      REAL_KEY("structure", structure_tol),
  };
  return table;
}

#undef REAL_KEY

const Key* find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> out;
  for (const auto& k : keys()) out.push_back(k.name);
  return out;
}

void set_value(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line) {
  const Key* k = find_key(key);
  if (!k) {
    std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    throw ConfigError(where + "unknown key '" + std::string(key) + "'", line, std::string(key));
  }
  k->set(cfg, value, line);
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
  std::string raw;
  std::string section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError("line " + std::to_string(line) + ": malformed section header", line, "");
      }
      section = std::string(trim(text.substr(1, text.size() - 2)));
      const bool known = std::any_of(keys().begin(), keys().end(),
                                     [&](const Key& k) { return k.section == section; });
      if (!known) {
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]",
                          line, section);
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key = value", line, "");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    const Key* k = find_key(key);
    if (!k) {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + std::string(key) + "'",
                        line, std::string(key));
    }
    if (!section.empty() && k->section != section) {
      throw ConfigError("line " + std::to_string(line) + ": key '" + std::string(key) +
                            "' belongs in [" + std::string(k->section) + "], not [" + section + "]",
                        line, std::string(key));
    }
    k->set(cfg, value, line);
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0, "config");
  return parse_config(in, std::move(base));
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* field, const std::string& msg) {
    if (!ok) throw ConfigError(std::string(field) + ": " + msg, 0, field);
  };
  require(c.m > 0.0, "m", "must be positive");
  require(c.k > 0.0, "k", "must be positive");
  require(c.sigma_r >= 0.0, "sigma_r", "must be >= 0");
  require(c.sigma_phi >= 0.0, "sigma_phi", "must be >= 0");
  require(c.r0 > 0.0, "r0", "must be positive");
  require(c.mu_ou > 0.0, "mu_ou", "must be positive");
  require(c.sigma >= 0.0, "sigma", "must be >= 0");
  require(c.T >= 0.0, "T", "must be >= 0");
  require(c.h > 0.0, "h", "must be positive");
  require(c.brownian_variance > 0.0, "brownian_variance", "must be positive");
  require(c.n >= 2, "n", "must be >= 2");
  require(c.h_ref > 0.0, "h_ref", "must be positive");
  require(c.structure_points >= 1, "structure_points", "must be >= 1");
  require(c.structure_tol >= 0.0, "structure_tol", "must be >= 0");
  require(!c.steps.empty(), "steps", "must not be empty");
  for (double h : c.steps) require(h > 0.0, "steps", "entries must be positive");
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  std::string_view section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.name << " = " << k.get(cfg) << '\n';
  }
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : to_names(text)) out.push_back(to_real("steps", item, 0));
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

}  // namespace stokep::cli
