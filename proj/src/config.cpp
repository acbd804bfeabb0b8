#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "nslab/error.hpp"
#include "nslab/experiments.hpp"

namespace nslab {
namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("config: key '" + key + "' expects a number, got '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(parse_double(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw InvalidArgument("config: key '" + key + "' expects a non-empty list");
  return out;
}

struct Binding {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class T>
Binding make_binding(T ExperimentConfig::*m, const std::string& key) {
  Binding b;
  if constexpr (std::is_same_v<T, double>) {
    b.get = [m](const ExperimentConfig& c) { return fmt(c.*m); };
    b.set = [m, key](ExperimentConfig& c, const std::string& s) { c.*m = parse_double(key, s); };
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    b.get = [m](const ExperimentConfig& c) { return fmt_list(c.*m); };
    b.set = [m, key](ExperimentConfig& c, const std::string& s) { c.*m = parse_list(key, s); };
  } else if constexpr (std::is_same_v<T, std::string>) {
    b.get = [m](const ExperimentConfig& c) { return c.*m; };
    b.set = [m](ExperimentConfig& c, const std::string& s) { c.*m = s; };
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    b.get = [m](const ExperimentConfig& c) { return std::to_string(c.*m); };
    b.set = [m, key](ExperimentConfig& c, const std::string& s) {
      try {
        std::size_t used = 0;
        c.*m = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      } catch (const std::exception&) {
        throw InvalidArgument("config: key '" + key + "' expects an unsigned integer");
      }
    };
  } else {
    b.get = [m](const ExperimentConfig& c) { return std::to_string(c.*m); };
    b.set = [m, key](ExperimentConfig& c, const std::string& s) {
      const double v = parse_double(key, s);
      if (v != double(T(v))) throw InvalidArgument("config: key '" + key + "' expects an integer");
      c.*m = T(v);
    };
  }
  return b;
}

const std::map<std::string, Binding>& bindings() {
  using C = ExperimentConfig;
  static const std::map<std::string, Binding> table = [] {
    std::map<std::string, Binding> t;
#define NSLAB_BIND(field) t.emplace(#field, make_binding(&C::field, #field))
    NSLAB_BIND(name);
    NSLAB_BIND(n);
    NSLAB_BIND(L);
    NSLAB_BIND(T);
    NSLAB_BIND(M);
    NSLAB_BIND(gamma);
    NSLAB_BIND(amplitude);
    NSLAB_BIND(delta_cells);
    NSLAB_BIND(window_lo);
    NSLAB_BIND(window_hi);
    NSLAB_BIND(per_decade);
    NSLAB_BIND(p_values);
    NSLAB_BIND(kappa_cells);
    NSLAB_BIND(ells);
    NSLAB_BIND(forcing_amplitude);
    NSLAB_BIND(forcing_width);
    NSLAB_BIND(bump_amplitude);
    NSLAB_BIND(bump_width);
    NSLAB_BIND(kernel_ells);
    NSLAB_BIND(cl_ells);
    NSLAB_BIND(kernel_t_lo);
    NSLAB_BIND(kernel_t_hi);
    NSLAB_BIND(kernel_points);
    NSLAB_BIND(kernel_n);
    NSLAB_BIND(landau_c);
    NSLAB_BIND(landau_samples);
    NSLAB_BIND(landau_h);
    NSLAB_BIND(landau_rmin);
    NSLAB_BIND(landau_rmax);
    NSLAB_BIND(force_n);
    NSLAB_BIND(force_L);
    NSLAB_BIND(force_T);
    NSLAB_BIND(force_sigma_cells);
    NSLAB_BIND(force_b);
    NSLAB_BIND(rescale_t0);
    NSLAB_BIND(rescale_radius);
    NSLAB_BIND(selftest_n);
    NSLAB_BIND(selftest_fields);
    NSLAB_BIND(selftest_sets);
    NSLAB_BIND(seed);
#undef NSLAB_BIND
    return t;
  }();
  return table;
}

void apply_section(ExperimentConfig& cfg, const boost::property_tree::ptree& section,
                   const std::string& where) {
  for (const auto& [key, node] : section) {
    if (!node.empty()) throw InvalidArgument("config: nested key '" + key + "' in " + where);
    if (key == "threads") {
      cfg.threads = int(parse_double(key, node.data()));
      continue;
    }
    const auto it = bindings().find(key);
    if (it == bindings().end()) throw InvalidArgument("config: unknown key '" + key + "' in " + where);
    it->second.set(cfg, node.data());
  }
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  // threads is excluded: outputs do not depend on it.
  std::string s;
  for (const auto& [key, b] : bindings()) s += key + "=" + b.get(*this) + "\n";
  return s;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.name = experiment;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg = default_config(experiment);
  for (const auto& [key, node] : tree)
    if (node.empty()) throw InvalidArgument("config: key '" + key + "' outside a section");
  if (auto d = tree.get_child_optional("default")) apply_section(cfg, *d, "[default]");
  if (auto s = tree.get_child_optional(experiment)) apply_section(cfg, *s, "[" + experiment + "]");
  cfg.name = experiment;
  return cfg;
}

}  // namespace nslab
