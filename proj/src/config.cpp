#include "ipdrl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ipdrl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Inline comments after ';' or '#'.
std::string strip_comment(const std::string& s) {
  const auto pos = s.find_first_of(";#");
  return trim(pos == std::string::npos ? s : s.substr(0, pos));
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a number, got '" + t + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc() && ptr == t.data() + t.size() && !t.empty()) return v;
  // Accept integral values in exponent form such as 2e6.
  const double d = to_double(key, t);
  if (d != std::floor(d) || std::abs(d) > 9.0e18) {
    throw ConfigError(key, "expected an integer, got '" + t + "'");
  }
  return static_cast<std::int64_t>(d);
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + t + "'");
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  for (const std::string fn : {"linspace", "logspace"}) {
    if (t.rfind(fn + "(", 0) == 0) {
      if (t.back() != ')') throw ConfigError(key, "unterminated " + fn + "(...)");
      const auto args = split_commas(t.substr(fn.size() + 1, t.size() - fn.size() - 2));
      if (args.size() != 3) throw ConfigError(key, fn + " takes (lo, hi, n)");
      const double lo = to_double(key, args[0]);
      const double hi = to_double(key, args[1]);
      const std::int64_t n = to_int(key, args[2]);
      if (n < 1) throw ConfigError(key, fn + " needs n >= 1");
      if (fn == "logspace" && !(lo > 0.0 && hi > 0.0)) {
        throw ConfigError(key, "logspace end points must be positive");
      }
      std::vector<double> out(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = fn == "linspace" ? lo + (hi - lo) * f
                                  : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * f);
      }
      out.front() = lo;
      if (n > 1) out.back() = hi;
      return out;
    }
  }
  std::vector<double> out;
  for (const auto& item : split_commas(t)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key, "empty grid");
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin, std::string("malformed config: ") + e.message() + " (line " +
                                  std::to_string(e.line()) + ")");
  }

  ExperimentConfig c;
  using Setter = std::function<void(const std::string& key, const std::string& value)>;
  const std::map<std::string, Setter> setters{
      {"game.T", [&](auto& k, auto& v) { c.temptation = to_double(k, v); }},
      {"game.S", [&](auto& k, auto& v) { c.sucker = to_double(k, v); }},
      {"learner.alpha", [&](auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"learner.epsilon", [&](auto& k, auto& v) { c.epsilon = to_double(k, v); }},
      {"learner.delta", [&](auto& k, auto& v) { c.delta = to_double(k, v); }},
      {"learner.batch_size", [&](auto& k, auto& v) { c.batch_size = to_int(k, v); }},
      {"experiment.samples", [&](auto& k, auto& v) { c.samples = static_cast<int>(to_int(k, v)); }},
      {"experiment.steps", [&](auto& k, auto& v) { c.steps = to_int(k, v); }},
      {"experiment.stride", [&](auto& k, auto& v) { c.stride = to_int(k, v); }},
      {"experiment.window", [&](auto& k, auto& v) { c.window = to_int(k, v); }},
      {"experiment.seed",
       [&](auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
      {"experiment.init_low", [&](auto& k, auto& v) { c.init_low = to_double(k, v); }},
      {"experiment.init_high",
       [&](auto& k, auto& v) {
         if (trim(v) == "auto") {
           c.init_high.reset();
         } else {
           c.init_high = to_double(k, v);
         }
       }},
      {"experiment.workers",
       [&](auto& k, auto& v) { c.workers = static_cast<unsigned>(to_int(k, v)); }},
      {"experiment.out", [&](auto&, auto& v) { c.out = trim(v); }},
      {"experiment.force", [&](auto& k, auto& v) { c.force = to_bool(k, v); }},
      {"experiment.conv_window",
       [&](auto& k, auto& v) { c.conv_window = static_cast<int>(to_int(k, v)); }},
      {"experiment.conv_tolerance", [&](auto& k, auto& v) { c.conv_tolerance = to_double(k, v); }},
      {"experiment.max_steps", [&](auto& k, auto& v) { c.max_steps = to_int(k, v); }},
      {"experiment.threshold", [&](auto& k, auto& v) { c.threshold = to_double(k, v); }},
      {"sweep.epsilons", [&](auto& k, auto& v) { c.epsilons = parse_grid(k, v); }},
      {"sweep.deltas", [&](auto& k, auto& v) { c.deltas = parse_grid(k, v); }},
      {"sweep.alphas", [&](auto& k, auto& v) { c.alphas = parse_grid(k, v); }},
      {"sweep.batch_sizes",
       [&](auto& k, auto& v) {
         c.batch_sizes.clear();
         for (double b : parse_grid(k, v)) {
           if (b != std::floor(b)) throw ConfigError(k, "batch sizes must be integers");
           c.batch_sizes.push_back(static_cast<std::int64_t>(b));
         }
       }},
      {"sweep.robust_alphas", [&](auto& k, auto& v) { c.robust_alphas = parse_grid(k, v); }},
      {"sweep.robust_epsilons", [&](auto& k, auto& v) { c.robust_epsilons = parse_grid(k, v); }},
      {"sweep.phase_mode",
       [&](auto& k, auto& v) {
         const std::string m = trim(v);
         if (m == "analytic") {
           c.phase_mode = PhaseModeSelection::Analytic;
         } else if (m == "network") {
           c.phase_mode = PhaseModeSelection::Network;
         } else if (m == "both") {
           c.phase_mode = PhaseModeSelection::Both;
         } else {
           throw ConfigError(k, "expected analytic, network or both, got '" + m + "'");
         }
       }},
      {"sweep.basin_points",
       [&](auto& k, auto& v) { c.basin_points = static_cast<int>(to_int(k, v)); }},
  };

  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw ConfigError(section, "key outside of a section");
    }
    for (const auto& [name, node] : entries) {
      const std::string key = section + "." + name;
      const auto it = setters.find(key);
      if (it == setters.end()) throw ConfigError(key, "unknown key");
      it->second(key, strip_comment(node.data()));
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(c.temptation > 1.0, "game.T", "must satisfy T > 1");
  require(c.sucker < 0.0, "game.S", "must satisfy S < 0");
  require(c.alpha > 0.0 && c.alpha <= 1.0, "learner.alpha", "must lie in (0, 1]");
  require(c.epsilon >= 0.0 && c.epsilon <= 1.0, "learner.epsilon", "must lie in [0, 1]");
  require(c.delta >= 0.0 && c.delta < 1.0, "learner.delta", "must lie in [0, 1)");
  require(c.batch_size >= 1, "learner.batch_size", "must be >= 1");
  require(c.samples >= 1, "experiment.samples", "must be >= 1");
  require(c.steps >= 1, "experiment.steps", "must be >= 1");
  require(c.stride >= 1, "experiment.stride", "must be >= 1");
  require(c.window >= 1, "experiment.window", "must be >= 1");
  require(c.effective_init_high() > c.init_low, "experiment.init_high",
          "must exceed experiment.init_low");
  require(!c.out.empty(), "experiment.out", "must not be empty");
  require(c.conv_window >= 1, "experiment.conv_window", "must be >= 1");
  require(c.conv_tolerance > 0.0, "experiment.conv_tolerance", "must be > 0");
  require(c.max_steps >= 1, "experiment.max_steps", "must be >= 1");
  require(c.threshold > 0.0 && c.threshold < 1.0, "experiment.threshold", "must lie in (0, 1)");
  for (double e : c.epsilons) require(e >= 0.0 && e < 1.0, "sweep.epsilons", "values must lie in [0, 1)");
  for (double d : c.deltas) require(d >= 0.0 && d < 1.0, "sweep.deltas", "values must lie in [0, 1)");
  for (double a : c.alphas) require(a > 0.0 && a < 1.0, "sweep.alphas", "values must lie in (0, 1)");
  for (double a : c.robust_alphas) {
    require(a > 0.0 && a <= 1.0, "sweep.robust_alphas", "values must lie in (0, 1]");
  }
  for (double e : c.robust_epsilons) {
    require(e >= 0.0 && e <= 1.0, "sweep.robust_epsilons", "values must lie in [0, 1]");
  }
  for (auto k : c.batch_sizes) require(k >= 1, "sweep.batch_sizes", "values must be >= 1");
  require(c.basin_points >= 0, "sweep.basin_points", "must be >= 0");
}

}  // namespace ipdrl
