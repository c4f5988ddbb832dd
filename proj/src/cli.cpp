#include "afshape/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "afshape/metrics.hpp"
#include "afshape/serialize.hpp"

namespace afshape {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct HelpRequested {
  std::string text;
};

int parse_int(std::string_view s, const std::string& field) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw ConfigError(field, "'" + std::string(s) + "' is not an integer");
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

ZetaPolicy parse_zeta_policy(const std::string& s) {
  if (s == "exact") return ZetaPolicy::kExact;
  if (s == "bound") return ZetaPolicy::kBound;
  throw ConfigError("zeta_policy", "expected 'exact' or 'bound', got '" + s + "'");
}

const char* zeta_policy_name(ZetaPolicy p) { return p == ZetaPolicy::kExact ? "exact" : "bound"; }

GammaMode parse_gamma_mode(const std::string& s) {
  if (s == "frobenius") return GammaMode::kFrobenius;
  if (s == "exact") return GammaMode::kExact;
  throw ConfigError("gamma_x", "expected 'frobenius' or 'exact', got '" + s + "'");
}

const char* gamma_mode_name(GammaMode m) { return m == GammaMode::kFrobenius ? "frobenius" : "exact"; }

std::vector<int> index_list_from_json(const json& j, const std::string& field) {
  if (j.is_string()) return parse_index_list(j.get<std::string>(), field);
  if (j.is_number_integer()) return {j.get<int>()};
  if (j.is_array()) {
    std::vector<int> out;
    for (const auto& e : j) {
      if (!e.is_number_integer()) throw ConfigError(field, "array entries must be integers");
      out.push_back(e.get<int>());
    }
    return out;
  }
  throw ConfigError(field, "expected an integer list or a range string");
}

template <typename T>
T json_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("invalid value in config file: ") + e.what());
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<int> parse_index_list(std::string_view text, const std::string& field) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string tok = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                     : comma - start));
    if (tok.empty()) throw ConfigError(field, "empty entry in index list '" + std::string(text) + "'");
    if (const auto dots = tok.find(".."); dots != std::string::npos) {
      const int lo = parse_int(trim(tok.substr(0, dots)), field);
      const int hi = parse_int(trim(tok.substr(dots + 2)), field);
      if (lo > hi) throw ConfigError(field, "range '" + tok + "' is decreasing");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_int(tok, field));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

json config_to_json(const SolverConfig& c) {
  return {{"n", c.n},
          {"k", c.region.lags()},
          {"p", c.region.bins()},
          {"gamma1", c.gamma1},
          {"gamma2", c.gamma2},
          {"epsilon", c.epsilon},
          {"inner_epsilon", c.inner_epsilon},
          {"seed", c.seed},
          {"zeta_policy", zeta_policy_name(c.zeta_policy)},
          {"delta", c.delta},
          {"gamma_x", gamma_mode_name(c.gamma_mode)}};
}

SolverConfig config_from_json(const json& j, SolverConfig c) {
  if (!j.is_object()) throw ConfigError("config", "config file must hold a JSON object");
  if (j.contains("n")) c.n = json_field<int>(j, "n");
  std::vector<int> lags = c.region.lags(), bins = c.region.bins();
  if (j.contains("k")) lags = index_list_from_json(j.at("k"), "k");
  if (j.contains("p")) bins = index_list_from_json(j.at("p"), "p");
  c.region = RegionSpec(std::move(lags), std::move(bins));
  if (j.contains("gamma1")) c.gamma1 = json_field<int>(j, "gamma1");
  if (j.contains("gamma2")) c.gamma2 = json_field<int>(j, "gamma2");
  if (j.contains("epsilon")) c.epsilon = json_field<double>(j, "epsilon");
  if (j.contains("inner_epsilon")) c.inner_epsilon = json_field<double>(j, "inner_epsilon");
  if (j.contains("seed")) c.seed = json_field<std::uint64_t>(j, "seed");
  if (j.contains("zeta_policy")) c.zeta_policy = parse_zeta_policy(json_field<std::string>(j, "zeta_policy"));
  if (j.contains("delta")) c.delta = json_field<double>(j, "delta");
  if (j.contains("gamma_x")) c.gamma_mode = parse_gamma_mode(json_field<std::string>(j, "gamma_x"));
  return c;
}

CliOptions parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Unimodular slow-time code design with a suppressed ambiguity-function region", "afshape"};
  std::optional<int> n, gamma1, gamma2;
  std::optional<std::string> k, p, zeta_policy, gamma_x, config_file;
  std::optional<double> epsilon, inner_epsilon, delta;
  std::optional<std::uint64_t> seed;
  CliOptions opts;

  app.add_option("--n", n, "Code length N");
  app.add_option("--k", k, "Delay lags, e.g. 5,6,7 or 5..7");
  app.add_option("--p", p, "Doppler bins, e.g. -15..-13,11..14");
  app.add_option("--gamma1", gamma1, "Maximum outer iterations");
  app.add_option("--gamma2", gamma2, "Power-method steps per outer iteration");
  app.add_option("--epsilon", epsilon, "Relative change of C that stops the outer loop");
  app.add_option("--inner-epsilon", inner_epsilon, "Optional early exit for the inner loop (0 = off)");
  app.add_option("--seed", seed, "Seed for the random initial code (fallback: AFSHAPE_SEED)");
  app.add_option("--zeta-policy", zeta_policy, "Diagonal loading: exact | bound");
  app.add_option("--delta", delta, "Loading margin added to the eigenvalue bound");
  app.add_option("--gamma-x", gamma_x, "UQP loading: frobenius | exact");
  app.add_option("--out", opts.outdir, "Output directory");
  app.add_option("--config", config_file, "JSON config file; flags override its values");
  app.add_flag("--dry-run", opts.dry_run, "Validate the configuration and exit without writing");
  app.add_flag("--verbose", opts.verbose, "Record and export the inner-iteration trace");
  app.add_flag("--timing", opts.timing, "Write wall-clock times into trace.csv");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError("arguments", e.what());
  }

  SolverConfig c;
  // Default region: lags 5..7, bins -15..-13 and 11..14 at N = 31.
  c.region = RegionSpec({5, 6, 7}, {-15, -14, -13, 11, 12, 13, 14});
  bool seed_set = false;
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw ConfigError("config", "cannot read '" + *config_file + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    c = config_from_json(j, c);
    seed_set = j.contains("seed");
  }
  if (n) c.n = *n;
  if (k || p)
    c.region = RegionSpec(k ? parse_index_list(*k, "k") : c.region.lags(), p ? parse_index_list(*p, "p") : c.region.bins());
  if (gamma1) c.gamma1 = *gamma1;
  if (gamma2) c.gamma2 = *gamma2;
  if (epsilon) c.epsilon = *epsilon;
  if (inner_epsilon) c.inner_epsilon = *inner_epsilon;
  if (zeta_policy) c.zeta_policy = parse_zeta_policy(*zeta_policy);
  if (delta) c.delta = *delta;
  if (gamma_x) c.gamma_mode = parse_gamma_mode(*gamma_x);
  if (seed) {
    c.seed = *seed;
  } else if (!seed_set) {
    if (const char* env = std::getenv("AFSHAPE_SEED"); env && *env) {
      std::uint64_t v = 0;
      const std::string_view s(env);
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw ConfigError("seed", "AFSHAPE_SEED='" + std::string(s) + "' is not an unsigned integer");
      c.seed = v;
    }
  }
  c.record_inner = opts.verbose;
  c.validate();
  opts.config = std::move(c);
  return opts;
}

json manifest_to_json(const RunManifest& m) {
  return {{"config", m.config},
          {"tool_version", m.tool_version},
          {"started", m.started},
          {"finished", m.finished},
          {"outputs", m.outputs},
          {"initial_C", m.initial_C},
          {"final_C", m.final_C},
          {"suppression_db", m.suppression_db},
          {"zeta", m.zeta},
          {"outer_iterations", m.outer_iterations},
          {"converged", m.converged}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.config = j.at("config");
  m.tool_version = j.at("tool_version").get<std::string>();
  m.started = j.at("started").get<std::string>();
  m.finished = j.at("finished").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.initial_C = j.at("initial_C").get<double>();
  m.final_C = j.at("final_C").get<double>();
  m.suppression_db = j.at("suppression_db").get<double>();
  m.zeta = j.at("zeta").get<double>();
  m.outer_iterations = j.at("outer_iterations").get<int>();
  m.converged = j.at("converged").get<bool>();
  return m;
}

RunManifest run_and_export(const CliOptions& opts) {
  const SolverConfig& cfg = opts.config;
  RunManifest man;
  man.config = config_to_json(cfg);
  man.tool_version = kToolVersion;
  man.started = utc_now();

  const SolverResult res = run(cfg);
  const Comparison cmp = compare(res.initial, res.code, cfg.region);

  man.finished = utc_now();
  man.initial_C = res.trace.outer.front().C;
  man.final_C = res.trace.outer.back().C;
  man.suppression_db = cmp.suppression_db;
  man.zeta = res.zeta;
  man.outer_iterations = res.trace.outer.back().outer_iter;
  man.converged = res.trace.converged;

  std::error_code ec;
  const fs::path dir(opts.outdir);
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + opts.outdir + "'");

  const AFGrid grid = af_grid(res.code);
  std::vector<std::pair<std::string, std::string>> files = {
      {"code.csv", code_csv(res.code)},
      {"af_grid.csv", grid_csv(grid, false)},
      {"af_grid_db.csv", grid_csv(grid, true)},
      {"trace.csv", trace_csv(res.trace, opts.timing)},
      {"report.json", comparison_json(cmp).dump(2) + "\n"},
  };
  if (opts.verbose) files.emplace_back("inner_trace.csv", inner_trace_csv(res.trace));
  for (const auto& f : files) man.outputs.push_back((dir / f.first).string());
  man.outputs.push_back((dir / "manifest.json").string());
  files.emplace_back("manifest.json", manifest_to_json(man).dump(2) + "\n");

  std::vector<fs::path> written;
  for (const auto& [name, body] : files) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (out) out << body;
    if (!out) {
      for (const auto& w : written) fs::remove(w, ec);
      fs::remove(path, ec);
      throw IoError("failed to write '" + path.string() + "'");
    }
    written.push_back(path);
  }
  return man;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CliOptions opts;
  try {
    opts = parse_config(args);
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "afshape: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (opts.dry_run) {
    std::cout << config_to_json(opts.config).dump(2) << '\n';
    return kExitOk;
  }

  try {
    const RunManifest man = run_and_export(opts);
    std::cout << "outer iterations: " << man.outer_iterations << (man.converged ? " (converged)" : " (cap reached)")
              << "\nC: " << man.initial_C << " -> " << man.final_C << "\nregion suppression: " << man.suppression_db
              << " dB\noutputs: " << opts.outdir << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "afshape: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "afshape: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "afshape: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace afshape
