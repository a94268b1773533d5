// rfk command-line tool. Exit codes: 0 pass, 1 check failure (or invalid
// document for validate), 2 usage, configuration or runtime error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfk/rfk.h"

namespace {

constexpr int kPass = 0, kFail = 1, kError = 2;

struct Failure {
  std::string message;
};

struct Owned {
  char* p = nullptr;
  ~Owned() { rfk_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct ConfigDeleter {
  void operator()(rfk_config* c) const { rfk_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<rfk_config, ConfigDeleter>;

void check(rfk_status st, const std::string& what) {
  if (st != RFK_OK) {
    throw Failure{what + ": " + rfk_status_name(st) + ": " + rfk_last_error_message()};
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{"cannot read '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{"cannot write '" + path + "'"};
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw Failure{"write failed for '" + path + "'"};
}

struct CommonOptions {
  std::string config;
  std::string mode;
  std::vector<std::string> checks;
  long long seed = -1;
  double perturb = 0.0;
  bool has_perturb = false;
};

// --config takes a file path or inline JSON (anything starting with '{').
ConfigPtr load_config(const CommonOptions& o) {
  if (o.config.empty()) throw Failure{"--config is required"};
  rfk_config* raw = nullptr;
  const auto first = o.config.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && o.config[first] == '{') {
    check(rfk_config_parse(o.config.c_str(), &raw), "config");
  } else {
    check(rfk_config_load(o.config.c_str(), &raw), "config");
  }
  ConfigPtr cfg(raw);
  if (!o.mode.empty()) check(rfk_config_set_mode(cfg.get(), o.mode.c_str()), "--mode");
  if (o.seed >= 0) {
    check(rfk_config_set_seed(cfg.get(), static_cast<uint64_t>(o.seed)), "--seed");
  }
  for (const auto& c : o.checks) check(rfk_config_add_check(cfg.get(), c.c_str()), "--check");
  if (o.has_perturb) check(rfk_config_perturb(cfg.get(), o.perturb), "--perturb");
  return cfg;
}

void add_common(CLI::App* app, CommonOptions& o, bool with_checks) {
  app->add_option("--config", o.config, "run configuration: file path or inline JSON")
      ->required();
  app->add_option("--mode", o.mode, "override the mode: ale, alf or akl:J");
  app->add_option("--seed", o.seed, "sampling seed")->check(CLI::NonNegativeNumber);
  if (with_checks) {
    app->add_option("--check", o.checks, "check family to run (repeatable)");
    app->add_option("--perturb", o.perturb, "move every center by EPS")
        ->check(CLI::NonNegativeNumber)
        ->each([&o](const std::string&) { o.has_perturb = true; });
  }
}

int cmd_verify(const CommonOptions& o, const std::string& out, const std::string& csv_path) {
  ConfigPtr cfg = load_config(o);
  Owned report, csv;
  int pass = 0;
  check(rfk_verify(cfg.get(), &report.p, csv_path.empty() ? nullptr : &csv.p, &pass), "verify");
  write_output(out, report.str());
  if (!csv_path.empty()) write_output(csv_path, csv.str());
  const auto doc = nlohmann::json::parse(report.str());
  for (const auto& c : doc["checks"]) {
    std::fprintf(stderr, "%-5s %-28s max=%-12.4g tol=%-10.3g %s\n",
                 c["skipped"].get<bool>() ? "SKIP" : (c["pass"].get<bool>() ? "PASS" : "FAIL"),
                 c["name"].get<std::string>().c_str(), c["max_residual"].get<double>(),
                 c["tolerance"].get<double>(), c["note"].get<std::string>().c_str());
  }
  std::fprintf(stderr, "overall: %s\n", pass ? "PASS" : "FAIL");
  return pass ? kPass : kFail;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double d = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw Failure{"--point: bad number '" + item + "'"};
    v.push_back(d);
  }
  if (v.size() != 4) throw Failure{"--point needs four comma-separated coordinates"};
  return v;
}

int cmd_sample(const CommonOptions& o, const std::string& source,
               const std::vector<std::string>& points, int grid, const std::string& out) {
  ConfigPtr cfg = load_config(o);
  rfk_source src;
  if (source == "gh") {
    src = RFK_SOURCE_GH;
  } else if (source == "hitchin") {
    src = RFK_SOURCE_HITCHIN;
  } else {
    throw Failure{"--source must be gh or hitchin"};
  }
  if (points.empty() == (grid <= 0)) throw Failure{"give --point (repeatable) or --grid N"};
  Owned csv;
  if (!points.empty()) {
    std::vector<double> coords;
    for (const auto& p : points) {
      const auto v = parse_point(p);
      coords.insert(coords.end(), v.begin(), v.end());
    }
    check(rfk_sample_points_csv(cfg.get(), src, coords.data(), points.size(), &csv.p),
          "sample");
  } else {
    check(rfk_sample_grid_csv(cfg.get(), src, grid, &csv.p), "sample");
  }
  write_output(out, csv.str());
  return kPass;
}

int cmd_fit(const CommonOptions& o, const std::string& kind, const std::string& out) {
  ConfigPtr cfg = load_config(o);
  Owned result;
  int pass = 0;
  check(rfk_fit(cfg.get(), kind.c_str(), &result.p, &pass), "fit");
  write_output(out, result.str());
  const auto doc = nlohmann::json::parse(result.str());
  if (doc.contains("curvature_decay")) {
    std::fprintf(stderr, "curvature decay: slope %.6f\n",
                 doc["curvature_decay"]["slope"].get<double>());
  }
  if (doc.contains("volume_growth")) {
    std::fprintf(stderr, "volume growth:   slope %.6f\n",
                 doc["volume_growth"]["slope"].get<double>());
  }
  for (const auto& c : doc["checks"]) {
    std::fprintf(stderr, "%-5s %s: %s\n",
                 c["skipped"].get<bool>() ? "SKIP" : (c["pass"].get<bool>() ? "PASS" : "FAIL"),
                 c["name"].get<std::string>().c_str(), c["note"].get<std::string>().c_str());
  }
  return pass ? kPass : kFail;
}

int cmd_validate(const std::string& path, const std::string& kind) {
  const std::string text = read_file(path);
  Owned summary;
  const rfk_status st =
      rfk_validate(text.c_str(), kind.empty() ? nullptr : kind.c_str(), &summary.p);
  if (st == RFK_OK) {
    std::cout << path << ": " << summary.str() << '\n';
    return kPass;
  }
  if (st == RFK_PARSE) {
    std::cerr << path << ": " << summary.str() << '\n';
    return kFail;
  }
  check(st, "validate");
  return kError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct and verify ALE/ALF Ricci-flat Kahler metrics", "rfk"};
  app.set_version_flag("--version", std::string(rfk_version()));
  app.require_subcommand(0, 1);

  std::string top_validate;
  app.add_option("--validate", top_validate, "validate a config, report or CSV file");

  CommonOptions verify_opts, sample_opts, fit_opts;
  std::string verify_out, verify_csv, sample_out, fit_out, source = "gh", fit_kind = "all";
  std::string validate_path, validate_kind;
  std::vector<std::string> points;
  int grid = 0;

  auto* verify = app.add_subcommand("verify", "run the verification checks");
  add_common(verify, verify_opts, true);
  verify->add_option("--out", verify_out, "report JSON path (default stdout)");
  verify->add_option("--csv", verify_csv, "per-sample CSV path");

  auto* sample = app.add_subcommand("sample", "evaluate metric and curvature at points");
  add_common(sample, sample_opts, false);
  sample->add_option("--source", source, "gh or hitchin")
      ->check(CLI::IsMember({"gh", "hitchin"}));
  sample->add_option("--point", points, "chart coordinates c0,c1,c2,c3 (repeatable)");
  sample->add_option("--grid", grid, "number of deterministic shell samples")
      ->check(CLI::PositiveNumber);
  sample->add_option("--out,--csv", sample_out, "CSV path (default stdout)");

  auto* fit = app.add_subcommand("fit", "curvature decay and volume growth fits");
  add_common(fit, fit_opts, false);
  fit->add_option("--kind", fit_kind, "decay, volume or all")
      ->check(CLI::IsMember({"decay", "volume", "all"}));
  fit->add_option("--out", fit_out, "fit JSON path (default stdout)");

  auto* validate = app.add_subcommand("validate", "check a file written by this tool");
  validate->add_option("path", validate_path, "file to validate")->required();
  validate->add_option("--kind", validate_kind, "config, report or csv (default: detect)")
      ->check(CLI::IsMember({"config", "report", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kError;
  }

  try {
    if (*verify) return cmd_verify(verify_opts, verify_out, verify_csv);
    if (*sample) return cmd_sample(sample_opts, source, points, grid, sample_out);
    if (*fit) return cmd_fit(fit_opts, fit_kind, fit_out);
    if (*validate) return cmd_validate(validate_path, validate_kind);
    if (!top_validate.empty()) return cmd_validate(top_validate, "");
    std::cerr << app.help();
    return kError;
  } catch (const Failure& f) {
    std::cerr << "rfk: " << f.message << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "rfk: " << e.what() << '\n';
    return kError;
  }
}
