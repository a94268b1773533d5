#include "rfk/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rfk/errors.hpp"

namespace rfk {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::parse, "config: " + what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
  }
}

int get_int(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

double as_double(const json& v, const std::string& what) {
  if (!v.is_number()) bad(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(what + " must be finite");
  return d;
}

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array()) bad(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_double(e, what + " entry"));
  return out;
}

Mode parse_mode(const json& v) {
  if (v.is_string()) {
    const Mode m = Mode::parse(v.get<std::string>());
    if (m.kind == ModeKind::akl) bad("write akl mode as {\"akl\": J}");
    return m;
  }
  if (v.is_object() && v.size() == 1 && v.contains("akl")) {
    if (!v["akl"].is_number_integer()) bad("akl truncation must be an integer");
    return Mode::akl(v["akl"].get<int>());
  }
  bad("'mode' must be \"ale\", \"alf\" or {\"akl\": J}");
}

// Tolerance fields in serialization order.
std::vector<std::pair<const char*, double Tolerances::*>> tolerance_fields() {
  return {{"ricci", &Tolerances::ricci},
          {"closedness", &Tolerances::closedness},
          {"nijenhuis", &Tolerances::nijenhuis},
          {"compatibility", &Tolerances::compatibility},
          {"invariance", &Tolerances::invariance},
          {"cross_spread", &Tolerances::cross_spread},
          {"period", &Tolerances::period},
          {"decay_band", &Tolerances::decay_band},
          {"volume_band", &Tolerances::volume_band}};
}

RunConfig build(const json& doc) {
  if (!doc.is_object()) bad("top level must be an object");
  reject_unknown(doc,
                 {"schema", "d", "n", "m", "radii", "heights", "centers", "mode", "checks",
                  "seed", "sample", "tolerances"},
                 "config");
  if (!doc.contains("schema") || doc["schema"] != "1") bad("\"schema\": \"1\" is required");
  for (const char* key : {"n", "m"}) {
    if (!doc.contains(key)) bad(std::string("missing '") + key + "'");
  }
  const int n = get_int(doc, "n"), m = get_int(doc, "m");
  const Mode mode = doc.contains("mode") ? parse_mode(doc["mode"]) : Mode::ale();
  if (doc.contains("radii") && doc.contains("centers")) bad("give either 'radii' or 'centers'");

  std::vector<double> heights;
  if (doc.contains("heights")) {
    if (doc.contains("centers")) bad("'heights' only accompanies 'radii'");
    heights = number_list(doc["heights"], "'heights'");
  }
  std::vector<Center> centers;
  if (doc.contains("centers")) {
    if (!doc["centers"].is_array()) bad("'centers' must be an array of [b, re, im]");
    for (const auto& c : doc["centers"]) {
      const auto v = number_list(c, "center");
      if (v.size() != 3) bad("each center is [b, re a, im a]");
      centers.push_back({v[0], {v[1], v[2]}});
    }
  }

  RunConfig rc;
  if (mode.kind == ModeKind::akl) {
    const int J = mode.akl_j_max;
    if (doc.contains("d") && get_int(doc, "d") != J) bad("in akl mode 'd' must equal J");
    if (doc.contains("radii")) bad("akl mode fixes the radii; remove 'radii'");
    if (!centers.empty()) {
      rc.config = make_explicit_config(centers, QuotientSignature(J, n, m), mode);
    } else {
      if (!heights.empty() && static_cast<int>(heights.size()) != J) {
        bad("akl mode needs J heights");
      }
      rc.config = make_akl_config(n, m, J, heights);
    }
  } else {
    if (!doc.contains("d")) bad("missing 'd'");
    const QuotientSignature sig(get_int(doc, "d"), n, m);
    if (doc.contains("radii")) {
      if (!doc["radii"].is_array()) bad("'radii' must be an array of [re, im]");
      std::vector<cplx> radii;
      for (const auto& r : doc["radii"]) {
        const auto v = number_list(r, "radius");
        if (v.size() != 2) bad("each radius is [re, im]");
        radii.push_back({v[0], v[1]});
      }
      if (heights.empty()) heights.assign(radii.size(), 0.0);
      rc.config = make_polygon_config(sig, radii, heights, mode);
    } else if (!centers.empty() || doc.contains("centers")) {
      rc.config = make_explicit_config(centers, sig, mode);
    } else {
      bad("need 'radii' or 'centers'");
    }
  }

  if (doc.contains("checks")) {
    if (!doc["checks"].is_array()) bad("'checks' must be an array of names");
    for (const auto& c : doc["checks"]) {
      if (!c.is_string()) bad("check names are strings");
      add_check(rc, c.get<std::string>());
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) bad("'seed' must be a non-negative integer");
    rc.sample.seed = doc["seed"].get<std::uint64_t>();
  }
  const double s = mode.kind == ModeKind::akl ? 1.0 : std::max(1.0, rc.config.extent());
  rc.sample.r_min = 0.5 * s;
  rc.sample.r_max = 3.0 * s;
  if (doc.contains("sample")) {
    const json& sp = doc["sample"];
    if (!sp.is_object()) bad("'sample' must be an object");
    reject_unknown(sp, {"count", "r_min", "r_max", "exclusion_radius"}, "sample");
    if (sp.contains("count")) {
      rc.sample.count = get_int(sp, "count");
      if (rc.sample.count < 1) bad("sample count must be positive");
    }
    if (sp.contains("r_min")) rc.sample.r_min = as_double(sp["r_min"], "r_min");
    if (sp.contains("r_max")) rc.sample.r_max = as_double(sp["r_max"], "r_max");
    if (sp.contains("exclusion_radius")) {
      rc.sample.exclusion_radius = as_double(sp["exclusion_radius"], "exclusion_radius");
    }
    if (!(rc.sample.r_min >= 0) || !(rc.sample.r_max > rc.sample.r_min) ||
        !(rc.sample.exclusion_radius >= 0)) {
      bad("sample needs 0 <= r_min < r_max and exclusion_radius >= 0");
    }
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) bad("'tolerances' must be an object");
    std::set<std::string> allowed;
    for (const auto& [name, field] : tolerance_fields()) allowed.insert(name);
    reject_unknown(t, allowed, "tolerances");
    for (const auto& [name, field] : tolerance_fields()) {
      if (!t.contains(name)) continue;
      const double v = as_double(t[name], std::string("tolerance '") + name + "'");
      if (!(v > 0)) bad(std::string("tolerance '") + name + "' must be positive");
      rc.tolerances.*field = v;
    }
  }
  return rc;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("config: malformed JSON: ") + e.what());
  }
  try {
    return build(doc);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::path, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_run_config(os.str());
}

std::string run_config_to_json(const RunConfig& rc) {
  const CenterConfiguration& cfg = rc.config;
  ojson doc;
  doc["schema"] = "1";
  doc["d"] = cfg.signature.d();
  doc["n"] = cfg.signature.n();
  doc["m"] = cfg.signature.m();
  const bool akl = cfg.mode.kind == ModeKind::akl;
  if (cfg.from_polygons()) {
    if (!akl) {
      ojson radii = ojson::array();
      for (const cplx& c : cfg.radii) radii.push_back({c.real(), c.imag()});
      doc["radii"] = radii;
    }
    doc["heights"] = cfg.heights;
  } else {
    ojson centers = ojson::array();
    for (const auto& c : cfg.centers) centers.push_back({c.b, c.a.real(), c.a.imag()});
    doc["centers"] = centers;
  }
  if (akl) {
    doc["mode"] = {{"akl", cfg.mode.akl_j_max}};
  } else {
    doc["mode"] = cfg.mode.to_string();
  }
  doc["checks"] = rc.checks;
  doc["seed"] = rc.sample.seed;
  doc["sample"] = {{"count", rc.sample.count},
                   {"r_min", rc.sample.r_min},
                   {"r_max", rc.sample.r_max},
                   {"exclusion_radius", rc.sample.exclusion_radius}};
  ojson tol;
  for (const auto& [name, field] : tolerance_fields()) tol[name] = rc.tolerances.*field;
  doc["tolerances"] = tol;
  return doc.dump(2);
}

void apply_perturbation(RunConfig& rc, double eps) {
  if (!(eps >= 0) || !std::isfinite(eps)) {
    fail(ErrorCode::invalid_argument, "perturbation must be finite and non-negative");
  }
  rc.config = perturbed(rc.config, eps, rc.sample.seed);
}

void apply_mode(RunConfig& rc, const Mode& mode) {
  if (mode.kind == ModeKind::akl) {
    rc.config = make_akl_config(rc.config.signature.n(), rc.config.signature.m(),
                                mode.akl_j_max);
    return;
  }
  rc.config.mode = mode;
}

void add_check(RunConfig& rc, const std::string& name) {
  const auto& names = check_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    fail(ErrorCode::parse, "unknown check '" + name + "' (known: " + list + ")");
  }
  if (std::find(rc.checks.begin(), rc.checks.end(), name) == rc.checks.end()) {
    rc.checks.push_back(name);
  }
}

ReportRequest to_request(const RunConfig& rc) {
  ReportRequest req;
  req.config = rc.config;
  req.checks = rc.checks;
  req.sample = rc.sample;
  req.tolerances = rc.tolerances;
  req.config_echo = run_config_to_json(rc);
  return req;
}

DocumentKind parse_document_kind(const std::string& text) {
  if (text == "config") return DocumentKind::config;
  if (text == "report") return DocumentKind::report;
  if (text == "csv") return DocumentKind::csv;
  fail(ErrorCode::parse, "document kind must be config, report or csv (got '" + text + "')");
}

DocumentKind detect_document_kind(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) return DocumentKind::csv;
  if (doc.is_object() && doc.contains("schema") && doc["schema"] == "1") {
    return DocumentKind::config;
  }
  return DocumentKind::report;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool numeric_column(const std::string& name) {
  if (name == "residual" || name == "riem_sq" || name == "ricci_norm") return true;
  if (name.size() >= 2 && (name[0] == 'c' || name[0] == 'g')) {
    return std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; });
  }
  return false;
}

bool parses_as_double(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string validate_report(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::parse, "report: malformed JSON");
  if (!doc.is_object() || doc.value("schema", "") != "rfk-report/1") {
    fail(ErrorCode::parse, "report: missing \"schema\": \"rfk-report/1\"");
  }
  if (!doc.contains("config") || !doc["config"].is_object()) {
    fail(ErrorCode::parse, "report: missing config echo");
  }
  if (!doc.contains("checks") || !doc["checks"].is_array()) {
    fail(ErrorCode::parse, "report: missing checks array");
  }
  if (!doc.contains("pass") || !doc["pass"].is_boolean()) {
    fail(ErrorCode::parse, "report: missing boolean 'pass'");
  }
  bool all = !doc["checks"].empty();
  for (const auto& c : doc["checks"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string() ||
        !c.contains("pass") || !c["pass"].is_boolean() || !c.contains("tolerance") ||
        !c["tolerance"].is_number()) {
      fail(ErrorCode::parse, "report: malformed check record");
    }
    all = all && c["pass"].get<bool>();
  }
  if (all != doc["pass"].get<bool>()) {
    fail(ErrorCode::parse, "report: overall pass disagrees with the check records");
  }
  std::ostringstream os;
  os << "report: valid (" << doc["checks"].size() << " checks, pass = "
     << (all ? "true" : "false") << ")";
  return os.str();
}

std::string validate_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty()) fail(ErrorCode::parse, "csv: missing header");
  const auto header = split_fields(line);
  std::set<std::string> seen;
  for (const auto& h : header) {
    if (h.empty() || !seen.insert(h).second) {
      fail(ErrorCode::parse, "csv: empty or repeated column name");
    }
  }
  int rows = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      fail(ErrorCode::parse, "csv: blank line " + std::to_string(lineno));
    }
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::parse, "csv: line " + std::to_string(lineno) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (numeric_column(header[i]) && !parses_as_double(fields[i])) {
        fail(ErrorCode::parse, "csv: line " + std::to_string(lineno) + ", column '" +
                                   header[i] + "' is not numeric");
      }
    }
    ++rows;
  }
  return "csv: valid (" + std::to_string(rows) + " rows, " + std::to_string(header.size()) +
         " columns)";
}

}  // namespace

std::string validate_document(const std::string& text, DocumentKind kind) {
  switch (kind) {
    case DocumentKind::config: {
      const RunConfig rc = parse_run_config(text);
      return "config: valid (" + std::to_string(rc.config.k()) + " centers, mode " +
             rc.config.mode.to_string() + ")";
    }
    case DocumentKind::report: return validate_report(text);
    case DocumentKind::csv: return validate_csv(text);
  }
  return {};
}

}  // namespace rfk
