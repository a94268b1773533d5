#include "rfk/rfk.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include <json.hpp>

#include "rfk/errors.hpp"
#include "rfk/run_config.hpp"
#include "rfk/verify.hpp"

struct rfk_config {
  rfk::RunConfig run;
};

namespace {

thread_local std::string g_last_error;

rfk_status to_status(rfk::ErrorCode code) { return static_cast<rfk_status>(code); }

template <class F>
rfk_status guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RFK_OK;
  } catch (const rfk::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RFK_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RFK_INTERNAL;
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) rfk::fail(rfk::ErrorCode::invalid_argument, what);
}

rfk::MetricModel model_for(const rfk_config* config, rfk_source source) {
  require(config != nullptr, "null config");
  switch (source) {
    case RFK_SOURCE_GH: return rfk::MetricModel::gh(config->run.config);
    case RFK_SOURCE_HITCHIN: return rfk::MetricModel::hitchin(config->run.config);
  }
  rfk::fail(rfk::ErrorCode::invalid_argument, "unknown metric source");
}

rfk::ChartPoint chart_point(rfk_source source, const double coords[4]) {
  rfk::ChartPoint p;
  for (int i = 0; i < 4; ++i) p.coords[i] = coords[i];
  p.chart = source == RFK_SOURCE_GH ? rfk::ChartId::gh_theta_b_a : rfk::ChartId::hitchin_zy;
  return p;
}

}  // namespace

extern "C" {

rfk_status rfk_config_parse(const char* json_text, rfk_config** out) {
  return guard([&] {
    require(json_text && out, "null argument");
    *out = nullptr;
    auto* c = new rfk_config{rfk::parse_run_config(json_text)};
    *out = c;
  });
}

rfk_status rfk_config_load(const char* path, rfk_config** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = nullptr;
    auto* c = new rfk_config{rfk::load_run_config(path)};
    *out = c;
  });
}

void rfk_config_destroy(rfk_config* config) { delete config; }

rfk_status rfk_config_to_json(const rfk_config* config, char** out) {
  return guard([&] {
    require(config && out, "null argument");
    *out = duplicate(rfk::run_config_to_json(config->run));
  });
}

rfk_status rfk_config_set_mode(rfk_config* config, const char* mode) {
  return guard([&] {
    require(config && mode, "null argument");
    rfk::apply_mode(config->run, rfk::Mode::parse(mode));
  });
}

rfk_status rfk_config_set_seed(rfk_config* config, uint64_t seed) {
  return guard([&] {
    require(config != nullptr, "null config");
    config->run.sample.seed = seed;
  });
}

rfk_status rfk_config_add_check(rfk_config* config, const char* name) {
  return guard([&] {
    require(config && name, "null argument");
    rfk::add_check(config->run, name);
  });
}

rfk_status rfk_config_perturb(rfk_config* config, double eps) {
  return guard([&] {
    require(config != nullptr, "null config");
    rfk::apply_perturbation(config->run, eps);
  });
}

rfk_status rfk_config_center_count(const rfk_config* config, int* out) {
  return guard([&] {
    require(config && out, "null argument");
    *out = config->run.config.k();
  });
}

rfk_status rfk_metric(const rfk_config* config, rfk_source source, const double coords[4],
                      double g[16]) {
  return guard([&] {
    require(coords && g, "null argument");
    const auto model = model_for(config, source);
    const rfk::Mat4 m = model.metric()(chart_point(source, coords)).g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g[4 * i + j] = m[i][j];
  });
}

rfk_status rfk_curvature_norms(const rfk_config* config, rfk_source source,
                               const double coords[4], double* riem_sq, double* ricci_norm) {
  return guard([&] {
    require(coords && riem_sq && ricci_norm, "null argument");
    const auto model = model_for(config, source);
    const rfk::ChartPoint p = chart_point(source, coords);
    const rfk::CurvatureBundle c = rfk::curvature_at(model.metric(), p, model.steps(p));
    *riem_sq = c.riem_norm_sq;
    *ricci_norm = c.ricci_norm;
  });
}

rfk_status rfk_solve_b(const rfk_config* config, double z_re, double z_im, double y_abs_sq,
                       double* b, double* residual) {
  return guard([&] {
    require(config && b && residual, "null argument");
    const rfk::HitchinMetric h(config->run.config);
    const rfk::ImplicitSolution s = h.solve_b({z_re, z_im}, y_abs_sq);
    *b = s.b;
    *residual = s.residual;
  });
}

rfk_status rfk_sample_points_csv(const rfk_config* config, rfk_source source,
                                 const double* coords, size_t count, char** csv) {
  return guard([&] {
    require(csv && (coords || count == 0), "null argument");
    const auto model = model_for(config, source);
    std::vector<rfk::PointEvaluation> rows;
    for (size_t i = 0; i < count; ++i) {
      rows.push_back(rfk::evaluate_point(model, chart_point(source, coords + 4 * i)));
    }
    *csv = duplicate(rfk::evaluations_to_csv(rows));
  });
}

rfk_status rfk_sample_grid_csv(const rfk_config* config, rfk_source source, int count,
                               char** csv) {
  return guard([&] {
    require(csv != nullptr, "null argument");
    require(count >= 1, "grid count must be positive");
    const auto model = model_for(config, source);
    rfk::SampleSpec spec = config->run.sample;
    spec.count = count;
    const auto samples = rfk::sample_points(config->run.config, spec, model.source());
    std::vector<rfk::PointEvaluation> rows;
    for (const auto& s : samples) {
      rfk::ChartPoint p;
      try {
        p = model.chart_point(s);
      } catch (const rfk::Error& e) {
        rfk::PointEvaluation bad;
        bad.source = model.source();
        bad.flag = std::string(rfk::error_code_name(e.code()));
        for (auto& row : bad.g) row.fill(NAN);
        bad.riem_sq = bad.ricci_norm = NAN;
        rows.push_back(bad);
        continue;
      }
      rows.push_back(rfk::evaluate_point(model, p));
    }
    *csv = duplicate(rfk::evaluations_to_csv(rows));
  });
}

rfk_status rfk_verify(const rfk_config* config, char** report_json, char** csv, int* all_pass) {
  return guard([&] {
    require(config && report_json && all_pass, "null argument");
    const rfk::VerificationReport r = rfk::full_report(rfk::to_request(config->run));
    char* report = duplicate(r.json);
    if (csv) {
      try {
        *csv = duplicate(rfk::rows_to_csv(r.rows));
      } catch (...) {
        std::free(report);
        throw;
      }
    }
    *report_json = report;
    *all_pass = r.pass ? 1 : 0;
  });
}

rfk_status rfk_fit(const rfk_config* config, const char* kind, char** result_json,
                   int* all_pass) {
  return guard([&] {
    require(config && kind && result_json && all_pass, "null argument");
    const std::string k = kind;
    if (k != "decay" && k != "volume" && k != "all") {
      rfk::fail(rfk::ErrorCode::invalid_argument, "fit kind must be decay, volume or all");
    }
    const rfk::AsymptoticFits fits =
        rfk::decay_and_volume(config->run.config, config->run.tolerances);
    nlohmann::json doc;
    nlohmann::json records = nlohmann::json::array();
    bool pass = true;
    for (const auto& r : fits.records) {
      const bool is_decay = r.name == "decay.curvature";
      if (k != "all" && (k == "decay") != is_decay) continue;
      if (r.skipped && k != "all") {
        rfk::fail(rfk::ErrorCode::not_applicable, r.name + ": " + r.note);
      }
      records.push_back({{"name", r.name},
                         {"pass", r.pass},
                         {"skipped", r.skipped},
                         {"max_residual", r.max_residual},
                         {"tolerance", r.tolerance},
                         {"note", r.note}});
      pass = pass && r.pass;
    }
    auto fit = [](const rfk::FitResult& f) {
      return nlohmann::json{{"slope", f.slope},
                            {"intercept", f.intercept},
                            {"rms_residual", f.rms_residual},
                            {"point_count", f.point_count}};
    };
    if (fits.decay && k != "volume") {
      nlohmann::json d = fit(fits.decay->fit);
      d["flat"] = fits.decay->flat;
      d["ale_radii"] = fits.decay->ale_radii;
      d["mean_riem_sq"] = fits.decay->mean_riem_sq;
      doc["curvature_decay"] = d;
    }
    if (fits.volume && k != "decay") {
      nlohmann::json v = fit(fits.volume->fit);
      v["geodesic_radii"] = fits.volume->geodesic_radii;
      v["volumes"] = fits.volume->volumes;
      doc["volume_growth"] = v;
    }
    doc["checks"] = records;
    doc["pass"] = pass;
    *result_json = duplicate(doc.dump(2));
    *all_pass = pass ? 1 : 0;
  });
}

rfk_status rfk_validate(const char* text, const char* kind, char** summary) {
  if (!text || !summary) {
    g_last_error = "null argument";
    return RFK_INVALID_ARGUMENT;
  }
  *summary = nullptr;
  std::string line;
  const rfk_status st = guard([&] {
    const rfk::DocumentKind k =
        kind ? rfk::parse_document_kind(kind) : rfk::detect_document_kind(text);
    line = rfk::validate_document(text, k);
  });
  try {
    *summary = duplicate(st == RFK_OK ? line : "invalid: " + g_last_error);
  } catch (...) {
    return RFK_INTERNAL;
  }
  return st;
}

void rfk_string_free(char* s) { std::free(s); }

const char* rfk_status_name(rfk_status status) {
  switch (status) {
    case RFK_OK: return "ok";
    case RFK_INTERNAL: return "internal";
    default: break;
  }
  const int v = static_cast<int>(status);
  if (v >= 1 && v <= static_cast<int>(rfk::ErrorCode::not_applicable)) {
    return rfk::error_code_name(static_cast<rfk::ErrorCode>(v)).data();
  }
  return "unknown";
}

const char* rfk_last_error_message(void) { return g_last_error.c_str(); }

const char* rfk_version(void) { return "1.0.0"; }

}  // extern "C"
