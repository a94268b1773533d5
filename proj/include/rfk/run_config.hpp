#pragma once

// Strict, versioned JSON run configuration ("schema": "1") and validation of
// the documents the tool writes.
//
//   {
//     "schema": "1",
//     "d": 1, "n": 2, "m": 1,
//     "radii": [[0.7, 0.4]], "heights": [0.0],   // or "centers": [[b, re, im], ...]
//     "mode": "ale" | "alf" | {"akl": J},
//     "checks": ["ricci", "kahler", ...],
//     "seed": 1,
//     "sample": {"count": 100, "r_min": 0.5, "r_max": 3.0, "exclusion_radius": 0.05},
//     "tolerances": {"ricci": 5e-5, ...}
//   }
//
// In akl mode "radii" is absent (polygon j has radius j^2) and "d", if
// present, must equal J.

#include <string>
#include <vector>

#include "rfk/verify.hpp"

namespace rfk {

struct RunConfig {
  CenterConfiguration config;
  std::vector<std::string> checks;
  SampleSpec sample;
  Tolerances tolerances;
};

/// Throws parse (syntax, unknown keys, wrong types) or the library's
/// validation errors (invalid-signature, singular-fiber, ...).
RunConfig parse_run_config(const std::string& json_text);

/// Reads and parses a file; throws path if it cannot be read.
RunConfig load_run_config(const std::string& path);

/// Canonical serialization; parse_run_config of the result reproduces the
/// same run.
std::string run_config_to_json(const RunConfig& rc);

/// Moves every center by eps along a direction drawn from the run seed. The
/// configuration becomes an explicit center list.
void apply_perturbation(RunConfig& rc, double eps);

/// Switching into akl mode rebuilds the polygon family for (n, m, J).
void apply_mode(RunConfig& rc, const Mode& mode);

void add_check(RunConfig& rc, const std::string& name);

ReportRequest to_request(const RunConfig& rc);

enum class DocumentKind { config, report, csv };

/// Accepts "config", "report" or "csv".
DocumentKind parse_document_kind(const std::string& text);

/// Validates a document written by the tool; returns a one-line summary and
/// throws parse with a diagnostic when the document is malformed.
std::string validate_document(const std::string& text, DocumentKind kind);

/// Guesses the kind from content: JSON with "schema": "1" is a config,
/// "rfk-report/1" a report, anything else is treated as CSV.
DocumentKind detect_document_kind(const std::string& text);

}  // namespace rfk
