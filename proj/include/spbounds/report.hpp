#ifndef SPBOUNDS_REPORT_HPP
#define SPBOUNDS_REPORT_HPP

// JSON and CSV forms of generator specs, run configs, bound reports,
// certification outcomes and sweeps. All JSON objects keep insertion order
// and every double goes through the same formatter, so a fixed run produces
// byte-identical files.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "spbounds/bounds.hpp"
#include "spbounds/generators.hpp"
#include "spbounds/harness.hpp"
#include "spbounds/io.hpp"

namespace spbounds {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidConfig, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_key(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return required<T>(j, key);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// GeneratorSpec: {"family": ..., "params": {...}, "seed": N}
//   toy:    b1, b2, testMode (optional, default false)
//   remark: alpha
//   angles: n, m, aEigs[n-m], bSingVals[m], thetas[m]
//   ipm:    n, m, delta
//   random: n, m

inline Json params_to_json(const FamilyParams& params) {
  struct Visitor {
    Json operator()(const ToyParams& p) const {
      return Json{{"b1", p.b1}, {"b2", p.b2}, {"testMode", p.testMode}};
    }
    Json operator()(const RemarkParams& p) const { return Json{{"alpha", p.alpha}}; }
    Json operator()(const AnglesParams& p) const {
      return Json{{"n", p.n}, {"m", p.m}, {"aEigs", p.aEigs}, {"bSingVals", p.bSingVals}, {"thetas", p.thetas}};
    }
    Json operator()(const IpmParams& p) const { return Json{{"n", p.n}, {"m", p.m}, {"delta", p.delta}}; }
    Json operator()(const RandomParams& p) const { return Json{{"n", p.n}, {"m", p.m}}; }
  };
  return std::visit(Visitor{}, params);
}

inline FamilyParams params_from_json(const std::string& family, const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "params must be a JSON object");
  if (family == "toy") {
    return ToyParams{detail::required<double>(j, "b1"), detail::required<double>(j, "b2"),
                     detail::optional_key<bool>(j, "testMode", false)};
  }
  if (family == "remark") return RemarkParams{detail::required<double>(j, "alpha")};
  if (family == "angles") {
    return AnglesParams{detail::required<Index>(j, "n"), detail::required<Index>(j, "m"),
                        detail::required<std::vector<double>>(j, "aEigs"),
                        detail::required<std::vector<double>>(j, "bSingVals"),
                        detail::required<std::vector<double>>(j, "thetas")};
  }
  if (family == "ipm") {
    return IpmParams{detail::required<Index>(j, "n"), detail::required<Index>(j, "m"),
                     detail::required<double>(j, "delta")};
  }
  if (family == "random") return RandomParams{detail::required<Index>(j, "n"), detail::required<Index>(j, "m")};
  throw Error(ErrorCode::InvalidConfig, "unknown family '" + family + "'");
}

inline Json to_json(const GeneratorSpec& spec) {
  return Json{{"family", std::string(family_name(spec.params))},
              {"params", params_to_json(spec.params)},
              {"seed", spec.seed}};
}

inline GeneratorSpec generator_spec_from_json(const Json& j) {
  GeneratorSpec spec;
  spec.params = params_from_json(detail::required<std::string>(j, "family"), j.value("params", Json::object()));
  spec.seed = detail::optional_key<std::uint64_t>(j, "seed", 0);
  return spec;
}

// ---------------------------------------------------------------------------

inline Json to_json(const RunConfig& c) {
  return Json{{"relTol", c.tolerances.relTol},
              {"angleTol", c.tolerances.angleTol},
              {"strictPsd", c.tolerances.strictPsd},
              {"certSlack", c.certSlack},
              {"gammaMin", c.gammaMin},
              {"gammaMax", c.gammaMax},
              {"gammaPoints", c.gammaPoints},
              {"format", c.format == OutputFormat::Json ? "json" : "csv"},
              {"seed", c.seed},
              {"oracleCap", c.oracleCap}};
}

/// Missing keys keep their defaults.
inline RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  c.tolerances.relTol = detail::optional_key<double>(j, "relTol", c.tolerances.relTol);
  c.tolerances.angleTol = detail::optional_key<double>(j, "angleTol", c.tolerances.angleTol);
  c.tolerances.strictPsd = detail::optional_key<bool>(j, "strictPsd", c.tolerances.strictPsd);
  c.certSlack = detail::optional_key<double>(j, "certSlack", c.certSlack);
  c.gammaMin = detail::optional_key<double>(j, "gammaMin", c.gammaMin);
  c.gammaMax = detail::optional_key<double>(j, "gammaMax", c.gammaMax);
  c.gammaPoints = detail::optional_key<std::size_t>(j, "gammaPoints", c.gammaPoints);
  const std::string fmt = detail::optional_key<std::string>(j, "format", "json");
  if (fmt != "json" && fmt != "csv") throw Error(ErrorCode::InvalidConfig, "format must be json or csv");
  c.format = fmt == "json" ? OutputFormat::Json : OutputFormat::Csv;
  c.seed = detail::optional_key<std::uint64_t>(j, "seed", c.seed);
  c.oracleCap = detail::optional_key<Index>(j, "oracleCap", c.oracleCap);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

inline Json to_json(const SpectralSummary& s) {
  return Json{{"muMax", s.muMax},         {"muMin", s.muMin},       {"muMinPlus", s.muMinPlus},
              {"sigmaMax", s.sigmaMax},   {"sigmaMin", s.sigmaMin}, {"rankA", s.rankA},
              {"nullityA", s.nullityA},   {"relTol", s.relTol}};
}

inline Json to_json(const BoundReport& r) {
  Json j{{"name", std::string(to_string(r.kind))}, {"value", detail::real_or_null(r.value)}};
  if (r.negative) j["negativeInterval"] = Json::array({r.negative->lo, r.negative->hi});
  if (r.positive) j["positiveInterval"] = Json::array({r.positive->lo, r.positive->hi});
  Json inputs = Json::object();
  if (r.gamma) inputs["gamma"] = *r.gamma;
  if (r.rho) inputs["rho"] = *r.rho;
  if (r.thetaMin) inputs["thetaMin"] = *r.thetaMin;
  if (r.muNm) inputs["muNm"] = *r.muNm;
  if (r.augmentedBlockBound) inputs["augmentedBlockBound"] = *r.augmentedBlockBound;
  if (r.muMinAugmented) inputs["muMinAugmented"] = *r.muMinAugmented;
  j["inputs"] = inputs;
  j["activeTerm"] = std::string(to_string(r.active));
  j["assumptionsMet"] = r.assumptionsMet;
  j["warnings"] = r.warnings;
  return j;
}

inline Json to_json(const OracleResult& o) {
  return Json{{"muMinPlusK", o.muMinPlusK}, {"threshold", o.threshold}, {"posCount", o.posCount},
              {"negCount", o.negCount},     {"zeroCount", o.zeroCount}, {"inertiaOk", o.inertiaOk}};
}

inline Json to_json(const CertificationOutcome& c) {
  return Json{{"status", std::string(to_string(c.status))}, {"slack", detail::real_or_null(c.slack)}};
}

inline Json to_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const SweepRow& r : s.rows) {
    rows.push_back(Json{{"gamma", r.gamma},
                        {"invGamma", r.invGamma},
                        {"muMinAgamma", r.muMinAgamma},
                        {"predictedBound", r.predictedBound},
                        {"actualMinPosEig", r.actualMuMinPlusK}});
  }
  Json j{{"rows", rows}};
  j["crossingIndex"] = s.crossingIndex ? Json(*s.crossingIndex) : Json(nullptr);
  j["argmaxIndex"] = s.rows.empty() ? Json(nullptr) : Json(sweep_argmax(s));
  return j;
}

inline std::string sweep_csv(const SweepResult& s) {
  std::ostringstream out;
  out << "gamma,inv_gamma,mu_min_A_gamma,predicted_bound,actual_min_pos_eig\n";
  for (const SweepRow& r : s.rows) {
    out << format_real(r.gamma) << ',' << format_real(r.invGamma) << ',' << format_real(r.muMinAgamma) << ','
        << format_real(r.predictedBound) << ',' << format_real(r.actualMuMinPlusK) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

/// Everything one CLI run produced.
struct RunReport {
  Json problem = Json::object();  // source description plus structural facts
  RunConfig config;
  std::vector<BoundReport> bounds;
  std::optional<OracleResult> oracle;  // absent when n+m exceeds the cap
  std::vector<CertificationOutcome> certification;  // parallel to bounds
  std::optional<SweepResult> sweep;
  std::vector<std::string> notes;
};

inline Json describe_problem(const SaddleProblem& p) {
  return Json{{"n", p.n()},
              {"m", p.m()},
              {"rankA", p.rankA()},
              {"lowestRank", p.lowestRank()},
              {"psdClamped", p.psdClamped()},
              {"relTol", p.relTol()},
              {"angleTol", p.angleTol()},
              {"summary", to_json(spectral_summary(p))}};
}

inline Json to_json(const RunReport& r) {
  Json bounds = Json::array();
  for (const auto& b : r.bounds) bounds.push_back(to_json(b));
  Json cert = nullptr;
  if (r.oracle) {
    Json outcomes = Json::array();
    for (std::size_t i = 0; i < r.certification.size(); ++i) {
      Json o = to_json(r.certification[i]);
      o["bound"] = std::string(to_string(r.bounds[i].kind));
      outcomes.push_back(std::move(o));
    }
    cert = Json{{"oracle", to_json(*r.oracle)}, {"outcomes", outcomes}};
  }
  return Json{{"problem", r.problem},
              {"config", to_json(r.config)},
              {"bounds", bounds},
              {"certification", cert},
              {"sweep", r.sweep ? to_json(*r.sweep) : Json(nullptr)},
              {"notes", r.notes}};
}

inline std::string bounds_csv(const RunReport& r) {
  std::ostringstream out;
  out << "name,value,active_term,assumptions_met,certification,slack,warnings\n";
  for (std::size_t i = 0; i < r.bounds.size(); ++i) {
    const BoundReport& b = r.bounds[i];
    std::string warnings;
    for (const auto& w : b.warnings) warnings += (warnings.empty() ? "" : ";") + w;
    out << to_string(b.kind) << ',' << format_real(b.value) << ',' << to_string(b.active) << ','
        << (b.assumptionsMet ? "true" : "false") << ',';
    if (i < r.certification.size()) {
      out << to_string(r.certification[i].status) << ',' << format_real(r.certification[i].slack);
    } else {
      out << ',';
    }
    out << ',' << warnings << '\n';
  }
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

/// Writes report.json (always), plus bounds.csv and sweep.csv when the run
/// has bounds or a sweep. Returns the paths written.
inline std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const RunReport& r) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
  written.push_back(dir / "report.json");
  if (!r.bounds.empty()) {
    write_text(dir / "bounds.csv", bounds_csv(r));
    written.push_back(dir / "bounds.csv");
  }
  if (r.sweep) {
    write_text(dir / "sweep.csv", sweep_csv(*r.sweep));
    written.push_back(dir / "sweep.csv");
  }
  return written;
}

}  // namespace spbounds

#endif  // SPBOUNDS_REPORT_HPP
