#pragma once

#include <optional>
#include <string>
#include <vector>

namespace embfair {

struct PredictionRecord {
  std::string id;
  std::string true_occupation;
  std::string predicted_occupation;
  int gender = 0;  // female=1, male=0
};

struct RatePair {
  std::optional<double> rate_f;
  std::optional<double> rate_m;
  // Defined only when both per-gender rates are.
  std::optional<double> signed_gap() const {
    if (!rate_f || !rate_m) return std::nullopt;
    return *rate_f - *rate_m;
  }
};

struct OccupationRow {
  std::string occupation;
  double frac_female = 0.0;
  RatePair tpr;
  RatePair tnr;
};

struct FairnessReport {
  std::vector<OccupationRow> rows;  // sorted by frac_female descending
  double accuracy = 0.0;
  double mean_abs_tpr_gap = 0.0;
  double mean_abs_tnr_gap = 0.0;
  int undefined_gap_count = 0;  // tpr or tnr gaps excluded for zero denominators
};

// Per-gender true-positive rates for one occupation treated as a binary
// decision; a zero denominator leaves that rate undefined.
RatePair tpr_gap(const std::vector<PredictionRecord>& preds, const std::string& occupation);
RatePair tnr_gap(const std::vector<PredictionRecord>& preds, const std::string& occupation);

FairnessReport build_report(const std::vector<PredictionRecord>& preds);

void write_report_csv(const FairnessReport& r, const std::string& path);
void write_report_json(const FairnessReport& r, const std::string& path);
void write_predictions_csv(const std::vector<PredictionRecord>& preds, const std::string& path);
std::vector<PredictionRecord> load_predictions_csv(const std::string& path);

}  // namespace embfair
