#include "embfair/fairness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "embfair/errors.hpp"

namespace embfair {

namespace {

std::optional<double> ratio(long num, long den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

RatePair tpr_gap(const std::vector<PredictionRecord>& preds, const std::string& occupation) {
  long pos_f = 0, pos_m = 0, hit_f = 0, hit_m = 0;
  for (const auto& p : preds) {
    if (p.true_occupation != occupation) continue;
    bool hit = p.predicted_occupation == occupation;
    if (p.gender == 1) {
      ++pos_f;
      hit_f += hit;
    } else {
      ++pos_m;
      hit_m += hit;
    }
  }
  return {ratio(hit_f, pos_f), ratio(hit_m, pos_m)};
}

RatePair tnr_gap(const std::vector<PredictionRecord>& preds, const std::string& occupation) {
  long neg_f = 0, neg_m = 0, rej_f = 0, rej_m = 0;
  for (const auto& p : preds) {
    if (p.true_occupation == occupation) continue;
    bool rej = p.predicted_occupation != occupation;
    if (p.gender == 1) {
      ++neg_f;
      rej_f += rej;
    } else {
      ++neg_m;
      rej_m += rej;
    }
  }
  return {ratio(rej_f, neg_f), ratio(rej_m, neg_m)};
}

FairnessReport build_report(const std::vector<PredictionRecord>& preds) {
  if (preds.empty()) throw DataError("empty prediction list");

  struct Counts {
    long female = 0, male = 0;
  };
  std::map<std::string, Counts> occs;
  long correct = 0;
  for (const auto& p : preds) {
    auto& c = occs[p.true_occupation];
    if (p.gender == 1) {
      ++c.female;
    } else {
      ++c.male;
    }
    if (p.predicted_occupation == p.true_occupation) ++correct;
  }

  FairnessReport r;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
  double tpr_sum = 0, tnr_sum = 0;
  int tpr_n = 0, tnr_n = 0;
  for (const auto& [occ, c] : occs) {
    OccupationRow row;
    row.occupation = occ;
    row.frac_female = static_cast<double>(c.female) / static_cast<double>(c.female + c.male);
    row.tpr = tpr_gap(preds, occ);
    row.tnr = tnr_gap(preds, occ);
    if (auto g = row.tpr.signed_gap()) {
      tpr_sum += std::abs(*g);
      ++tpr_n;
    } else {
      ++r.undefined_gap_count;
    }
    if (auto g = row.tnr.signed_gap()) {
      tnr_sum += std::abs(*g);
      ++tnr_n;
    } else {
      ++r.undefined_gap_count;
    }
    r.rows.push_back(std::move(row));
  }
  // Appendix ordering: frac_female descending; ties by name for determinism.
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const OccupationRow& a, const OccupationRow& b) {
    if (a.frac_female != b.frac_female) return a.frac_female > b.frac_female;
    return a.occupation < b.occupation;
  });
  r.mean_abs_tpr_gap = tpr_n ? tpr_sum / tpr_n : 0.0;
  r.mean_abs_tnr_gap = tnr_n ? tnr_sum / tnr_n : 0.0;
  return r;
}

namespace {

std::string fmt(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

void write_report_csv(const FairnessReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "occupation,frac_female,tpr_F,tpr_M,tnr_F,tnr_M,tpr_gap,tnr_gap\n";
  for (const auto& row : r.rows) {
    out << row.occupation << ',' << fmt(row.frac_female) << ',' << fmt(row.tpr.rate_f) << ','
        << fmt(row.tpr.rate_m) << ',' << fmt(row.tnr.rate_f) << ',' << fmt(row.tnr.rate_m) << ','
        << fmt(row.tpr.signed_gap()) << ',' << fmt(row.tnr.signed_gap()) << '\n';
  }
}

void write_report_json(const FairnessReport& r, const std::string& path) {
  nlohmann::json j;
  j["accuracy"] = r.accuracy;
  j["mean_abs_tpr_gap"] = r.mean_abs_tpr_gap;
  j["mean_abs_tnr_gap"] = r.mean_abs_tnr_gap;
  j["undefined_gap_count"] = r.undefined_gap_count;
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
}

void write_predictions_csv(const std::vector<PredictionRecord>& preds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "id,true_occupation,predicted_occupation,gender\n";
  for (const auto& p : preds) {
    out << p.id << ',' << p.true_occupation << ',' << p.predicted_occupation << ','
        << (p.gender == 1 ? 'F' : 'M') << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<PredictionRecord> load_predictions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions: " + path);
  std::vector<PredictionRecord> preds;
  std::string line;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    PredictionRecord p;
    std::string gender;
    if (!std::getline(ss, p.id, ',') || !std::getline(ss, p.true_occupation, ',') ||
        !std::getline(ss, p.predicted_occupation, ',') || !std::getline(ss, gender)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed prediction row");
    }
    p.gender = gender == "F" ? 1 : 0;
    preds.push_back(std::move(p));
  }
  return preds;
}

}  // namespace embfair
