#ifndef FOODQUIZ_STATS_HPP_
#define FOODQUIZ_STATS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foodquiz/common.hpp"
#include "foodquiz/engine.hpp"

namespace foodquiz {

inline constexpr double kDefaultBmiCutoff = 28.7;
inline constexpr double kKgPerLb = 0.45359237;
inline constexpr double kMetersPerInch = 0.0254;

inline double lbs_to_kg(double lbs) { return lbs * kKgPerLb; }
inline double kg_to_lbs(double kg) { return kg / kKgPerLb; }
inline double inches_to_m(double in) { return in * kMetersPerInch; }
inline double m_to_inches(double m) { return m / kMetersPerInch; }

/// weight / height^2. Requires 0.5 < height < 2.8 m and 20 < weight < 400
/// kg, otherwise throws a validation error coded implausible_anthropometry.
double bmi(double weight_kg, double height_m);

/// Positive iff bmi >= cutoff.
inline bool label_individual(double bmi_value, double cutoff = kDefaultBmiCutoff) {
  return bmi_value >= cutoff;
}

enum class Gender { female, male, other, undisclosed };

std::string to_string(Gender g);
Gender parse_gender(const std::string& s);

struct RespondentRecord {
  std::string session_id;
  std::vector<AnswerEvent> transcript;
  std::optional<Vote> prediction;
  std::optional<double> height_m;
  std::optional<double> weight_kg;
  std::optional<double> age;
  std::optional<Gender> gender;
  std::optional<std::string> location;
  /// Network name -> handle. The service stores salted hashes only.
  std::map<std::string, std::string> handles;
  std::optional<std::string> comment;

  // Derived by derive_outcome().
  std::optional<double> bmi;
  std::optional<bool> true_label;
  std::optional<bool> correct;
};

/// Fills bmi / true_label / correct when height, weight and a prediction
/// allow it; clears them otherwise.
void derive_outcome(RespondentRecord& record, double cutoff = kDefaultBmiCutoff);

json to_json(const RespondentRecord& record);
RespondentRecord record_from_json(const json& doc);

std::vector<RespondentRecord> read_records_jsonl(const std::string& text,
                                                 double cutoff = kDefaultBmiCutoff);
std::string write_records_jsonl(const std::vector<RespondentRecord>& records);

struct ClassAccuracy {
  std::size_t n = 0;
  std::size_t correct = 0;
  double proportion = 0.0;  // n / evaluated
  double accuracy = 0.0;    // correct / n, 0 for an empty class
};

struct AccuracyReport {
  double cutoff = kDefaultBmiCutoff;
  std::size_t n = 0;  // records with both bmi and prediction
  std::size_t correct = 0;
  double overall = 0.0;
  ClassAccuracy at_or_above;  // bmi >= cutoff
  ClassAccuracy below;
  std::size_t ties = 0;
  std::size_t missing_bmi = 0;
  std::size_t missing_prediction = 0;
};

/// Overall accuracy with its per-class decomposition; records lacking bmi
/// or a prediction are counted separately.
AccuracyReport accuracy_report(const std::vector<RespondentRecord>& records,
                               double cutoff = kDefaultBmiCutoff);
json to_json(const AccuracyReport& report);

struct EngagementStats {
  std::size_t n_correct = 0;
  std::size_t commented_correct = 0;
  std::size_t n_incorrect = 0;
  std::size_t commented_incorrect = 0;
  double rate_correct = 0.0;
  double rate_incorrect = 0.0;
  /// rate_incorrect / rate_correct; absent when rate_correct is 0.
  std::optional<double> ratio;
};

EngagementStats engagement_from_counts(std::size_t commented_correct, std::size_t n_correct,
                                       std::size_t commented_incorrect, std::size_t n_incorrect);
/// A record counts as commenting when its comment is non-blank.
EngagementStats engagement_stats(const std::vector<RespondentRecord>& records);
json to_json(const EngagementStats& stats);

inline constexpr double kAgeBinWidth = 5.0;
inline constexpr double kBmiBinWidth = 2.0;

/// CSV tables keyed by name: age_histogram, bmi_histogram, bmi_by_gender,
/// gender_counts, location_counts, completeness. Histogram bins are
/// [lo, lo + width) with lo a multiple of the width, contiguous between
/// the smallest and largest occupied bin.
std::map<std::string, std::string> demographics_summary(
    const std::vector<RespondentRecord>& records);

/// Free-text location -> "Country/Region", "Country", or "other".
std::string coarsen_location(const std::string& text);

std::string salted_hash(const std::string& salt, const std::string& value);

/// One JSON line per record. Handles become salted hashes, session ids are
/// re-keyed, locations are coarsened, and handles or @mentions inside
/// comments are redacted.
std::string export_anonymized(const std::vector<RespondentRecord>& records,
                              const std::string& salt);

/// Reads an export back into records sufficient for accuracy reports.
std::vector<RespondentRecord> read_export(const std::string& jsonl,
                                          double cutoff = kDefaultBmiCutoff);

}  // namespace foodquiz

#endif  // FOODQUIZ_STATS_HPP_
