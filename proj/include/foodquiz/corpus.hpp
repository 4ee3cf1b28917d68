#ifndef FOODQUIZ_CORPUS_HPP_
#define FOODQUIZ_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace foodquiz {

/// Meal hashtags used to admit posts when no filter is configured.
std::set<std::string> default_hashtag_filter();

/// Community id -> overweight rate, binarized against the median rate.
struct CommunityLabels {
  std::vector<std::string> communities;  // file order
  std::map<std::string, double> rates;
  std::map<std::string, bool> labels;
  double median = 0.0;
  bool median_is_positive = false;

  bool contains(const std::string& community) const {
    return labels.count(community) != 0;
  }
  bool label(const std::string& community) const { return labels.at(community); }
  std::size_t count_positive() const;
};

/// Builds labels from (community, rate) pairs. A community is positive
/// iff its rate is strictly greater than the median, or greater-or-equal
/// when `median_is_positive` is set. The even-count median is the mean of
/// the two central rates.
CommunityLabels make_labels(const std::vector<std::pair<std::string, double>>& rates,
                            bool median_is_positive = false);

CommunityLabels parse_labels(std::istream& in, bool median_is_positive = false);
CommunityLabels load_labels(const std::filesystem::path& path,
                            bool median_is_positive = false);

struct RejectedLine {
  std::size_t line = 0;
  std::string community;
};

struct CommunityCorpus {
  /// Keyed by every labeled community, including ones with no documents.
  std::map<std::string, std::vector<std::string>> documents;
  std::set<std::string> hashtag_filter;
  std::size_t kept = 0;
  std::size_t discarded = 0;
  /// Lines naming a community absent from the labels file.
  std::vector<RejectedLine> rejects;

  std::vector<std::string> empty_communities() const;
  std::size_t document_count() const { return kept; }
};

/// True iff `text` contains a '#'-prefixed token from `filter`,
/// case-insensitively. Plain words never match.
bool matches_filter(const std::string& text, const std::set<std::string>& filter);

/// Reads JSONL lines of the form {"community": "...", "text": "..."}.
/// Throws a validation error naming the line number on malformed input.
CommunityCorpus parse_documents(std::istream& in, const std::set<std::string>& filter,
                                const CommunityLabels& labels);
CommunityCorpus load_documents(const std::filesystem::path& path,
                               const std::set<std::string>& filter,
                               const CommunityLabels& labels);

/// Writes the retained documents back out as JSONL, grouped by community.
void write_documents(const CommunityCorpus& corpus, std::ostream& out);

}  // namespace foodquiz

#endif  // FOODQUIZ_CORPUS_HPP_
