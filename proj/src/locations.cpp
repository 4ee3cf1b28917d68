#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "foodquiz/common.hpp"
#include "foodquiz/stats.hpp"

namespace foodquiz {

namespace {

struct Region {
  std::string_view code;
  std::string_view name;
};

constexpr std::array<Region, 51> kUsStates{{
    {"AL", "Alabama"},        {"AK", "Alaska"},        {"AZ", "Arizona"},
    {"AR", "Arkansas"},       {"CA", "California"},    {"CO", "Colorado"},
    {"CT", "Connecticut"},    {"DE", "Delaware"},      {"DC", "District of Columbia"},
    {"FL", "Florida"},        {"GA", "Georgia"},       {"HI", "Hawaii"},
    {"ID", "Idaho"},          {"IL", "Illinois"},      {"IN", "Indiana"},
    {"IA", "Iowa"},           {"KS", "Kansas"},        {"KY", "Kentucky"},
    {"LA", "Louisiana"},      {"ME", "Maine"},         {"MD", "Maryland"},
    {"MA", "Massachusetts"},  {"MI", "Michigan"},      {"MN", "Minnesota"},
    {"MS", "Mississippi"},    {"MO", "Missouri"},      {"MT", "Montana"},
    {"NE", "Nebraska"},       {"NV", "Nevada"},        {"NH", "New Hampshire"},
    {"NJ", "New Jersey"},     {"NM", "New Mexico"},    {"NY", "New York"},
    {"NC", "North Carolina"}, {"ND", "North Dakota"},  {"OH", "Ohio"},
    {"OK", "Oklahoma"},       {"OR", "Oregon"},        {"PA", "Pennsylvania"},
    {"RI", "Rhode Island"},   {"SC", "South Carolina"}, {"SD", "South Dakota"},
    {"TN", "Tennessee"},      {"TX", "Texas"},         {"UT", "Utah"},
    {"VT", "Vermont"},        {"VA", "Virginia"},      {"WA", "Washington"},
    {"WV", "West Virginia"},  {"WI", "Wisconsin"},     {"WY", "Wyoming"},
}};

constexpr std::array<Region, 13> kCanadianProvinces{{
    {"AB", "Alberta"}, {"BC", "British Columbia"}, {"MB", "Manitoba"},
    {"NB", "New Brunswick"}, {"NL", "Newfoundland and Labrador"}, {"NS", "Nova Scotia"},
    {"NT", "Northwest Territories"}, {"NU", "Nunavut"}, {"ON", "Ontario"},
    {"PE", "Prince Edward Island"}, {"QC", "Quebec"}, {"SK", "Saskatchewan"},
    {"YT", "Yukon"},
}};

struct Alias {
  std::string_view alias;
  std::string_view country;
};

// Lowercase aliases, matched as whole words.
constexpr std::array<Alias, 36> kCountries{{
    {"united states", "US"}, {"usa", "US"}, {"u.s.a.", "US"}, {"u.s.", "US"},
    {"america", "US"}, {"canada", "Canada"}, {"united kingdom", "United Kingdom"},
    {"uk", "United Kingdom"}, {"england", "United Kingdom"}, {"scotland", "United Kingdom"},
    {"wales", "United Kingdom"}, {"ireland", "Ireland"}, {"australia", "Australia"},
    {"new zealand", "New Zealand"}, {"germany", "Germany"}, {"france", "France"},
    {"spain", "Spain"}, {"italy", "Italy"}, {"netherlands", "Netherlands"},
    {"sweden", "Sweden"}, {"norway", "Norway"}, {"denmark", "Denmark"},
    {"finland", "Finland"}, {"poland", "Poland"}, {"mexico", "Mexico"},
    {"brazil", "Brazil"}, {"india", "India"}, {"china", "China"}, {"japan", "Japan"},
    {"south korea", "South Korea"}, {"philippines", "Philippines"},
    {"singapore", "Singapore"}, {"south africa", "South Africa"},
    {"israel", "Israel"}, {"portugal", "Portugal"}, {"belgium", "Belgium"},
}};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.';
}

// Whole-word, case-insensitive containment of `needle` in `hay` (both lowercase).
bool contains_word(const std::string& hay, std::string_view needle) {
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(hay[pos - 1]));
    std::size_t end = pos + needle.size();
    bool right = end >= hay.size() || !std::isalnum(static_cast<unsigned char>(hay[end]));
    if (left && right) return true;
    ++pos;
  }
  return false;
}

// Upper-case two-letter tokens in the original text, e.g. "Tucson, AZ".
std::vector<std::string> upper_codes(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_char(text[i])) ++i;
    std::size_t s = i;
    while (i < text.size() && is_word_char(text[i])) ++i;
    if (i - s == 2 && std::isupper(static_cast<unsigned char>(text[s])) &&
        std::isupper(static_cast<unsigned char>(text[s + 1]))) {
      out.push_back(text.substr(s, 2));
    }
  }
  return out;
}

}  // namespace

std::string coarsen_location(const std::string& text) {
  std::string lower = to_lower_ascii(text);
  // Multi-word names first so "West Virginia" is not read as "Virginia".
  const Region* best = nullptr;
  for (const auto& s : kUsStates) {
    if (contains_word(lower, to_lower_ascii(s.name)) &&
        (!best || s.name.size() > best->name.size())) {
      best = &s;
    }
  }
  if (best) return "US/" + std::string(best->name);
  for (const auto& p : kCanadianProvinces) {
    if (contains_word(lower, to_lower_ascii(p.name))) return "Canada/" + std::string(p.name);
  }
  for (const auto& code : upper_codes(text)) {
    for (const auto& s : kUsStates) {
      if (code == s.code) return "US/" + std::string(s.name);
    }
    for (const auto& p : kCanadianProvinces) {
      if (code == p.code) return "Canada/" + std::string(p.name);
    }
  }
  for (const auto& c : kCountries) {
    if (contains_word(lower, c.alias)) return std::string(c.country);
  }
  return "other";
}

}  // namespace foodquiz
