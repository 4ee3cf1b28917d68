#ifndef FOODQUIZ_COMMON_HPP_
#define FOODQUIZ_COMMON_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace foodquiz {

using json = nlohmann::json;

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorKind { usage, validation, io };

/// Base error carrying a short machine-readable code such as
/// "malformed_line" or "implausible_anthropometry".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

inline Error validation_error(std::string code, const std::string& message) {
  return Error(ErrorKind::validation, std::move(code), message);
}
inline Error io_error(std::string code, const std::string& message) {
  return Error(ErrorKind::io, std::move(code), message);
}

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// SplitMix64 finalizer; used to derive independent seed streams
/// (per tree, per fold, per session) from one user seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
json read_json_file(const std::filesystem::path& path);

/// Two-space indented dump with a trailing newline. Keys are sorted, so
/// equal documents always serialize to equal bytes.
std::string dump_pretty(const json& doc);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

}  // namespace foodquiz

#endif  // FOODQUIZ_COMMON_HPP_
