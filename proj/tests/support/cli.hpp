#ifndef FOODQUIZ_TESTS_CLI_HPP_
#define FOODQUIZ_TESTS_CLI_HPP_

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the foodquiz binary, capturing stdout and stderr via files in `scratch`.
inline CliRun run_cli(const std::vector<std::string>& args, const std::filesystem::path& scratch,
                      const std::string& env = "") {
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += shell_quote(FOODQUIZ_CLI_PATH);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  auto out = scratch / "cli.stdout";
  auto err = scratch / "cli.stderr";
  cmd += " >" + shell_quote(out.string()) + " 2>" + shell_quote(err.string());
  int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace fixtures

#endif  // FOODQUIZ_TESTS_CLI_HPP_
