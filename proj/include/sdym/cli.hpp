#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdym::cli {

/// Process exit codes; also listed by --help.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kMalformedExpression = 3,
  kConfigViolation = 4,
  kIoError = 5,
  kInternalError = 6,
};

/// Environment variable naming a JSON config file used when --config is absent.
inline constexpr const char* kConfigEnv = "SDYM_CONFIG";

/// Version of the JSON report layout (schema/report.schema.json).
inline constexpr int kReportSchemaVersion = 1;

/// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdym::cli
