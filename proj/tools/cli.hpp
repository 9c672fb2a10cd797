#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace gistsparse::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kDiverged = 3 };

/// Runs the command line `args` (args[0] is the program name). Result tables
/// go to --out when given, otherwise to `out`; summaries go to `out` when a
/// result file was written and to `err` otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Table emission, exposed for tests.

using Cell = std::variant<std::string, long long, double>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// %.17g, with "nan", "inf" and "-inf" for the non-finite values.
std::string format_double(double v);

void write_csv(std::ostream& os, const Table& t);

/// {"<name>": [{col: value, ...}, ...], ...} in the given order; non-finite
/// doubles become null.
void write_json(std::ostream& os, const std::vector<const Table*>& tables);

}  // namespace gistsparse::cli
