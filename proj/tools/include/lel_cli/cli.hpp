#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lel/generator.hpp"

namespace lel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

enum class Command { validate, dbcheck, fig1, simulate, gradflow, constants, compare };

std::optional<Command> parse_command(const std::string& name);
const char* command_name(Command c);

struct RunConfig {
  Command command = Command::validate;
  std::string generator;       // file path or builtin:<name>[?k=v&...]
  std::string rho0 = "random"; // random | sigma | path to a matrix CSV
  std::vector<double> alphas;  // empty means the command's default
  double t_end = 10.0;
  double dt = 1e-3;
  int record_every = 1;
  std::optional<double> eps;
  std::uint64_t seed = 1;
  int samples = 100;
  double alpha0 = 2.0;
  double alpha1 = 3.0;
  std::optional<double> K;
  int starts = 8;
  int iterations = 200;
  std::string out;  // empty writes to the output stream
};

// Thrown for malformed flags or config; maps to exit 64.
class UsageError : public Error {
 public:
  using Error::Error;
};

// "start:stop:step" (inclusive stop) or a comma list.
std::vector<double> parse_alphas(const std::string& text);

struct LoadedGenerator {
  RawGenerator raw;
  std::optional<GnsGenerator> gns;  // absent for generators without GNS structure
};

// builtin:carlen-maas, builtin:qubit-xz, builtin:depolarizing?gamma=..&sigma=p1,p2,..,
// builtin:random?n=..&seed=.., or a JSON generator file.
LoadedGenerator load_generator(const std::string& spec);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (CLI11, optional --config JSON) and dispatches to run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lel::cli
