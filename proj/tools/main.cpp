// memcell: command line front end for the memory-cell analysis library.
//
// Exit codes: 0 success, 1 domain failure, 2 I/O or parse error,
// 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef MEMCELL_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "memcell/errors.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/io.hpp"
#include "memcell/memory.hpp"
#include "memcell/oracle.hpp"
#include "memcell/superactivation.hpp"
#include "text.hpp"

using namespace memcell;

namespace {

struct Flags {
  std::string config_path;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> t_max;
  std::optional<std::string> format;
  std::string output;
};

io::AnalysisConfig resolve(const Flags& f) {
  io::AnalysisConfig c;
  if (!f.config_path.empty()) c = io::parse_config(io::read_text(f.config_path), f.config_path);
  // --tol moves the CPTP, PSD and peripheral thresholds together.
  if (f.tol) c.tol.cptp = c.tol.psd = c.tol.eig = *f.tol;
  if (f.seed) c.seed = *f.seed;
  if (f.t_max) c.t_max = *f.t_max;
  if (f.format) c.format = *f.format;
  c.check();
  return c;
}

void emit(const io::Json& report, const io::AnalysisConfig& config, const std::string& output) {
  const std::string body = config.format == "text" ? cli::render_text(report) : io::dump(report);
  if (output.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw ParseError("cli", "cannot write " + output);
  out << body;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain:
      return 1;
    case ErrorKind::Parse:
      return 2;
    case ErrorKind::Numerical:
      return 3;
  }
  return 3;
}

std::vector<int> parse_n_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(item, &used);
      if (used != item.size() || n < 0) throw std::invalid_argument(item);
      out.push_back(n);
    } catch (const std::exception&) {
      throw ParseError("cli", "--n expects a comma-separated list of non-negative integers, got '" + s + "'");
    }
  }
  if (out.empty()) throw ParseError("cli", "--n is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum memory cell analysis: noiseless structure, peripheral spectra, super-activation."};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_path, "JSON config file; flags override its values");
  app.add_option("--tol", flags.tol, "tolerance for CPTP, PSD and peripheral checks")->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "seed for generic elements and random payloads");
  app.add_option("--t-max", flags.t_max, "largest tensor power in the growth table");
  app.add_option("--format", flags.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--output", flags.output, "write the report here instead of stdout");

  std::string path_e;
  std::string path_f;
  std::size_t address = 0;
  std::string payload = "mixed";
  std::string n_list = "1,5,20";

  auto* validate = app.add_subcommand("validate", "check that a channel file is a valid CPTP map");
  validate->add_option("path", path_e, "channel file, '-' for stdin")->required();

  auto* analyze = app.add_subcommand("analyze", "shape, sectors, peripheral spectrum and cyclic states");
  analyze->add_option("path", path_e, "channel file, '-' for stdin")->required();

  auto* superactivate = app.add_subcommand("superactivate", "super-activation verdicts, witnesses and growth table");
  superactivate->add_option("e", path_e, "first channel file")->required();
  superactivate->add_option("f", path_f, "second channel file (defaults to the first)");

  auto* roundtrip = app.add_subcommand("roundtrip", "encode, apply the channel n times, decode");
  roundtrip->add_option("path", path_e, "channel file, '-' for stdin")->required();
  roundtrip->add_option("--address", address, "sector index");
  roundtrip->add_option("--payload", payload, "basis:i, plus, mixed, random or @file");
  roundtrip->add_option("--n", n_list, "comma-separated numbers of channel uses");

  auto* oracle_cmd = app.add_subcommand("oracle", "re-run the independent cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const io::AnalysisConfig config = resolve(flags);
    const AnalysisOptions options = config.options();

    if (validate->parsed()) {
      const auto file = io::load_channel_file(path_e);
      const auto report = validate_cptp(file.kraus, config.tol.cptp);
      emit(io::validate_report(file, report, config.tol.cptp), config, flags.output);
      if (!report.pass) {
        std::cerr << "memcell: " << file.source << " is not trace preserving, residual " << report.residual << "\n";
        return 1;
      }
      return 0;
    }
    if (analyze->parsed()) {
      const auto channel = io::load_channel(path_e, config.tol.cptp);
      emit(io::analyze_report(memcell::analyze(channel, options), config), config, flags.output);
      return 0;
    }
    if (superactivate->parsed()) {
      const auto e = io::load_channel(path_e, config.tol.cptp);
      const auto f = path_f.empty() || path_f == path_e ? e : io::load_channel(path_f, config.tol.cptp);
      const auto report = superactivation_report(e, f, config.t_max, options, config.budget);
      emit(io::superactivate_report(report, config), config, flags.output);
      return 0;
    }
    if (roundtrip->parsed()) {
      const auto channel = io::load_channel(path_e, config.tol.cptp);
      const auto ns = parse_n_list(n_list);
      const auto dec = structure_decomposition(channel, options);
      if (address >= dec.sectors.size()) {
        throw DomainError("memory", "address " + std::to_string(address) + " out of range, the cell has " +
                                        std::to_string(dec.sectors.size()) + " sectors");
      }
      const auto rho = io::parse_payload(payload, dec.sectors[address].d, config.seed);
      const auto rows = round_trip(channel, dec, {address, rho}, ns);
      emit(io::roundtrip_report(rows, payload, config), config, flags.output);
      return 0;
    }
    if (oracle_cmd->parsed()) {
      io::Json report;
      report["schema"] = io::kSchemaVersion;
      report["command"] = "oracle";
      report["seed"] = config.seed;
      report["checks"] = io::Json::array();
      bool all = true;
      for (const auto& c : oracle::run_cross_checks(config.seed)) {
        report["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        all = all && c.pass;
      }
      report["pass"] = all;
      emit(report, config, flags.output);
      return all ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "memcell: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "memcell: [internal] " << e.what() << "\n";
    return 3;
  }
  return 0;
}
