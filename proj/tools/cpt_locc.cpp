// cpt-locc: verify, reverse and refute LOCC protocols stored in scenario files.

#include "cpt/commands.hpp"
#include "cpt/corpus.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
  std::string scenario;
  std::string protocol;
  double tol = cpt::kDefaultTolerance;
  std::uint64_t seed = 7;
  std::size_t suite = 100;
  std::string report = "text";
  std::string out;
};

void emit(const cpt::Report& r, const std::string& format) {
  if (format == "machine")
    std::cout << r.to_json().dump(2) << '\n';
  else
    std::cout << r.to_text();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verify, reverse and refute LOCC protocols on orthonormal families"};
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&o](CLI::App* sub, bool needs_protocol) {
    sub->add_option("--scenario", o.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    if (needs_protocol) sub->add_option("--protocol", o.protocol, "protocol name")->required();
    sub->add_option("--tol", o.tol, "numerical tolerance")->capture_default_str();
    sub->add_option("--report", o.report, "report format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "check a protocol against the scenario's family");
  add_common(verify, true);

  auto* reverse = app.add_subcommand("reverse", "write the time-reversed protocol to --out");
  add_common(reverse, true);
  reverse->add_option("--out", o.out, "output scenario file")->required();

  auto* refute = app.add_subcommand("refute", "search for a distinguisher of an entangled family");
  add_common(refute, false);
  refute->add_option("--seed", o.seed, "random seed")->capture_default_str();
  refute->add_option("--suite", o.suite, "number of random candidates")->capture_default_str();

  auto* distinguish = app.add_subcommand("distinguish", "build the product-basis distinguisher");
  add_common(distinguish, false);
  distinguish->add_option("--out", o.out, "write the built protocols to this scenario file");

  auto* check = app.add_subcommand("check-family", "report completeness, orthonormality and entanglement");
  add_common(check, false);

  auto* generate = app.add_subcommand("generate", "write the bundled scenarios to a directory");
  generate->add_option("--out", o.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) {
      std::filesystem::create_directories(o.out);
      for (const auto& name : cpt::bundled_scenario_names()) {
        const auto path = std::filesystem::path(o.out) / (name + ".json");
        cpt::save_scenario(cpt::bundled_scenario(name), path);
        std::cout << path.string() << '\n';
      }
      return 0;
    }

    const auto validation = *check ? cpt::Validation::Lenient : cpt::Validation::Strict;
    const cpt::Scenario s = cpt::load_scenario(o.scenario, validation, o.tol);

    cpt::Report r;
    if (*verify)
      r = cpt::cmd_verify(s, o.protocol, o.tol);
    else if (*reverse)
      r = cpt::cmd_reverse(s, o.protocol, o.out, o.tol);
    else if (*refute)
      r = cpt::cmd_refute(s, o.suite, o.seed, o.tol);
    else if (*distinguish)
      r = cpt::cmd_distinguish(s, o.tol,
                               o.out.empty() ? std::nullopt
                                             : std::optional<std::filesystem::path>(o.out));
    else
      r = cpt::cmd_check_family(s, o.tol);
    emit(r, o.report);
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
