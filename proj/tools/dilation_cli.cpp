// dilation: command-line scenario runner

#include "dilation/error.hpp"
#include "dilation/io.hpp"
#include "dilation/report.hpp"
#include "dilation/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

using dilation::scenario::Kind;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long> dim;
  std::optional<int> depth;
  std::optional<double> tol;
  std::optional<int> trials;
  std::optional<std::string> expected;
  std::optional<std::string> generator;
  std::string out;
  bool csv = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "scenario JSON file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--dim", c.dim, "dimension of H");
  sub->add_option("--depth", c.depth, "truncation depth N");
  sub->add_option("--tol", c.tol, "equality tolerance");
  sub->add_option("--trials", c.trials, "independent trials");
  sub->add_option("--expect", c.expected, "expected verdict")->check(CLI::IsMember({"pass", "fail"}));
  sub->add_option("--generator", c.generator, "instance generator")
      ->check(CLI::IsMember({"commuting", "doubly_commuting"}));
  sub->add_option("--out", c.out, "write the JSON report here");
  sub->add_flag("--csv", c.csv, "print a flat residual table instead of JSON");
}

void emit(const dilation::Report& report, const Common& c) {
  const auto j = dilation::to_json(report);
  if (!c.out.empty()) dilation::io::write_text_file(c.out, j.dump(2) + "\n");
  if (c.csv) {
    std::cout << dilation::to_csv(report);
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

int run(Kind kind, const Common& c) {
  namespace sc = dilation::scenario;
  sc::Scenario s;
  try {
    if (!c.config.empty()) {
      auto j = dilation::io::read_json_file(c.config);
      if (j.is_object() && !j.contains("kind")) j["kind"] = sc::to_string(kind);
      s = sc::scenario_from_json(j);
      if (s.kind != kind) {
        std::cerr << "config kind '" << sc::to_string(s.kind) << "' does not match subcommand\n";
        return 2;
      }
    }
    s.kind = kind;
    if (c.seed) s.seed = *c.seed;
    if (c.dim) s.dim = *c.dim;
    if (c.depth) s.depth = *c.depth;
    if (c.tol) s.tol = *c.tol;
    if (c.trials) s.trials = *c.trials;
    if (c.expected) s.expected_verdict = *c.expected;
    if (c.generator) s.generator = *c.generator;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const auto outcome = sc::run_scenario(s);
  emit(outcome.report, c);
  if (outcome.exit_code == 2 && outcome.report.details.contains("error")) {
    std::cerr << "error: " << outcome.report.details["error"]["message"].get<std::string>() << "\n";
  }
  return outcome.exit_code;
}

int show_report(const std::string& path, const Common& c) {
  dilation::Report r;
  try {
    r = dilation::report_from_json(dilation::io::read_json_file(path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (c.csv) {
    std::cout << dilation::to_csv(r);
  } else {
    for (const auto& ch : r.checks) {
      std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << "  " << ch.value << " vs "
                << ch.threshold << "  [" << ch.invariant << "]\n";
    }
  }
  std::string expected = "pass";
  if (r.details.contains("expected_verdict")) expected = r.details["expected_verdict"].get<std::string>();
  if (r.details.contains("verdict") && r.details["verdict"] == "error") return 2;
  return r.passed() == (expected == "pass") ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional isometric and unitary dilation checks"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    Kind kind;
  };
  const Entry entries[] = {
      {"dilate", "truncated isometric dilation of one contraction", Kind::schaffer},
      {"ando", "commuting isometric dilation of a contraction pair", Kind::ando},
      {"reduce", "fixed-vector removal on an ando dilation", Kind::lemma22},
      {"pipeline", "continuous-pair dilation through cogenerators", Kind::theorem21},
      {"brehmer", "alternating-sum positivity test", Kind::brehmer},
      {"naimark", "regular unitary dilation from the kernel Gram matrix", Kind::naimark},
      {"coisometric", "unitary dilation of a coisometric family", Kind::coisometric},
      {"hunt", "random search for positivity violations", Kind::hunt},
  };
  Common common;
  std::optional<Kind> chosen;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, common);
    sub->callback([&chosen, k = e.kind] { chosen = k; });
  }
  std::string report_path;
  bool report_chosen = false;
  auto* rep = app.add_subcommand("report", "summarize a saved JSON report");
  rep->add_option("path", report_path, "report file")->required()->check(CLI::ExistingFile);
  rep->add_flag("--csv", common.csv, "flat residual table");
  rep->callback([&] { report_chosen = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (report_chosen) return show_report(report_path, common);
  if (chosen) return run(*chosen, common);
  return 2;
}
