// Exercises the installed CLI end to end in a scratch directory. Expects the
// binary path as argv[1]; every failed check prints and flips the exit code.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "cstream/generator.hpp"
#include "cstream/trace.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "ok   " : "FAIL ") << what << '\n';
  if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_pipeline_test <path-to-cstream>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path dir = fs::temp_directory_path() / "cstream_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };

  {
    std::ofstream cfg(p("gen.conf"));
    cfg << "seed = 5\nn_browsers = 6\nchildren_per_action_mean = 8\n";
  }

  check(run(bin + " gen --config " + p("gen.conf") + " --out " + p("trace.tsv") + " --truth " +
            p("truth.tsv") + " --truth-graphs " + p("tg")) == 0,
        "gen exits 0");

  // CLI output matches the in-process composition byte for byte
  {
    std::ifstream cfg(p("gen.conf"));
    const auto config = cstream::load_gen_config(cfg);
    const auto trace = cstream::generate(config);
    std::ostringstream expected;
    cstream::write_trace(expected, trace);
    check(slurp(p("trace.tsv")) == expected.str(), "gen output equals in-process generate");
  }

  check(run(bin + " features --in " + p("trace.tsv") + " --out " + p("fv.csv") + " --truth " +
            p("truth.tsv")) == 0,
        "features exits 0");
  check(count_lines(p("fv.csv")) == count_lines(p("trace.tsv")) + 1,
        "feature rows equal trace records (plus header)");

  check(run(bin + " features --in " + p("trace.tsv") + " --out " + p("fv2.csv") + " --truth " +
            p("truth.tsv")) == 0,
        "features re-run exits 0");
  check(slurp(p("fv.csv")) == slurp(p("fv2.csv")), "features re-run is byte-identical");

  check(run(bin + " train --features " + p("fv.csv") + " --model " + p("model.json")) == 0,
        "train exits 0");
  check(run(bin + " evaluate --features " + p("fv.csv") + " --folds 5 --seed 7 --out " +
            p("eval.json")) == 0,
        "evaluate exits 0");
  {
    const std::string eval = slurp(p("eval.json"));
    check(eval.find("\"accuracy\"") != std::string::npos &&
              eval.find("\"f_measure\"") != std::string::npos,
          "evaluate report carries the metric fields");
  }

  check(run(bin + " classify --model " + p("model.json") + " --in " + p("trace.tsv") + " --out " +
            p("labeled.tsv")) == 0,
        "classify exits 0");
  check(count_lines(p("labeled.tsv")) == count_lines(p("trace.tsv")),
        "classify writes one labeled line per record");

  check(run(bin + " sessions --in " + p("labeled.tsv") + " --out " + p("sessions.csv")) == 0,
        "sessions exits 0");
  check(run(bin + " graphs --in " + p("labeled.tsv") + " --out-dir " + p("g")) == 0,
        "graphs exits 0");
  check(fs::exists(dir / "g" / "actions.tsv"), "graphs writes the actions manifest");
  check(run(bin + " metrics --graphs " + p("g") + " --out-dir " + p("m")) == 0, "metrics exits 0");
  check(fs::exists(dir / "m" / "suite.json") && fs::exists(dir / "m" / "think_time_ecdf.csv"),
        "metrics writes suite and ECDFs");
  check(run(bin + " promoters --graphs " + p("g") + " --ranking " + p("rank.csv") +
            " --fractions " + p("frac.csv") + " --min-pages 1") == 0,
        "promoters exits 0");
  check(run(bin + " simulate --graphs " + p("g") + " --target 0.45 --out " + p("sim.json")) == 0,
        "simulate exits 0");
  {
    const std::string sim = slurp(p("sim.json"));
    check(sim.find("\"achieved_fraction\"") != std::string::npos, "simulate report is JSON");
  }

  // ks on two tiny samples
  {
    std::ofstream a(p("a.csv"));
    a << "1\n2\n3\n";
    std::ofstream b(p("b.csv"));
    b << "10\n11\n12\n";
  }
  check(run(bin + " ks --a " + p("a.csv") + " --b " + p("b.csv") + " --out " + p("ks.json")) == 0,
        "ks exits 0");
  check(slurp(p("ks.json")).find("\"statistic\": 1.0") != std::string::npos,
        "ks detects disjoint samples");

  // match on a single-browser trace
  {
    std::ofstream cfg(p("gen1.conf"));
    cfg << "seed = 6\nn_browsers = 1\nchildren_per_action_mean = 5\n";
  }
  check(run(bin + " gen --config " + p("gen1.conf") + " --out " + p("one.tsv") + " --history " +
            p("hist.tsv")) == 0,
        "gen single browser exits 0");
  check(run(bin + " match --history " + p("hist.tsv") + " --in " + p("one.tsv") + " --out " +
            p("one_labeled.tsv")) == 0,
        "match exits 0");

  // failure modes: usage error 1, input error 2
  check(run(bin + " features --in " + p("trace.tsv")) == 1, "missing required flag exits 1");
  check(run(bin + " nonsense") == 1, "unknown subcommand exits 1");
  check(run(bin + " features --in " + p("does_not_exist.tsv") + " --out " + p("x.csv")) == 2,
        "missing input file exits 2");
  check(run(bin + " match --history " + p("hist.tsv") + " --in " + p("trace.tsv") + " --out " +
            p("y.tsv")) == 2,
        "multi-browser trace for match exits 2");
  {
    std::ofstream bad(p("bad_model.json"));
    bad << "{\"schema_version\": 99}";
  }
  check(run(bin + " classify --model " + p("bad_model.json") + " --in " + p("trace.tsv") +
            " --out " + p("z.tsv")) == 2,
        "schema-version mismatch exits 2");

  if (g_failures == 0) fs::remove_all(dir);
  std::cout << (g_failures == 0 ? "all CLI checks passed\n"
                                : std::to_string(g_failures) + " CLI checks failed\n");
  return g_failures == 0 ? 0 : 1;
}
