// End-to-end checks of the command-line surface. Invoked with the CLI
// binary path as argv[1]; exits nonzero on the first failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "emshock/csv.hpp"
#include "emshock/dates.hpp"
#include "emshock/synth.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
  if (!ok) ++failures;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <path-to-emshock-binary>\n";
    return 2;
  }
  const std::string binary = argv[1];
  const fs::path work = fs::temp_directory_path() / "emshock_cli_tests";
  fs::remove_all(work);
  fs::create_directories(work);

  // Default verify-props run: both propositions hold on the shipped defaults.
  {
    const fs::path out = work / "props";
    const int code =
        run(binary + " verify-props --out " + out.string() + " > /dev/null");
    check(code == 0, "verify-props exits 0 on the default fixture");
    check(fs::exists(out / "propositions.txt"), "proposition report written");
    check(fs::exists(out / "manifest.json"), "manifest written");
  }

  // Manifest round-trip: the manifest is itself a valid config.
  {
    const fs::path out = work / "props2";
    const int code = run(binary + " verify-props --config " +
                         (work / "props" / "manifest.json").string() + " --out " +
                         out.string() + " > /dev/null");
    check(code == 0, "manifest reloads as a config");
    check(slurp(out / "propositions.txt") ==
              slurp(work / "props" / "propositions.txt"),
          "re-run from manifest reproduces the report");
  }

  // Missing input path: exit 2 with a machine-parsable class.
  {
    std::ofstream cfg(work / "missing.json");
    cfg << "{\"firm_csv\": \"" << (work / "nope.csv").string()
        << "\", \"shock_csv\": \"also_missing.csv\"}\n";
    cfg.close();
    const int code = run(binary + " firm-reg --config " +
                         (work / "missing.json").string() + " --out " +
                         (work / "fr").string() + " 2> " +
                         (work / "stderr.txt").string() + " > /dev/null");
    check(code == 2, "missing input exits with code 2");
    const std::string err = slurp(work / "stderr.txt");
    check(err.find("class=ConfigPathMissing") != std::string::npos,
          "error line carries class=ConfigPathMissing");
  }

  // Synthetic fixtures, then a small single-country run with 2 variables.
  {
    const fs::path data = work / "data";
    std::ofstream cfg(work / "synth.json");
    cfg << "{\"n_months\": 100, \"n_firms\": 40, \"n_quarters\": 28}\n";
    cfg.close();
    int code = run(binary + " synth --config " + (work / "synth.json").string() +
                   " --out " + data.string() + " > /dev/null");
    check(code == 0, "synth writes fixtures");

    std::ofstream sc(work / "country.json");
    sc << "{\n"
       << "  \"macro_csv\": \"" << (data / "macro_fixture.csv").string() << "\",\n"
       << "  \"sample_start\": \"2004-01\", \"sample_end\": \"2012-04\",\n"
       << "  \"variables\": [\"shock\", \"us10y\"],\n"
       << "  \"country\": \"CHL\", \"lags\": 2,\n"
       << "  \"gibbs\": {\"iterations\": 400, \"burn_in\": 100},\n"
       << "  \"irf\": {\"horizon\": 12, \"target_variable\": \"us10y\","
       << " \"target_response\": 0.5},\n"
       << "  \"seed\": 11\n"
       << "}\n";
    sc.close();
    code = run(binary + " svar-country --config " + (work / "country.json").string() +
               " --out " + (work / "chile").string() + " > /dev/null");
    check(code == 0, "svar-country runs on a 2-variable fixture");

    const emshock::CsvTable irf = emshock::read_csv(work / "chile" / "irf.csv");
    check(irf.header.size() == 7, "irf csv has the 7 contract columns");
    check(irf.header[0] == "variable" && irf.header[6] == "p95",
          "irf csv header order");
    check(fs::exists(work / "chile" / "irf.svg"), "irf svg emitted");
  }

  // Event-window shock input for the firm regressions.
  {
    std::ofstream events(work / "events.csv");
    events << "timestamp,value_before,value_after\n";
    for (int q = 0; q < 28; ++q) {
      const emshock::Quarter quarter = emshock::Quarter(2004, 1).plus(q);
      const emshock::Month m = quarter.last_month();
      events << m.str() << "-15T14:00," << 99.5 << ","
             << 99.5 + 0.02 * ((q % 5) - 2) << "\n";
    }
    events.close();
    std::ofstream cfg(work / "firm_events.json");
    cfg << "{\"firm_csv\": \"" << (work / "data" / "firm_fixture.csv").string()
        << "\", \"shock_events_csv\": \"" << (work / "events.csv").string()
        << "\", \"horizons\": 2}\n";
    cfg.close();
    const int code = run(binary + " firm-reg --config " +
                         (work / "firm_events.json").string() + " --out " +
                         (work / "fr_events").string() + " > /dev/null");
    check(code == 0, "firm-reg accepts event-window shock input");
    check(fs::exists(work / "fr_events" / "regressions.csv"),
          "event-based run writes regressions.csv");
  }

  // Byte-identical reruns with the same config and seed.
  {
    std::ofstream cfg(work / "sweep.json");
    cfg << "{\"axis\": \"r1\", \"b0\": 0.55, "
        << "\"grid\": {\"from\": 0.01, \"to\": 0.9, \"points\": 40}}\n";
    cfg.close();
    const int c1 = run(binary + " model-sweep --config " +
                       (work / "sweep.json").string() + " --out " +
                       (work / "sweep1").string() + " > /dev/null");
    const int c2 = run(binary + " model-sweep --config " +
                       (work / "sweep.json").string() + " --out " +
                       (work / "sweep2").string() + " > /dev/null");
    check(c1 == 0 && c2 == 0, "model-sweep runs");
    check(slurp(work / "sweep1" / "sweep.csv") == slurp(work / "sweep2" / "sweep.csv"),
          "rerun emits byte-identical sweep.csv");
    const std::string head = slurp(work / "sweep1" / "sweep.csv").substr(0, 40);
    check(head.rfind("axis_value,k1,b1,c0,c1,mu,regime", 0) == 0,
          "sweep csv follows the interface");
  }

  std::cout << (failures == 0 ? "all cli checks passed\n"
                              : "cli checks FAILED\n");
  return failures == 0 ? 0 : 1;
}
