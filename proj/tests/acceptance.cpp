// Acceptance suite: one pass/fail line per criterion, exit nonzero on any
// failure. Usage: acceptance <criterion 1..8 | all> [path-to-apm-cli]

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "apm/verify.hpp"

namespace {

bool same_file_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

// criterion 8: every CLI command run twice gives byte-identical output
apm::verify::Outcome cli_determinism(const std::string& apm_path) {
  apm::verify::Outcome out{"CLI determinism (byte-identical reruns)", true,
                           ""};
  if (apm_path.empty()) {
    out.pass = false;
    out.detail = "no apm binary path supplied";
    return out;
  }
  // synthetic series input for `fit`
  {
    std::ofstream f("acc8_series.csv");
    f << "X,value\n";
    for (double x = 100; x <= 3000; x *= 1.5) {
      char line[64];
      std::snprintf(line, sizeof line, "%.1f,%.17g\n", x,
                    2.0 * x * x * x * x * x + 3.0 * x * x * x * x);
      f << line;
    }
  }
  struct Cmd {
    std::string args;
    std::string artifact;  // file the command writes, if any
  };
  std::vector<Cmd> cmds = {
      {"sieve --limit 20000 --cache acc8_cache.bin", "acc8_cache.bin"},
      {"singular --op g --n 105 --delta 2", ""},
      {"chars --mod 8 --table", ""},
      {"analytic --fn P --s 1,0 --delta 1", ""},
      {"analytic --fn Q --s 0.5,1 --delta 3", ""},
      {"contour --which meijer --params 0.5,1,0.5,1", ""},
      {"contour --which jkernel --u -0.75,0.5", ""},
      {"contour --which E --X 20 --delta 1 --T 250 --tol 1e-6", ""},
      {"sums --op sdelta --X 60 --delta 1", ""},
      {"sums --op h --q 3 --p 3 --k 2 --u 2,0", ""},
      {"sums --op frakh --p 5 --u 1.5,0 --variant 1", ""},
      {"moment --x 20000 --Q 25 --weighting phi --per-q acc8_perq.csv",
       "acc8_perq.csv"},
      {"scan --x-grid 10000,20000,40000,80000 --q-rule sqrt", ""},
      {"fit --input acc8_series.csv", ""},
  };
  std::ostringstream bad;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    for (int run = 1; run <= 2; ++run) {
      std::string stamp = "acc8_out_" + std::to_string(i) + "_" +
                          std::to_string(run) + ".txt";
      std::string full =
          apm_path + " " + cmds[i].args + " > " + stamp + " 2>&1";
      if (std::system(full.c_str()) != 0) {
        out.pass = false;
        bad << " command failed: " << cmds[i].args << ";";
        break;
      }
      if (!cmds[i].artifact.empty())
        std::rename(cmds[i].artifact.c_str(),
                    (cmds[i].artifact + ".run" + std::to_string(run)).c_str());
    }
    std::string o1 = "acc8_out_" + std::to_string(i) + "_1.txt";
    std::string o2 = "acc8_out_" + std::to_string(i) + "_2.txt";
    if (!same_file_bytes(o1, o2)) {
      out.pass = false;
      bad << " nondeterministic stdout: " << cmds[i].args << ";";
    }
    if (!cmds[i].artifact.empty() &&
        !same_file_bytes(cmds[i].artifact + ".run1",
                         cmds[i].artifact + ".run2")) {
      out.pass = false;
      bad << " artifact differs across runs: " << cmds[i].artifact << ";";
    }
  }
  out.detail = out.pass ? std::to_string(cmds.size()) +
                              " commands byte-identical across reruns"
                        : bad.str();
  return out;
}

void print_result(int idx, const apm::verify::Outcome& o) {
  std::printf("%s criterion %d [%s]: %s\n", o.pass ? "PASS" : "FAIL", idx,
              o.name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  std::string which = argc > 1 ? argv[1] : "all";
  std::string apm_path = argc > 2 ? argv[2] : "";
  bool all_pass = true;

  auto run = [&](int idx) {
    apm::verify::Outcome o;
    switch (idx) {
      case 1: o = apm::verify::exact_identity_suite(); break;
      case 2: o = apm::verify::local_closed_forms(); break;
      case 3: o = apm::verify::analytic_cross_checks(); break;
      case 4: o = apm::verify::section4_closed_forms(); break;
      case 5: o = apm::verify::endgame_exponent(); break;
      case 6: o = apm::verify::cancellation_check(); break;
      case 7: o = apm::verify::theorem_scan(); break;
      case 8: o = cli_determinism(apm_path); break;
      default:
        std::fprintf(stderr, "unknown criterion %d\n", idx);
        std::exit(2);
    }
    print_result(idx, o);
    all_pass = all_pass && o.pass;
  };

  if (which == "all") {
    for (int i = 1; i <= 8; ++i) run(i);
  } else {
    run(std::atoi(which.c_str()));
  }
  return all_pass ? 0 : 1;
}
