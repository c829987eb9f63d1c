// Copyright 2026 The Diakoptic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end checks of the installed binary: exit codes, stdout/stderr
// content, and report files, driven through the shell.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Run `diakoptic <args>` with stdout/stderr captured to scratch files.
RunResult run_cli(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const std::string tag = std::to_string(++counter);
  const std::string out_path = "cli_stdout_" + tag + ".txt";
  const std::string err_path = "cli_stderr_" + tag + ".txt";
  const std::string command = env + (env.empty() ? "" : " ") + "\"" DIAKOPTIC_CLI_PATH "\" " +
                              args + " >" + out_path + " 2>" + err_path;
  const int raw = std::system(command.c_str());

  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

std::string netlist(const std::string& name) {
  return std::string("\"") + DIAKOPTIC_NETLIST_DIR + "/" + name + "\"";
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("connection-demo runs and summarizes") {
  const RunResult r = run_cli("connection-demo --theta 0.7853981633974483 --steps 50");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("max closed-form deviation") != std::string::npos);
  CHECK(r.out.find("max marginal deviation") != std::string::npos);
}

TEST_CASE("connection-demo with one step writes a two-row trajectory") {
  const std::string out = "demo_one_step.csv";
  const RunResult r =
      run_cli("connection-demo --steps 1 --format csv --out " + out);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out);
  CHECK(count_lines(csv) == 3);  // header + step 0 + step 1
  std::remove(out.c_str());
}

TEST_CASE("solve reports the unique assignment of the wired cnot network") {
  const RunResult r = run_cli("solve " + netlist("fig2.net"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("status: SOLUTION") != std::string::npos);
  CHECK(r.out.find("assignment: r=0 s=1 t=1 u=1 v=1") != std::string::npos);
  CHECK(r.out.find("oracle: 1 solution(s), agreement") != std::string::npos);
}

TEST_CASE("solve exits 2 on unsatisfiable networks") {
  const RunResult r = run_cli("solve " + netlist("fig2_unsat.net"));
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("status: UNSAT") != std::string::npos);
  CHECK(r.out.find("infeasible") != std::string::npos);
}

TEST_CASE("solve exits 0 on multi-solution networks") {
  const RunResult r = run_cli("solve " + netlist("two_solutions.net") + " --seed 7");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("status: MULTI") != std::string::npos);
  CHECK(r.out.find("(sampled)") != std::string::npos);
}

TEST_CASE("solve honors --oracle off") {
  const RunResult r = run_cli("solve " + netlist("fig2.net") + " --oracle off");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("oracle:") == std::string::npos);
}

TEST_CASE("solve rejects garbage inputs with exit 1") {
  SUBCASE("missing netlist file") {
    const RunResult r = run_cli("solve does_not_exist.net");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
  }

  SUBCASE("malformed netlist names the offending line") {
    const std::string path = "broken.net";
    std::ofstream(path) << "gate not a -> b\nwire a\n";
    const RunResult r = run_cli("solve " + path);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("netlist line 2") != std::string::npos);
    std::remove(path.c_str());
  }

  SUBCASE("malformed fill") {
    const RunResult r = run_cli("solve " + netlist("fig2.net") + " --fill t=2");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
  }

  SUBCASE("bad oracle value is a usage error") {
    const RunResult r = run_cli("solve " + netlist("fig2.net") + " --oracle maybe");
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("usage errors exit 1, help exits 0") {
  CHECK(run_cli("").exit_code == 1);              // a subcommand is required
  CHECK(run_cli("--bogus").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("fock-verify passes its suite and is deterministic") {
  const std::string out_a = "fock_a.json";
  const std::string out_b = "fock_b.json";
  const RunResult a = run_cli("fock-verify --steps 120 --out " + out_a);
  const RunResult b = run_cli("fock-verify --steps 120 --out " + out_b);
  CHECK(a.exit_code == 0);
  CHECK(a.out.find("[PASS]") != std::string::npos);
  CHECK(a.out.find("[FAIL]") == std::string::npos);
  CHECK(a.out.find("all checks passed") != std::string::npos);

  const std::string json_a = slurp(out_a);
  const std::string json_b = slurp(out_b);
  CHECK(json_a == json_b);  // byte-identical reruns
  CHECK(json_a.find("\"schema_version\": 1") != std::string::npos);
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());
}

TEST_CASE("fock-verify rejects bad energy configurations before running") {
  SUBCASE("ordering violation") {
    const RunResult r = run_cli("fock-verify --energies 1,1,3,3");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
  }

  SUBCASE("unparseable list") {
    const RunResult r = run_cli("fock-verify --energies 1,2,x,4");
    CHECK(r.exit_code == 1);
  }

  SUBCASE("wrong arity") {
    const RunResult r = run_cli("fock-verify --energies 1,2,3");
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("an unwritable output path fails loudly") {
  const RunResult r = run_cli("connection-demo --steps 2 --out /nonexistent_dir/x.json");
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("log level comes from the environment") {
  const RunResult r = run_cli("solve " + netlist("fig2.net"), "DIAKOPTIC_LOG=debug");
  CHECK(r.exit_code == 0);
  // Informational notes go to stderr, keeping stdout machine-friendly.
  CHECK(r.err.find("prepared with fill") != std::string::npos);
}
