// End-to-end checks of the command line tool. argv[1] is the binary path;
// every case shells out and inspects the exit code and captured output.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

int failures = 0;
std::string cli;
std::string dir;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  std::string out_path = dir + "/stdout.txt";
  std::string err_path = dir + "/stderr.txt";
  std::string cmd = cli + " " + args + " > " + out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

void expect(bool ok, const std::string& what) {
  if (ok) return;
  ++failures;
  std::cout << "FAIL: " << what << "\n";
}

void expect_code(const RunResult& r, int code, const std::string& what) {
  if (r.code == code) return;
  ++failures;
  std::cout << "FAIL: " << what << " (exit " << r.code << ", wanted " << code << ")\n";
  if (!r.err.empty()) std::cout << "  stderr: " << r.err;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cout << "usage: test_cli <path-to-binary>\n";
    return 1;
  }
  cli = argv[1];
  dir = "/tmp/explab_cli_XXXXXX";
  if (!mkdtemp(dir.data())) {
    std::cout << "FAIL: cannot create work directory\n";
    return 1;
  }

  // Round trip: generate a builtin, feed the file back in.
  {
    std::string model = dir + "/two_point.json";
    RunResult gen = run("gen --builtin two-point:0.3,0.3 --output " + model);
    expect_code(gen, 0, "gen two-point");
    expect(contains(slurp(model), "\"transition\""), "generated document has a transition");

    RunResult ch = run("cheeger --input " + model);
    expect_code(ch, 0, "cheeger on generated file");
    expect(contains(ch.out, "\"kappa\": 0.29999999"), "two-point kappa");
    expect(contains(ch.out, "\"argmin\": [0]"), "two-point argmin");
    expect(contains(ch.out, "\"holds\": true"), "sandwich holds");
  }

  // Kernel view of an action and the spectrum of the induced lazy walk.
  {
    RunResult k = run("kernel --builtin weighted-cycle:2");
    expect_code(k, 0, "kernel weighted-cycle:2");
    expect(contains(k.out, "\"sigma\""), "kernel reports sigma");
    expect(contains(k.out, "\"tilde_nu\""), "kernel reports tilde_nu");

    RunResult sp = run("spectrum --builtin cycle:8");
    expect_code(sp, 0, "spectrum cycle:8");
    expect(contains(sp.out, "\"lambda2\": 0.80473785"), "lazy cycle lambda2");
    expect(contains(sp.out, "\"has_gap\": true"), "lazy cycle gap");
  }

  // Expansion report shape.
  {
    RunResult ex = run("expansion --builtin weighted-cycle:2");
    expect_code(ex, 0, "expansion weighted-cycle:2");
    for (const char* key : {"\"vertex\"", "\"markov\"", "\"edge_vertex\"", "\"profile\"", "\"local_gap\"",
                            "\"witness_subset\""})
      expect(contains(ex.out, key), std::string("expansion key ") + key);
    expect(contains(ex.out, "\"c\": 2.0"), "weighted swap vertex constant");
  }

  // Warp output in both formats.
  {
    RunResult w = run("warp --builtin weighted-cycle:2 --t-list 1,4");
    expect_code(w, 0, "warp csv");
    expect(contains(w.out, "t,1.0\n,0,1\n0,0,1\n1,1,0\n"), "warp csv block at t=1");
    expect(contains(w.out, "t,4.0\n"), "warp csv block at t=4");

    std::string jpath = dir + "/warp.json";
    RunResult wj = run("warp --builtin cycle:3 --levels 2^0..2^2 --output " + jpath);
    expect_code(wj, 0, "warp json");
    std::string wtext = slurp(jpath);
    expect(contains(wtext, "\"levels\""), "warp json levels");
    expect(contains(wtext, "\"t\": 4.0"), "warp json covers 2^2");
    expect(!contains(wtext, "\"t\": 8.0"), "warp json stops at 2^2");
  }

  // Operator laboratory modes.
  {
    RunResult q = run("oplab qlocal --builtin cycle:8 --k-max 4");
    expect_code(q, 0, "oplab qlocal");
    expect(contains(q.out, "\"mode\": \"qlocal\""), "qlocal mode tag");
    expect(contains(q.out, "\"exact\": true"), "qlocal exact at this size");
    expect(contains(q.out, "\"eps\""), "qlocal eps");

    RunResult p = run("oplab power --builtin cycle:8 --k-max 10");
    expect_code(p, 0, "oplab power");
    expect(contains(p.out, "\"norms_bounded\": true"), "power norms bounded");
    expect(contains(p.out, "\"lambda_hat\": 0.80473785"), "power lambda hat");

    RunResult g = run("oplab ghost --builtin margulis:2 --t-list 16");
    expect_code(g, 0, "oplab ghost");
    expect(contains(g.out, "\"g\": 0.86602540378443"), "ghost value at t=16");

    RunResult gc = run("oplab ghost --builtin schreier-dyadic:3 --t-list 8,16,32");
    expect_code(gc, 0, "oplab ghost on a chain");
    expect(contains(gc.out, "\"radius\": 2.0"), "chain ghost radius");

    RunResult pc = run("oplab poincare --builtin cycle:8 --seed 11");
    expect_code(pc, 0, "oplab poincare");
    expect(contains(pc.out, "\"all_hold\": true"), "poincare holds");

    RunResult pr = run("oplab propagation --builtin cycle:8 --k-max 3");
    expect_code(pr, 0, "oplab propagation");
    expect(contains(pr.out, "\"truncation_bound\""), "propagation witnesses");
  }

  // Verify: exit 0, reproducible bytes, and per-model scopes.
  {
    std::string r1 = dir + "/verify1.json";
    std::string r2 = dir + "/verify2.json";
    RunResult v1 = run("verify --builtin all --seed 7 --output " + r1);
    RunResult v2 = run("verify --builtin all --seed 7 --output " + r2);
    expect_code(v1, 0, "verify all");
    expect_code(v2, 0, "verify all repeat");
    std::string t1 = slurp(r1), t2 = slurp(r2);
    expect(!t1.empty() && t1 == t2, "verify output is byte identical across runs");
    expect(contains(t1, "\"all_pass\": true"), "verify all_pass");
    expect(contains(t1, "\"seed\": 7"), "verify echoes the seed");

    RunResult vb = run("verify --builtin cycle:8 --seed 3");
    expect_code(vb, 0, "verify single builtin");
  }

  // Parse failures exit 2.
  {
    std::string bad = dir + "/bad.json";
    write_file(bad, "{\"oops\": ");
    expect_code(run("cheeger --input " + bad), 2, "malformed json");
    expect_code(run("cheeger --no-such-flag"), 2, "unknown flag");
    expect_code(run("cheeger --builtin two-point:0.3,0.3 --tolerance nope=1"), 2, "unknown tolerance key");
    expect_code(run("cheeger --builtin two-point:0.3,0.3 --tolerance eigen=abc"), 2, "bad tolerance value");
    expect_code(run("oplab frobnicate --builtin cycle:8"), 2, "unknown oplab mode");
    expect_code(run("gen"), 2, "gen without builtin");
    expect_code(run("gen --builtin nope:1"), 2, "unknown builtin");
    expect_code(run("cheeger --builtin cycle:8 --input " + bad), 2, "input and builtin together");
    expect_code(run(""), 2, "missing subcommand");
    expect_code(run("warp --builtin cycle:8 --levels 2^3..2^1"), 2, "bad level range");
    expect_code(run("warp --builtin cycle:8 --t-list 1,x"), 2, "bad t list");
  }

  // Semantic failures exit 1.
  {
    std::string unbalanced = dir + "/unbalanced.json";
    write_file(unbalanced,
               "{\"schema_version\": 1, \"points\": [\"a\", \"b\"], \"weights\": [0.5, 0.5],\n"
               " \"transition\": [[0.9, 0.9], [0.5, 0.5]]}\n");
    expect_code(run("cheeger --input " + unbalanced), 1, "row sums off exits 1");
    expect_code(run("cheeger --builtin schreier-dyadic:3"), 1, "chain has no kernel view");
  }

  // Enumeration caps exit 3.
  {
    expect_code(run("cheeger --builtin margulis:5"), 3, "margulis:5 exceeds the default cap");
    expect_code(run("expansion --builtin cycle:8 --cap 4"), 3, "explicit cap undercuts the model");
  }

  if (failures == 0) {
    std::cout << "test_cli: all checks passed\n";
    return 0;
  }
  std::cout << "test_cli: " << failures << " checks failed\n";
  return 1;
}
