#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "lueq/io.hpp"
#include "lueq/states.hpp"

// End-to-end checks of the installed binary: exit codes are stable contracts.
// The binary path arrives via the LUEQ_CLI environment variable set by ctest.

using namespace lueq;

namespace {

std::string cli_path() {
    const char* env = std::getenv("LUEQ_CLI");
    REQUIRE_MESSAGE(env != nullptr, "LUEQ_CLI must point at the lueq binary");
    return env;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    std::array<char, 512> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) output += buf.data();
    const int status = pclose(pipe);
    return RunResult{WEXITSTATUS(status), output};
}

struct Workspace {
    std::string dir;
    Workspace() : dir("/tmp/lueq_cli_XXXXXX") {
        REQUIRE(mkdtemp(dir.data()) != nullptr);
    }
    ~Workspace() {
        if (std::system(("rm -rf " + dir).c_str()) != 0) std::perror("rm");
    }
    std::string file(const std::string& name) const { return dir + "/" + name; }
};

}  // namespace

TEST_CASE("validate: exit codes 0, 2 and 1") {
    Workspace ws;
    const std::string good = ws.file("werner.json");
    REQUIRE(run("gen werner --e 0.1 --f 0.2 --out " + good).exit_code == 0);
    CHECK(run("validate " + good).exit_code == 0);

    // Scale the trace away from one.
    const StateFile file = read_state_file(good);
    ComplexMatrix scaled = file.mat;
    scaled *= Complex(1.01);
    const std::string bad = ws.file("bad.json");
    write_state_file(bad, file.dims, scaled);
    const RunResult invalid = run("validate " + bad);
    CHECK(invalid.exit_code == 2);
    CHECK(invalid.output.find("TraceNotOne") != std::string::npos);

    const std::string garbage = ws.file("garbage.json");
    std::ofstream(garbage) << "{{{";
    CHECK(run("validate " + garbage).exit_code == 1);
    CHECK(run("validate " + ws.file("missing.json")).exit_code == 1);
}

TEST_CASE("gen is deterministic per seed") {
    Workspace ws;
    const std::string a = ws.file("a.json");
    const std::string b = ws.file("b.json");
    REQUIRE(run("gen random --m 2 --n 3 --rank 2 --seed 7 --out " + a).exit_code == 0);
    REQUIRE(run("gen random --m 2 --n 3 --rank 2 --seed 7 --out " + b).exit_code == 0);
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("represent: deterministic report, --check, Werner pattern") {
    Workspace ws;
    const std::string path = ws.file("werner.json");
    REQUIRE(run("gen werner --e 0.1 --f 0.2 --out " + path).exit_code == 0);

    const RunResult once = run("represent " + path);
    const RunResult again = run("represent " + path);
    CHECK(once.exit_code == 0);
    CHECK(once.output == again.output);
    CHECK(once.output.find("rank 4") != std::string::npos);
    CHECK(once.output.find("0.70710678118654") != std::string::npos);

    CHECK(run("represent --check " + path).exit_code == 0);
    CHECK(run("represent --json " + path).output.find("\"items\"") != std::string::npos);
}

TEST_CASE("check: equivalent pair, certificate file, exit 0") {
    Workspace ws;
    const std::string prefix = ws.file("orbit");
    REQUIRE(run("gen orbit-pair --m 2 --n 3 --rank 4 --seed 5 --out " + prefix).exit_code == 0);
    const std::string cert = ws.file("cert.json");
    const RunResult result =
        run("check " + prefix + "_a.json " + prefix + "_b.json --out " + cert);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("equivalent") != std::string::npos);

    // The emitted certificate actually maps a onto b.
    const StateFile a = read_state_file(prefix + "_a.json");
    const StateFile b = read_state_file(prefix + "_b.json");
    const LocalUnitary lu = read_certificate_file(cert);
    const DensityMatrix moved =
        apply_local_unitary(DensityMatrix{a.dims, a.mat}, lu);
    CHECK(frobenius_distance(moved.mat, b.mat) < 1e-8);
}

TEST_CASE("check: inequivalent Werner parameters, exit 3") {
    Workspace ws;
    const std::string w3 = ws.file("w3.json");
    const std::string w4 = ws.file("w4.json");
    REQUIRE(run("gen werner --e 0 --f 0.3 --out " + w3).exit_code == 0);
    REQUIRE(run("gen werner --e 0 --f 0.4 --out " + w4).exit_code == 0);
    const RunResult result = run("check " + w3 + " " + w4);
    CHECK(result.exit_code == 3);
    CHECK(result.output.find("SpectrumMismatch") != std::string::npos);
}

TEST_CASE("check: same file twice, exit 0") {
    Workspace ws;
    const std::string path = ws.file("state.json");
    REQUIRE(run("gen random --m 2 --n 2 --rank 3 --seed 9 --out " + path).exit_code == 0);
    CHECK(run("check " + path + " " + path + " --out " + ws.file("c.json")).exit_code == 0);
}

TEST_CASE("check: dims mismatch, exit 5") {
    Workspace ws;
    const std::string a = ws.file("a.json");
    const std::string b = ws.file("b.json");
    REQUIRE(run("gen random --m 2 --n 2 --rank 2 --seed 1 --out " + a).exit_code == 0);
    REQUIRE(run("gen random --m 2 --n 3 --rank 2 --seed 1 --out " + b).exit_code == 0);
    CHECK(run("check " + a + " " + b).exit_code == 5);
}

TEST_CASE("dim: maximally mixed is 0, generic two-qubit is 6") {
    Workspace ws;
    // f = 1/4 puts the e=0 Werner family exactly at the maximally mixed state.
    const std::string mixed = ws.file("mixed.json");
    REQUIRE(run("gen werner --e 0 --f 0.25 --out " + mixed).exit_code == 0);
    const RunResult zero = run("dim " + mixed);
    CHECK(zero.exit_code == 0);
    CHECK(zero.output.find("orbit dimension: 0") != std::string::npos);

    const std::string generic = ws.file("generic.json");
    REQUIRE(run("gen random --m 2 --n 2 --rank 4 --seed 3 --out " + generic).exit_code == 0);
    const RunResult six = run("dim " + generic);
    CHECK(six.exit_code == 0);
    CHECK(six.output.find("orbit dimension: 6") != std::string::npos);
    CHECK(six.output.find("ambient state-space dimension: 15") != std::string::npos);
}

TEST_CASE("orbit-test: small deterministic run passes") {
    const RunResult result = run("orbit-test --dims 2x2 --trials 6 --seed 12");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("PASS") != std::string::npos);
    CHECK(result.output.find("orbit round-trips: 6/6") != std::string::npos);
    CHECK(result.output.find("perturbed negatives: 6/6") != std::string::npos);
}
