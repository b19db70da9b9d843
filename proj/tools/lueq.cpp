// lueq — representations and local-unitary equivalence of bipartite states.
//
// Subcommands: validate, represent, check, gen, orbit-test, dim.
// Exit codes: 0 success/equivalent, 1 I/O or usage error, 2 invalid state,
// 3 inequivalent, 4 undecided, 5 dims mismatch.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lueq/equivalence.hpp"
#include "lueq/io.hpp"

namespace {

using namespace lueq;

int log_level() {
    const char* env = std::getenv("LUEQ_LOG");
    return env ? std::atoi(env) : 0;
}

void log_stage(const std::string& msg) {
    if (log_level() > 0) std::cerr << "lueq: " << msg << "\n";
}

struct CommonTols {
    double tol_accept = 1e-8;
    double tol_rank = 1e-9;
    double tol_cluster = 1e-8;

    ToleranceConfig config() const {
        ToleranceConfig tol;
        tol.tol_accept = tol_accept;
        tol.tol_rank = tol_rank;
        tol.tol_cluster = tol_cluster;
        return tol;
    }
};

void add_tol_options(CLI::App* cmd, CommonTols& tols) {
    cmd->add_option("--tol-accept", tols.tol_accept, "certificate acceptance tolerance");
    cmd->add_option("--tol-rank", tols.tol_rank, "rank / Schmidt clustering tolerance");
    cmd->add_option("--tol-cluster", tols.tol_cluster, "eigenvalue clustering tolerance");
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const IoError*>(&e)) return 1;
    if (dynamic_cast<const DimsMismatch*>(&e)) return 5;
    if (dynamic_cast<const InvalidParams*>(&e) || dynamic_cast<const InvalidRank*>(&e)) return 1;
    return 2;  // state-validation failures
}

int cmd_validate(const std::string& path) {
    const StateFile file = read_state_file(path);
    const double herm = frobenius_distance(file.mat, file.mat.adjoint());
    const double trace_dev = std::abs(file.mat.trace() - Complex(1.0));
    std::printf("dims: %zux%zu\n", file.dims.m, file.dims.n);
    std::printf("hermiticity deviation: %.3e\n", herm);
    std::printf("trace deviation:       %.3e\n", trace_dev);
    try {
        validate(file.mat, file.dims);
    } catch (const Error& e) {
        std::printf("invalid: %s\n", e.what());
        return 2;
    }
    const HermitianEig eig = eigh(file.mat);
    std::printf("smallest eigenvalue:   %.3e\n", eig.eigenvalues.back());
    std::printf("valid\n");
    return 0;
}

int cmd_represent(const std::string& path, const CommonTols& tols, bool as_json, bool check) {
    const StateFile file = read_state_file(path);
    const DensityMatrix rho = validate(file.mat, file.dims);
    const ToleranceConfig tol = tols.config();
    const Representation rep = build_representation(rho, tol);
    const GaugeDescriptor descriptor = gauge_descriptor(rep, tol);
    std::fputs(representation_report(rep, descriptor, as_json).c_str(), stdout);
    if (check) {
        const double err = frobenius_distance(representation_to_state(rep).mat, rho.mat);
        std::printf("reconstruction residual: %.3e\n", err);
        if (err >= 1e-9) {
            std::fprintf(stderr, "lueq: reconstruction check failed\n");
            return 2;
        }
    }
    return 0;
}

int cmd_check(const std::string& path_a, const std::string& path_b, const CommonTols& tols,
              int restarts, std::uint64_t seed, bool as_json, const std::string& cert_path) {
    const StateFile file_a = read_state_file(path_a);
    const StateFile file_b = read_state_file(path_b);
    const DensityMatrix rho_a = validate(file_a.mat, file_a.dims);
    const DensityMatrix rho_b = validate(file_b.mat, file_b.dims);
    if (rho_a.dims != rho_b.dims) {
        throw DimsMismatch("check: dims " + std::to_string(rho_a.dims.m) + "x" +
                           std::to_string(rho_a.dims.n) + " vs " + std::to_string(rho_b.dims.m) +
                           "x" + std::to_string(rho_b.dims.n));
    }
    EquivalenceConfig config;
    config.tol = tols.config();
    config.restarts = restarts;
    config.seed = seed;
    log_stage("deciding equivalence");
    const Verdict verdict = decide_equivalence(rho_a, rho_b, config);
    std::fputs(verdict_report(verdict, as_json).c_str(), stdout);
    if (const auto* eq = std::get_if<Equivalent>(&verdict)) {
        write_certificate_file(cert_path, rho_a.dims, eq->certificate);
        if (!as_json) std::printf("certificate written to %s\n", cert_path.c_str());
        return 0;
    }
    if (std::holds_alternative<Inequivalent>(verdict)) return 3;
    return 4;
}

int cmd_gen(const std::string& kind, double e, double f, std::size_t m, std::size_t n,
            std::size_t rank, std::uint64_t seed, const std::string& out) {
    if (kind == "werner") {
        const DensityMatrix rho = werner(WernerParams{e, f});
        const std::string path = out.empty() ? "werner.json" : out;
        write_state_file(path, rho.dims, rho.mat);
        std::printf("wrote %s\n", path.c_str());
        return 0;
    }
    if (kind == "random") {
        const DensityMatrix rho = random_density(BipartiteDims{m, n}, rank, seed);
        const std::string path = out.empty() ? "random.json" : out;
        write_state_file(path, rho.dims, rho.mat);
        std::printf("wrote %s\n", path.c_str());
        return 0;
    }
    if (kind == "orbit-pair") {
        const BipartiteDims dims{m, n};
        const DensityMatrix rho = random_density(dims, rank, seed);
        const LocalUnitary lu = random_local_unitary(dims, seed + 0x51ed270b7a64ULL);
        const DensityMatrix moved = apply_local_unitary(rho, lu);
        const std::string prefix = out.empty() ? "orbit" : out;
        write_state_file(prefix + "_a.json", dims, rho.mat);
        write_state_file(prefix + "_b.json", dims, moved.mat);
        write_certificate_file(prefix + "_lu.json", dims, lu);
        std::printf("wrote %s_a.json, %s_b.json, %s_lu.json\n", prefix.c_str(), prefix.c_str(),
                    prefix.c_str());
        return 0;
    }
    throw InvalidParams("gen: unknown kind '" + kind + "' (werner|random|orbit-pair)");
}

// Shifts the top eigenvalue by delta and renormalizes, keeping the eigenbasis.
// Pure states have no second level to shift against, so weight moves onto the
// next (empty) eigenvector instead, which changes the rank.
DensityMatrix perturb_spectrum(const DensityMatrix& rho, double delta) {
    const HermitianEig eig = eigh(rho.mat);
    std::vector<double> lambdas = eig.eigenvalues;
    if (lambdas.size() > 1 && lambdas[1] < 1e-12) {
        lambdas[0] -= delta;
        lambdas[1] += delta;
    } else {
        lambdas[0] += delta;
    }
    double sum = 0.0;
    for (double v : lambdas) sum += v;
    const std::size_t d = rho.dims.total();
    ComplexMatrix mat(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        const double w = lambdas[j] / sum;
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                mat(r, c) += w * eig.eigenvectors(r, j) * std::conj(eig.eigenvectors(c, j));
    }
    return DensityMatrix{rho.dims, mat};
}

int cmd_orbit_test(const std::vector<std::string>& dims_specs, int trials, std::uint64_t seed,
                   const CommonTols& tols, int restarts) {
    EquivalenceConfig config;
    config.tol = tols.config();
    config.restarts = restarts;
    config.seed = seed;

    std::size_t equivalent = 0, inequivalent = 0, undecided = 0;
    std::size_t orbit_ok = 0, negative_ok = 0;
    double max_residual = 0.0;
    int total_orbit = 0, total_negative = 0;

    for (const std::string& spec : dims_specs) {
        const auto x = spec.find('x');
        if (x == std::string::npos) {
            throw InvalidParams("orbit-test: dims must look like 2x3, got '" + spec + "'");
        }
        const BipartiteDims dims{std::stoul(spec.substr(0, x)), std::stoul(spec.substr(x + 1))};
        Rng rng(seed ^ (dims.m * 1315423911ULL + dims.n));
        for (int t = 0; t < trials; ++t) {
            const std::size_t rank = 1 + t % dims.total();
            const DensityMatrix rho = random_density(dims, rank, rng.next_seed());
            const DensityMatrix moved =
                apply_local_unitary(rho, random_local_unitary(dims, rng.next_seed()));
            const Verdict verdict = decide_equivalence(rho, moved, config);
            ++total_orbit;
            if (const auto* eq = std::get_if<Equivalent>(&verdict)) {
                ++equivalent;
                ++orbit_ok;
                max_residual = std::max(max_residual, eq->residual);
            } else if (std::holds_alternative<Inequivalent>(verdict)) {
                ++inequivalent;
            } else {
                ++undecided;
            }

            const DensityMatrix bent = perturb_spectrum(rho, 1e-3);
            const Verdict negative = decide_equivalence(rho, bent, config);
            ++total_negative;
            if (std::holds_alternative<Inequivalent>(negative)) {
                ++inequivalent;
                ++negative_ok;
            } else if (std::holds_alternative<Equivalent>(negative)) {
                ++equivalent;
            } else {
                ++undecided;
            }
        }
    }

    std::printf("orbit round-trips: %zu/%d equivalent\n", orbit_ok, total_orbit);
    std::printf("perturbed negatives: %zu/%d inequivalent\n", negative_ok, total_negative);
    std::printf("max certificate residual: %.3e\n", max_residual);
    std::printf("verdicts: equivalent %zu, inequivalent %zu, undecided %zu\n", equivalent,
                inequivalent, undecided);
    const bool ok =
        orbit_ok == std::size_t(total_orbit) && negative_ok == std::size_t(total_negative);
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 4;
}

int cmd_dim(const std::string& path) {
    const StateFile file = read_state_file(path);
    const DensityMatrix rho = validate(file.mat, file.dims);
    const std::size_t dim = orbit_dimension(rho);
    const std::size_t ambient = file.dims.total() * file.dims.total() - 1;
    std::printf("orbit dimension: %zu\n", dim);
    std::printf("ambient state-space dimension: %zu\n", ambient);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"representations and local-unitary equivalence of bipartite mixed states"};
    app.require_subcommand(1);

    CommonTols tols;
    std::string path, path_b, out;
    bool as_json = false;
    bool check_flag = false;
    int restarts = 32;
    std::uint64_t seed = 0;

    auto* validate_cmd = app.add_subcommand("validate", "check a state file");
    validate_cmd->add_option("path", path)->required();
    add_tol_options(validate_cmd, tols);

    auto* represent_cmd = app.add_subcommand("represent", "print the representation r(rho)");
    represent_cmd->add_option("path", path)->required();
    represent_cmd->add_flag("--json", as_json);
    represent_cmd->add_flag("--check", check_flag, "verify the report reconstructs the state");
    add_tol_options(represent_cmd, tols);

    auto* check_cmd = app.add_subcommand("check", "decide local-unitary equivalence");
    check_cmd->add_option("pathA", path)->required();
    check_cmd->add_option("pathB", path_b)->required();
    check_cmd->add_option("--restarts", restarts);
    check_cmd->add_option("--seed", seed);
    check_cmd->add_flag("--json", as_json);
    std::string cert_path = "certificate.json";
    check_cmd->add_option("--out", cert_path, "certificate output path");
    add_tol_options(check_cmd, tols);

    auto* gen_cmd = app.add_subcommand("gen", "generate state files");
    std::string kind;
    double e = 0.0, f = 0.0;
    std::size_t m = 2, n = 2, rank = 1;
    gen_cmd->add_option("kind", kind, "werner|random|orbit-pair")->required();
    gen_cmd->add_option("--e", e);
    gen_cmd->add_option("--f", f);
    gen_cmd->add_option("--m", m);
    gen_cmd->add_option("--n", n);
    gen_cmd->add_option("--rank", rank);
    gen_cmd->add_option("--seed", seed);
    gen_cmd->add_option("--out", out);

    auto* orbit_cmd = app.add_subcommand("orbit-test", "orbit round-trip self test");
    std::vector<std::string> dims_specs{"2x2", "2x3"};
    int trials = 100;
    orbit_cmd->add_option("--dims", dims_specs, "factor dims, e.g. --dims 2x2 2x3");
    orbit_cmd->add_option("--trials", trials);
    orbit_cmd->add_option("--seed", seed);
    orbit_cmd->add_option("--restarts", restarts);
    add_tol_options(orbit_cmd, tols);

    auto* dim_cmd = app.add_subcommand("dim", "numerical orbit dimension");
    dim_cmd->add_option("path", path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(path);
        if (represent_cmd->parsed()) return cmd_represent(path, tols, as_json, check_flag);
        if (check_cmd->parsed())
            return cmd_check(path, path_b, tols, restarts, seed, as_json, cert_path);
        if (gen_cmd->parsed()) return cmd_gen(kind, e, f, m, n, rank, seed, out);
        if (orbit_cmd->parsed()) return cmd_orbit_test(dims_specs, trials, seed, tols, restarts);
        if (dim_cmd->parsed()) return cmd_dim(path);
    } catch (const Error& err) {
        std::fprintf(stderr, "lueq: %s\n", err.what());
        return exit_code_for(err);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "lueq: %s\n", err.what());
        return 1;
    }
    return 1;
}
