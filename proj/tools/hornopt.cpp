#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hornopt/artifacts.hpp"
#include "hornopt/config.hpp"
#include "hornopt/log.hpp"
#include "hornopt/spectral.hpp"

namespace {

using namespace hornopt;

std::string num(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out_dir) {
    try {
        std::vector<std::string> defaulted;
        ProblemConfig config = load_config(config_path, &defaulted);
        if (seed) config.opt.seed = *seed;
        if (out_dir) config.output_dir = *out_dir;
        return run(config);
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
}

// duct.csv re-reader for `verify`: x, D, optional further columns
BoreProfile read_duct_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open duct csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty duct csv: " + path);

    std::vector<double> xs;
    std::vector<double> ds;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) continue;
        const double x = std::stod(cell);
        if (!std::getline(row, cell, ',')) {
            throw std::runtime_error("duct csv row lacks a diameter column: " + line);
        }
        const double d = std::stod(cell);
        xs.push_back(x);
        ds.push_back(d);
    }
    if (xs.size() < 3) throw std::runtime_error("duct csv needs at least 3 rows");

    const double length = xs.back();
    const int m = static_cast<int>(xs.size());
    const Grid grid = Grid::uniform(length, m);
    for (int i = 0; i < m; ++i) {
        if (std::abs(xs[static_cast<std::size_t>(i)] - grid.node(i)) > 1e-9 * length) {
            throw std::runtime_error("duct csv abscissae are not a uniform grid on [0, L]");
        }
    }
    BoreProfile profile{grid, std::move(ds)};
    profile.validate();
    return profile;
}

int cmd_verify(const std::string& duct_path, int n_modes) {
    try {
        const BoreProfile profile = read_duct_csv(duct_path);
        const auto pairs = eigen_solve(profile, n_modes);
        const double orthogonality = orthogonality_check(pairs, profile);
        std::cout << "n,k,lambda\n";
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            std::cout << (n + 1) << ',' << num(pairs[n].wave_number) << ','
                      << num(pairs[n].eigenvalue) << '\n';
        }
        std::cout << "max off-diagonal (D^2-weighted): " << num(orthogonality) << '\n';
        return 0;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
}

int cmd_oracle(const std::string& kind_name, int n, int m, double length,
               const std::string& out_dir) {
    try {
        if (kind_name != "cylinder" && kind_name != "cone") {
            throw std::runtime_error("oracle kind must be cylinder or cone, got " + kind_name);
        }
        const DuctKind kind = kind_name == "cylinder" ? DuctKind::cylinder : DuctKind::cone;
        PhysicalParams params;
        params.length = length;
        const Grid grid = Grid::uniform(length, m);
        const EigenPair pair = analytic_oracle(kind, params, n, grid);

        std::filesystem::create_directories(out_dir);
        const auto path =
            std::filesystem::path(out_dir) / ("oracle_" + kind_name + "_n" + std::to_string(n) + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << "x,phi,dphi\n";
        for (int i = 0; i < grid.node_count; ++i) {
            out << num(grid.node(i)) << ',' << num(pair.phi[static_cast<std::size_t>(i)]) << ','
                << num(pair.dphi[static_cast<std::size_t>(i)]) << '\n';
        }
        std::cout << kind_name << " mode " << n << ": k = " << num(pair.wave_number)
                  << ", lambda = " << num(pair.eigenvalue) << " -> " << path.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hornopt: optimal-energy design of axisymmetric acoustic horn profiles"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    auto* run_cmd = app.add_subcommand("run", "optimize a horn from a config file");
    run_cmd->add_option("--config", config_path, "problem configuration file")->required();
    run_cmd->add_option("--seed", seed, "override the RNG seed");
    run_cmd->add_option("--out", out_dir, "override the output directory");

    std::string duct_path;
    int verify_modes = 5;
    auto* verify_cmd = app.add_subcommand("verify", "solve the spectrum of a duct.csv profile");
    verify_cmd->add_option("--duct", duct_path, "duct csv (columns x, D, ...)")->required();
    verify_cmd->add_option("--modes", verify_modes, "number of modes to compute");

    std::string oracle_kind;
    int oracle_n = 1;
    int oracle_m = 513;
    double oracle_length = 0.772;
    std::string oracle_out = ".";
    auto* oracle_cmd = app.add_subcommand("oracle", "emit an analytic cylinder/cone fixture");
    oracle_cmd->add_option("--kind", oracle_kind, "cylinder or cone")->required();
    oracle_cmd->add_option("--n", oracle_n, "mode index (1-based)");
    oracle_cmd->add_option("--m", oracle_m, "grid nodes");
    oracle_cmd->add_option("--length", oracle_length, "duct length (m)");
    oracle_cmd->add_option("--out", oracle_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the usage text
        return code == 0 ? 0 : 1;
    }

    if (run_cmd->parsed()) return cmd_run(config_path, seed, out_dir);
    if (verify_cmd->parsed()) return cmd_verify(duct_path, verify_modes);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_kind, oracle_n, oracle_m, oracle_length,
                                                oracle_out);
    return 1;
}
