#include "hornopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hornopt/log.hpp"

namespace hornopt {

Problem ProblemConfig::make_problem() const {
    Problem problem;
    problem.params = params;
    problem.harmonics = harmonics();
    problem.bounds = bounds;
    problem.initial_diameter = initial_diameter;
    problem.grid = Grid::uniform(params.length, grid_nodes);
    return problem;
}

OptimizeOptions ProblemConfig::make_options() const {
    OptimizeOptions options;
    options.max_iters = opt.max_iters;
    options.tol = opt.tol;
    options.penalty_weight = opt.penalty_weight.value_or(0.0);
    options.restarts = opt.restarts;
    options.seed = opt.seed;
    return options;
}

void ProblemConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError(field + ": " + why);
    };
    if (!(params.density > 0.0)) fail("model.rho0", "must be positive");
    if (!(params.sound_speed > 0.0)) fail("model.sound_speed", "must be positive");
    if (!(params.fundamental > 0.0)) fail("model.f0", "must be positive");
    if (!(params.length > 0.0)) fail("model.length", "must be positive");
    if (multipliers.empty()) fail("model.multipliers", "must name at least one harmonic");
    if (multipliers.front() < 1) fail("model.multipliers", "must be >= 1");
    if (!std::is_sorted(multipliers.begin(), multipliers.end()) ||
        std::adjacent_find(multipliers.begin(), multipliers.end()) != multipliers.end()) {
        fail("model.multipliers", "multipliers must be strictly increasing");
    }
    if (!(bounds.lower < bounds.upper)) fail("model.d_lo", "lower bound must be below d_hi");
    if (!(bounds.diameter_floor > 0.0)) fail("model.floor", "must be positive");
    if (!(initial_diameter >= bounds.diameter_floor)) {
        fail("model.d0", "must be at least the diameter floor");
    }
    if (grid_nodes < 3) fail("integrate.m", "need at least 3 grid nodes");
    if (opt.max_iters < 0) fail("optimize.max_iters", "must be nonnegative");
    if (!(opt.tol > 0.0)) fail("optimize.tol", "must be positive");
    if (opt.penalty_weight && !(*opt.penalty_weight > 0.0)) {
        fail("optimize.penalty_w", "must be positive (or 'auto')");
    }
    if (opt.restarts < 1) fail("optimize.restarts", "must be at least 1");
    if (output_dir.empty()) fail("cli.output_dir", "must not be empty");
}

bool ProblemConfig::operator==(const ProblemConfig& other) const {
    return params.density == other.params.density &&
           params.sound_speed == other.params.sound_speed &&
           params.fundamental == other.params.fundamental &&
           params.length == other.params.length && multipliers == other.multipliers &&
           bounds.lower == other.bounds.lower && bounds.upper == other.bounds.upper &&
           bounds.diameter_floor == other.bounds.diameter_floor &&
           initial_diameter == other.initial_diameter && grid_nodes == other.grid_nodes &&
           opt.max_iters == other.opt.max_iters && opt.tol == other.opt.tol &&
           opt.penalty_weight == other.opt.penalty_weight && opt.restarts == other.opt.restarts &&
           opt.seed == other.opt.seed && output_dir == other.output_dir;
}

namespace {

std::string trim(std::string s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) s.erase(s.begin());
    while (!s.empty() && is_space(s.back())) s.pop_back();
    return s;
}

// section.key -> value
std::map<std::string, std::string> parse_ini(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());

    std::map<std::string, std::string> entries;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected key = value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
        }
        entries[section.empty() ? key : section + "." + key] = value;
    }
    return entries;
}

double parse_double(const std::string& field, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field + ": cannot parse '" + value + "' as a number");
    }
}

long long parse_int(const std::string& field, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field + ": cannot parse '" + value + "' as an integer");
    }
}

std::vector<int> parse_int_list(const std::string& field, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_int(field, item)));
    }
    if (out.empty()) throw ConfigError(field + ": empty list");
    return out;
}

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

}  // namespace

ProblemConfig load_config(const std::filesystem::path& path, std::vector<std::string>* defaulted) {
    auto entries = parse_ini(path);
    ProblemConfig config;

    const auto take = [&](const char* field) -> std::optional<std::string> {
        auto it = entries.find(field);
        if (it == entries.end()) {
            if (defaulted != nullptr) defaulted->push_back(field);
            return std::nullopt;
        }
        std::string value = it->second;
        entries.erase(it);
        return value;
    };
    const auto take_double = [&](const char* field, double& target) {
        if (auto v = take(field)) target = parse_double(field, *v);
    };

    take_double("model.rho0", config.params.density);
    take_double("model.sound_speed", config.params.sound_speed);
    take_double("model.f0", config.params.fundamental);
    take_double("model.length", config.params.length);
    take_double("model.d0", config.initial_diameter);
    if (auto v = take("model.multipliers")) {
        config.multipliers = parse_int_list("model.multipliers", *v);
    }
    take_double("model.d_lo", config.bounds.lower);
    take_double("model.d_hi", config.bounds.upper);
    take_double("model.floor", config.bounds.diameter_floor);

    if (auto v = take("integrate.m")) {
        config.grid_nodes = static_cast<int>(parse_int("integrate.m", *v));
    }

    if (auto v = take("optimize.max_iters")) {
        config.opt.max_iters = static_cast<int>(parse_int("optimize.max_iters", *v));
    }
    take_double("optimize.tol", config.opt.tol);
    if (auto v = take("optimize.penalty_w")) {
        if (*v == "auto") {
            config.opt.penalty_weight.reset();
        } else {
            config.opt.penalty_weight = parse_double("optimize.penalty_w", *v);
        }
    }
    if (auto v = take("optimize.restarts")) {
        config.opt.restarts = static_cast<int>(parse_int("optimize.restarts", *v));
    }
    if (auto v = take("optimize.seed")) {
        config.opt.seed = static_cast<std::uint64_t>(parse_int("optimize.seed", *v));
    }

    if (auto v = take("cli.output_dir")) config.output_dir = *v;

    if (!entries.empty()) {
        throw ConfigError("unknown config field '" + entries.begin()->first + "'");
    }

    config.validate();
    if (defaulted != nullptr && !defaulted->empty()) {
        std::string joined;
        for (const std::string& f : *defaulted) {
            if (!joined.empty()) joined += ", ";
            joined += f;
        }
        log_warn("config " + path.string() + ": using defaults for " + joined);
    }
    return config;
}

void save_config(const ProblemConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path.string());

    out << "[model]\n";
    out << "rho0 = " << format_double(config.params.density) << "\n";
    out << "sound_speed = " << format_double(config.params.sound_speed) << "\n";
    out << "f0 = " << format_double(config.params.fundamental) << "\n";
    out << "length = " << format_double(config.params.length) << "\n";
    out << "d0 = " << format_double(config.initial_diameter) << "\n";
    out << "multipliers = ";
    for (std::size_t i = 0; i < config.multipliers.size(); ++i) {
        if (i > 0) out << ", ";
        out << config.multipliers[i];
    }
    out << "\n";
    out << "d_lo = " << format_double(config.bounds.lower) << "\n";
    out << "d_hi = " << format_double(config.bounds.upper) << "\n";
    out << "floor = " << format_double(config.bounds.diameter_floor) << "\n";
    out << "\n[integrate]\n";
    out << "m = " << config.grid_nodes << "\n";
    out << "\n[optimize]\n";
    out << "max_iters = " << config.opt.max_iters << "\n";
    out << "tol = " << format_double(config.opt.tol) << "\n";
    out << "penalty_w = "
        << (config.opt.penalty_weight ? format_double(*config.opt.penalty_weight) : "auto") << "\n";
    out << "restarts = " << config.opt.restarts << "\n";
    out << "seed = " << config.opt.seed << "\n";
    out << "\n[cli]\n";
    out << "output_dir = " << config.output_dir.string() << "\n";
    if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace hornopt
