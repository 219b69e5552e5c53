#include "lradapt/cli/config.hpp"

#include "lradapt/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lradapt::cli {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& value,
                            const std::string& expected) {
    throw Error(ErrorCode::Parse, "invalid value '" + value + "' for key '" + section + "." + key + "' (expected " +
                                      expected + ")");
}

double as_real(const std::string& section, const std::string& key, const std::string& value) {
    auto v = parse_real(value);
    if (!v) bad_value(section, key, value, "a number");
    return *v;
}

template <typename Int>
Int as_int(const std::string& section, const std::string& key, const std::string& value) {
    Int out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) bad_value(section, key, value, "an integer");
    return out;
}

bool as_bool(const std::string& section, const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(section, key, value, "true or false");
}

std::vector<double> as_list(const std::string& section, const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(as_real(section, key, trim(item)));
    if (out.empty()) bad_value(section, key, value, "a comma-separated list of numbers");
    return out;
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
    throw Error(ErrorCode::Parse, "unknown key '" + key + "' in section [" + section + "]");
}

void apply_problem(ProblemSpec& p, const std::string& key, const std::string& value) {
    const std::string s = "problem";
    if (key == "type") {
        if (value == "quadratic") p.type = ProblemType::Quadratic;
        else if (value == "rosenbrock") p.type = ProblemType::Rosenbrock;
        else if (value == "logreg") p.type = ProblemType::LogReg;
        else bad_value(s, key, value, "quadratic, rosenbrock or logreg");
    } else if (key == "start") p.start = as_list(s, key, value);
    else if (key == "value_noise") p.value_noise = as_real(s, key, value);
    else if (key == "dim") p.dim = as_int<Eigen::Index>(s, key, value);
    else if (key == "condition") p.condition = as_real(s, key, value);
    else if (key == "f_min") p.f_min = as_real(s, key, value);
    else if (key == "rotated") p.rotated = as_bool(s, key, value);
    else if (key == "samples") p.samples = as_int<Eigen::Index>(s, key, value);
    else if (key == "features") p.features = as_int<Eigen::Index>(s, key, value);
    else if (key == "separation") p.separation = as_real(s, key, value);
    else if (key == "batch_size") p.batch_size = as_int<Eigen::Index>(s, key, value);
    else if (key == "l2") p.l2 = as_real(s, key, value);
    else if (key == "csv") p.csv = value;
    else unknown_key(s, key);
}

void apply_optimizer(RunConfig& c, const std::string& key, const std::string& value) {
    const std::string s = "optimizer";
    if (key == "name") {
        auto kind = parse_metric_kind(value);
        if (!kind) bad_value(s, key, value, "sgd, adagrad, rmsprop, momentum or adam");
        c.optimizer = *kind;
    } else if (key == "beta") c.hyper.beta = as_real(s, key, value);
    else if (key == "beta1") c.hyper.beta1 = as_real(s, key, value);
    else if (key == "beta2") c.hyper.beta2 = as_real(s, key, value);
    else if (key == "alpha") c.hyper.alpha = as_real(s, key, value);
    else if (key == "epsilon") c.hyper.epsilon = as_real(s, key, value);
    else unknown_key(s, key);
}

void apply_adapt(AdaptConfig& a, const std::string& key, const std::string& value) {
    const std::string s = "adapt";
    if (key == "eta0") a.eta0 = as_real(s, key, value);
    else if (key == "alpha_up") a.alpha_up = as_real(s, key, value);
    else if (key == "alpha_down") a.alpha_down = as_real(s, key, value);
    else if (key == "ratio_hi") a.ratio_hi = as_real(s, key, value);
    else if (key == "ratio_lo") a.ratio_lo = as_real(s, key, value);
    else if (key == "f_star") {
        if (value == "none") a.f_star.reset();
        else a.f_star = as_real(s, key, value);
    } else if (key == "noise") {
        auto mode = parse_noise_mode(value);
        if (!mode) bad_value(s, key, value, "zero, fixed:R, clt or proportional:C");
        a.noise = *mode;
    } else if (key == "cadence") {
        auto c = parse_cadence(value);
        if (!c) bad_value(s, key, value, "every_step or pow2_epochs");
        a.cadence = *c;
    } else if (key == "phi_eps") a.phi_eps = as_real(s, key, value);
    else if (key == "eta_min") a.eta_min = as_real(s, key, value);
    else if (key == "eta_max") a.eta_max = as_real(s, key, value);
    else if (key == "enabled") a.enabled = as_bool(s, key, value);
    else unknown_key(s, key);
}

void apply_run(RunConfig& c, const std::string& key, const std::string& value) {
    const std::string s = "run";
    if (key == "iters") c.iters = as_int<std::int64_t>(s, key, value);
    else if (key == "seed") c.seed = as_int<std::uint64_t>(s, key, value);
    else if (key == "out") c.out = value;
    else if (key == "loss_tol") c.loss_tol = as_real(s, key, value);
    else if (key == "grad_tol") c.grad_tol = as_real(s, key, value);
    else if (key == "loss_threshold") c.loss_threshold = as_real(s, key, value);
    else unknown_key(s, key);
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
    if (section == "problem") apply_problem(cfg.problem, key, value);
    else if (section == "optimizer") apply_optimizer(cfg, key, value);
    else if (section == "adapt") apply_adapt(cfg.adapt, key, value);
    else if (section == "run") apply_run(cfg, key, value);
    else throw Error(ErrorCode::Parse, "unknown section [" + section + "]");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        std::string text = trim(std::string_view(line).substr(0, hash));
        if (text.empty()) continue;
        auto located = [&](const std::string& msg) {
            return Error(ErrorCode::Parse, source + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (text.front() == '[') {
            if (text.back() != ']') throw located("malformed section header '" + text + "'");
            section = trim(std::string_view(text).substr(1, text.size() - 2));
            if (section != "problem" && section != "optimizer" && section != "adapt" && section != "run")
                throw located("unknown section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw located("expected 'key = value', got '" + text + "'");
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        if (section.empty()) throw located("key '" + key + "' appears before any section header");
        try {
            apply_setting(cfg, section, key, value);
        } catch (const Error& e) {
            throw located(e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
    return parse_config(in, path);
}

void check_config(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
    if (auto p = validate(cfg.adapt); !p.empty()) fail("[adapt] " + p.front());
    if (auto p = validate(cfg.hyper); !p.empty()) fail("[optimizer] " + p.front());
    if (cfg.iters < 1) fail("[run] iters must be >= 1");
    const auto& p = cfg.problem;
    if (!(p.value_noise >= 0.0)) fail("[problem] value_noise must be >= 0");
    switch (p.type) {
        case ProblemType::Quadratic:
            if (p.dim < 1) fail("[problem] dim must be >= 1");
            if (!(p.condition >= 1.0)) fail("[problem] condition must be >= 1");
            break;
        case ProblemType::Rosenbrock: break;
        case ProblemType::LogReg:
            if (p.csv.empty() && (p.samples < 2 || p.features < 1)) fail("[problem] needs samples >= 2, features >= 1");
            if (p.batch_size < 1) fail("[problem] batch_size must be >= 1");
            if (!(p.l2 >= 0.0)) fail("[problem] l2 must be >= 0");
            break;
    }
    if (std::holds_alternative<NoiseCLT>(cfg.adapt.noise) && p.type != ProblemType::LogReg)
        fail("[adapt] noise = clt needs per-example losses (problem type logreg)");
}

std::unique_ptr<BatchObjective> make_problem(const RunConfig& cfg) {
    check_config(cfg);
    const auto& p = cfg.problem;
    std::unique_ptr<BatchObjective> problem;
    switch (p.type) {
        case ProblemType::Quadratic: {
            Rng rng(cfg.seed);
            auto q = p.rotated ? random_quadratic(rng, p.dim, p.condition, p.f_min)
                               : diagonal_quadratic(p.dim, p.condition, p.f_min);
            problem = std::make_unique<QuadraticObjective>(std::move(q));
            break;
        }
        case ProblemType::Rosenbrock: problem = std::make_unique<RosenbrockObjective>(); break;
        case ProblemType::LogReg: {
            auto data = std::make_shared<LogRegDataset>(
                p.csv.empty() ? make_synthetic_logreg(cfg.seed, p.samples, p.features, p.separation, p.batch_size, p.l2)
                              : load_logreg_csv(p.csv, p.batch_size, p.l2));
            const bool clt = std::holds_alternative<NoiseCLT>(cfg.adapt.noise);
            problem = std::make_unique<LogRegObjective>(std::move(data), cfg.seed + 1, clt);
            break;
        }
    }
    if (p.value_noise > 0.0)
        problem = std::make_unique<NoisyValueObjective>(std::move(problem), p.value_noise, cfg.seed + 2);
    return problem;
}

ParamVector initial_point(const RunConfig& cfg, const BatchObjective& problem) {
    const auto n = problem.dim();
    if (cfg.problem.start) {
        const auto& s = *cfg.problem.start;
        if (static_cast<Eigen::Index>(s.size()) != n)
            throw Error(ErrorCode::InvalidConfig, "[problem] start has " + std::to_string(s.size()) +
                                                      " entries, problem dimension is " + std::to_string(n));
        return Eigen::Map<const Vector>(s.data(), n);
    }
    switch (cfg.problem.type) {
        case ProblemType::Quadratic: return Vector::Ones(n);
        case ProblemType::Rosenbrock: return (Vector(2) << -1.5, 1.5).finished();
        case ProblemType::LogReg: return Vector::Zero(n);
    }
    return Vector::Zero(n);
}

}  // namespace lradapt::cli
