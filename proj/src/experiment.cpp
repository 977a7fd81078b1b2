#include "cbsars/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "cbsars/chain.hpp"
#include "cbsars/invariance.hpp"
#include "cbsars/objectives.hpp"

namespace cbsars::cli {

namespace {

constexpr std::pair<Mode, std::string_view> kModes[] = {
    {Mode::trajectory, "trajectory"},           {Mode::normalized_chain, "normalized-chain"},
    {Mode::cr_estimate, "cr-estimate"},         {Mode::invariance_suite, "invariance-suite"},
    {Mode::si_check, "si-check"},               {Mode::constant_sigma, "constant-sigma"},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_real(std::string_view key, std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(std::string(key), line, "expected a finite number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view text, std::size_t line) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
        // Accept integral values written in floating-point notation such as 1e6.
        double d = 0.0;
        auto [p2, e2] = std::from_chars(text.data(), end, d);
        if (text.empty() || e2 != std::errc() || p2 != end || !(d >= 0.0) || d != std::floor(d) || d > 1.8e19) {
            throw ConfigError(std::string(key), line,
                              "expected a non-negative integer, got '" + std::string(text) + "'");
        }
        return static_cast<std::uint64_t>(d);
    }
    return v;
}

std::size_t to_count(std::string_view key, std::string_view text, std::size_t line) {
    const auto v = to_unsigned(key, text, line);
    if (v < 1) {
        throw ConfigError(std::string(key), line, std::string(key) + " must be >= 1");
    }
    return static_cast<std::size_t>(v);
}

bool to_bool(std::string_view key, std::string_view text, std::size_t line) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw ConfigError(std::string(key), line, "expected true or false, got '" + std::string(text) + "'");
}

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_comma_or_sa(std::string_view algorithm) {
    return algorithm == "csa" || algorithm == "xnes" || algorithm == "sa";
}

}  // namespace

std::string_view mode_name(Mode m) {
    for (const auto& [mode, name] : kModes) {
        if (mode == m) {
            return name;
        }
    }
    return "?";
}

Mode parse_mode(std::string_view name) {
    for (const auto& [mode, text] : kModes) {
        if (text == name) {
            return mode;
        }
    }
    throw ConfigError("mode", 0, "unknown mode '" + std::string(name) + "'");
}

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& message)
    : InvalidInput((line > 0 ? "line " + std::to_string(line) + ", " : std::string()) + "key '" + key +
                   "': " + message),
      key_(std::move(key)),
      line_(line) {}

void RunConfig::set(std::string_view key, std::string_view value, std::size_t line) {
    const std::string k(key);
    if (key == "mode") {
        try {
            mode = parse_mode(value);
        } catch (const ConfigError& e) {
            throw ConfigError(k, line, "unknown mode '" + std::string(value) + "'");
        }
    } else if (key == "algorithm") {
        const auto& names = algorithms::algorithm_names();
        if (value != "all" && std::find(names.begin(), names.end(), value) == names.end()) {
            throw ConfigError(k, line, "unknown algorithm '" + std::string(value) + "'");
        }
        algorithm = std::string(value);
    } else if (key == "algorithm.kappa_m") {
        algorithm_options.kappa_m = to_real(key, value, line);
    } else if (key == "algorithm.kappa_sigma") {
        algorithm_options.kappa_sigma = to_real(key, value, line);
    } else if (key == "algorithm.p") {
        algorithm_options.p = to_count(key, value, line);
    } else if (key == "algorithm.p_target") {
        algorithm_options.p_target = to_real(key, value, line);
    } else if (key == "algorithm.tau") {
        algorithm_options.tau = to_real(key, value, line);
    } else if (key == "objective") {
        if (value.empty()) {
            throw ConfigError(k, line, "objective must not be empty");
        }
        objective = std::string(value);
    } else if (key == "n") {
        n = static_cast<Eigen::Index>(to_count(key, value, line));
    } else if (key == "x0") {
        std::vector<double> values;
        std::size_t start = 0;
        while (start <= value.size()) {
            auto comma = value.find(',', start);
            if (comma == std::string_view::npos) {
                comma = value.size();
            }
            values.push_back(to_real(key, trim(value.substr(start, comma - start)), line));
            start = comma + 1;
        }
        x0 = std::move(values);
    } else if (key == "sigma0") {
        const double v = to_real(key, value, line);
        if (!(v > 0.0)) {
            throw ConfigError(k, line, "sigma0 must be positive");
        }
        sigma0 = v;
    } else if (key == "seed") {
        seed = to_unsigned(key, value, line);
    } else if (key == "replicates") {
        replicates = to_count(key, value, line);
    } else if (key == "max_evals") {
        max_evals = to_count(key, value, line);
    } else if (key == "target_f") {
        target_f = to_real(key, value, line);
    } else if (key == "require_target") {
        require_target = to_bool(key, value, line);
    } else if (key == "steps") {
        steps = to_count(key, value, line);
    } else if (key == "burn_in") {
        burn_in = static_cast<std::size_t>(to_unsigned(key, value, line));
    } else if (key == "stride") {
        stride = to_count(key, value, line);
    } else if (key == "horizon") {
        horizon = to_count(key, value, line);
    } else if (key == "trials") {
        const auto v = to_count(key, value, line);
        if (v > 100'000'000) {
            throw ConfigError(k, line, "trials must be <= 1e8");
        }
        trials = static_cast<int>(v);
    } else {
        throw ConfigError(k, line, "unknown key");
    }
}

void RunConfig::validate() const {
    if (n < 1) {
        throw ConfigError("n", 0, "missing required key");
    }
    if (!seed) {
        throw ConfigError("seed", 0, "missing required key");
    }
    if (objective.empty()) {
        throw ConfigError("objective", 0, "missing required key");
    }
    const bool needs_algorithm = mode != Mode::si_check && mode != Mode::constant_sigma;
    if (needs_algorithm && algorithm.empty()) {
        throw ConfigError("algorithm", 0, "missing required key");
    }
    if (mode == Mode::constant_sigma && !algorithm.empty() && algorithm != "constant") {
        throw ConfigError("algorithm", 0, "constant-sigma mode runs the constant step-size baseline only");
    }
    if (mode != Mode::invariance_suite && (algorithm == "all" || objective == "all")) {
        throw ConfigError(algorithm == "all" ? "algorithm" : "objective", 0,
                          "'all' is only accepted in invariance-suite mode");
    }
    if (x0.size() != 1 && static_cast<Eigen::Index>(x0.size()) != n) {
        throw ConfigError("x0", 0, "x0 must be one fill value or exactly n values");
    }
    if (objective != "all") {
        try {
            objectives::parse_objective(objective, n);
        } catch (const InvalidInput& e) {
            throw ConfigError("objective", 0, e.what());
        }
    }
    if (needs_algorithm && algorithm != "all") {
        try {
            algorithms::make_algorithm<double>(algorithm, n, algorithm_options);
        } catch (const InvalidInput& e) {
            throw ConfigError("algorithm", 0, e.what());
        }
    }
    if (burn_in && *burn_in >= steps && (mode == Mode::normalized_chain || mode == Mode::cr_estimate)) {
        throw ConfigError("burn_in", 0, "burn_in must be smaller than steps");
    }
}

Vector RunConfig::start_point() const {
    if (x0.size() == 1) {
        return Vector::Constant(n, x0.front());
    }
    return Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
}

std::size_t RunConfig::resolved_stride() const {
    if (stride) {
        return *stride;
    }
    return mode == Mode::constant_sigma ? std::max<std::size_t>(1, max_evals / 10'000) : 1;
}

std::size_t RunConfig::population() const {
    if (algorithm_options.p) {
        return *algorithm_options.p;
    }
    if (is_comma_or_sa(algorithm)) {
        return algorithms::default_population(n);
    }
    return 1;
}

std::string RunConfig::describe() const {
    std::ostringstream out;
    out << "mode=" << mode_name(mode);
    const std::string alg = mode == Mode::constant_sigma ? "constant" : algorithm;
    if (!alg.empty()) {
        out << " algorithm=" << alg;
        if (alg == "csa" || alg == "xnes") {
            out << " algorithm.p=" << population() << " algorithm.kappa_m=" << num(algorithm_options.kappa_m.value_or(1.0))
                << " algorithm.kappa_sigma=" << num(algorithm_options.kappa_sigma.value_or(1.0));
        } else if (alg == "sa") {
            out << " algorithm.p=" << population()
                << " algorithm.tau=" << num(algorithm_options.tau.value_or(1.0 / std::sqrt(static_cast<double>(n))));
        } else if (alg == "oneplusone") {
            out << " algorithm.kappa_sigma=" << num(algorithm_options.kappa_sigma.value_or(1.0 / 3.0))
                << " algorithm.p_target=" << num(algorithm_options.p_target.value_or(0.2));
        }
    }
    out << " objective=" << objective << " n=" << n << " x0=";
    for (std::size_t i = 0; i < x0.size(); ++i) {
        out << (i ? "," : "") << num(x0[i]);
    }
    out << " sigma0=" << num(sigma0) << " seed=" << seed.value_or(0) << " replicates=" << replicates
        << " max_evals=" << max_evals;
    if (target_f) {
        out << " target_f=" << num(*target_f);
    }
    out << " require_target=" << (require_target ? "true" : "false") << " steps=" << steps;
    if (burn_in) {
        out << " burn_in=" << *burn_in;
    }
    out << " stride=" << resolved_stride() << " horizon=" << horizon << " trials=" << trials;
    return out.str();
}

RunConfig parse_config_partial(std::string_view text) {
    RunConfig config;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty() || line_no == 0) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (text.empty()) {
                break;
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(trim(line)), line_no, "expected key=value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("", line_no, "empty key");
        }
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError(std::string(key), line_no, "key given twice");
        }
        config.set(key, value, line_no);
    }
    return config;
}

RunConfig parse_config(std::string_view text) {
    RunConfig config = parse_config_partial(text);
    config.validate();
    return config;
}

namespace {

const char* kTraceHeader = "t,evals,x_norm,sigma,z_norm,log_eta";

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header, const RunConfig& config)
        : out_(path, std::ios::binary) {
        if (!out_) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out_ << header << "\n# config " << config.describe() << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << "\n";
    }

    void record(const chain::TrajectoryRecord& r) {
        row({std::to_string(r.t), std::to_string(r.evals), num(r.x_norm), num(r.sigma), num(r.z_norm),
             num(r.log_eta)});
    }

private:
    std::ofstream out_;
};

// Runs body(r) for every replicate on a small thread pool; rethrows the first failure.
template <typename Body>
void parallel_replicates(std::size_t replicates, Body body) {
    std::vector<std::exception_ptr> errors(replicates);
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&]() {
        for (;;) {
            std::size_t r = 0;
            {
                std::lock_guard lock(mu);
                if (next >= replicates) {
                    return;
                }
                r = next++;
            }
            try {
                body(r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t threads = std::min<std::size_t>(hw, replicates);
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < threads; ++k) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

struct ReplicateSummary {
    std::uint64_t stream_seed = 0;
    std::size_t iterations = 0;
    std::size_t evals = 0;
    double final_f = std::nan("");
    std::optional<std::size_t> evals_to_target;
    std::optional<chain::CREstimate> cr;
};

std::optional<chain::CREstimate> try_estimate(const std::vector<double>& log_eta, std::optional<std::size_t> burn_in) {
    if (log_eta.empty()) {
        return std::nullopt;
    }
    try {
        return chain::estimate_cr(log_eta, burn_in.value_or(chain::default_burn_in(log_eta.size())));
    } catch (const InsufficientData&) {
        return std::nullopt;
    } catch (const InvalidInput&) {
        return std::nullopt;
    }
}

const char* kSummaryHeader = "replicate,stream_seed,iterations,evals,final_f,evals_to_target,cr,cr_half_width";

void write_summary(CsvFile& file, const std::vector<ReplicateSummary>& rows) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& s = rows[r];
        file.row({std::to_string(r), std::to_string(s.stream_seed), std::to_string(s.iterations),
                  std::to_string(s.evals), num(s.final_f),
                  s.evals_to_target ? std::to_string(*s.evals_to_target) : std::string(),
                  s.cr ? num(s.cr->cr) : std::string(), s.cr ? num(s.cr->half_width) : std::string()});
    }
}

std::filesystem::path trace_path(const std::filesystem::path& dir, std::size_t r) {
    return dir / ("trace_" + std::to_string(r) + ".csv");
}

ExperimentOutcome run_trajectories(const RunConfig& c, const std::filesystem::path& dir,
                                   const AlgorithmSpec& spec) {
    const auto f = objectives::make_objective<double>(c.objective, c.n);
    chain::TrajectoryOptions options;
    options.max_evals = c.max_evals;
    options.target_f = c.target_f;
    options.stride = c.resolved_stride();
    std::vector<ReplicateSummary> rows(c.replicates);
    parallel_replicates(c.replicates, [&](std::size_t r) {
        RngStream rng = RngStream::derive(*c.seed, r);
        const auto result =
            chain::run_trajectory(AlgorithmState(c.start_point(), c.sigma0), spec, f, options, rng);
        CsvFile trace(trace_path(dir, r), kTraceHeader, c);
        std::vector<double> log_eta;
        for (const auto& rec : result.records) {
            trace.record(rec);
            if (rec.t > 0) {
                log_eta.push_back(rec.log_eta);
            }
        }
        auto& s = rows[r];
        s.stream_seed = rng.seed();
        s.iterations = result.iterations;
        s.evals = result.iterations * spec.evals_per_iteration;
        s.final_f = result.final_f;
        s.evals_to_target = result.evals_to_target;
        if (options.stride == 1) {
            s.cr = try_estimate(log_eta, c.burn_in);
        }
    });

    ExperimentOutcome outcome;
    {
        CsvFile summary(dir / "summary.csv", kSummaryHeader, c);
        write_summary(summary, rows);
    }
    std::vector<double> hits;
    for (std::size_t r = 0; r < c.replicates; ++r) {
        outcome.files.push_back(trace_path(dir, r));
        if (rows[r].evals_to_target) {
            hits.push_back(static_cast<double>(*rows[r].evals_to_target));
        }
    }
    outcome.files.push_back(dir / "summary.csv");
    std::ostringstream msg;
    msg << spec.name << " on " << c.objective << ": " << c.replicates << " replicate(s)";
    if (c.target_f) {
        msg << ", " << hits.size() << " reached f <= " << num(*c.target_f);
        if (!hits.empty()) {
            std::sort(hits.begin(), hits.end());
            const std::size_t k = hits.size();
            const double median = k % 2 ? hits[k / 2] : 0.5 * (hits[k / 2 - 1] + hits[k / 2]);
            msg << ", median evals-to-target " << num(median);
        }
        if (c.require_target && hits.size() < c.replicates) {
            outcome.exit_code = ExitCode::target_not_reached;
        }
    }
    outcome.message = msg.str();
    return outcome;
}

ExperimentOutcome run_chains(const RunConfig& c, const std::filesystem::path& dir) {
    const auto spec = algorithms::make_algorithm<double>(c.algorithm, c.n, c.algorithm_options);
    const auto f = objectives::make_objective<double>(c.objective, c.n);
    const chain::NormalizedState z0((c.start_point() - f.reference()) / c.sigma0);
    const std::size_t stride = c.resolved_stride();
    std::vector<ReplicateSummary> rows(c.replicates);
    parallel_replicates(c.replicates, [&](std::size_t r) {
        RngStream rng = RngStream::derive(*c.seed, r);
        CsvFile trace(trace_path(dir, r), kTraceHeader, c);
        std::vector<double> log_eta;
        log_eta.reserve(c.steps);
        double log_sigma = std::log(c.sigma0);
        auto emit = [&](std::size_t t, const Vector& z, double le) {
            const double zn = z.norm();
            chain::TrajectoryRecord rec;
            rec.t = t;
            rec.evals = t * spec.evals_per_iteration;
            rec.sigma = std::exp(log_sigma);
            rec.z_norm = zn;
            rec.x_norm = std::exp(log_sigma + std::log(zn));
            rec.log_eta = le;
            trace.record(rec);
        };
        emit(0, z0.z, 0.0);
        chain::for_each_chain_step(z0, spec, f, c.steps, rng, [&](std::size_t t, const chain::StepOutcome& o) {
            log_eta.push_back(o.log_eta);
            log_sigma += o.log_eta;
            if ((t + 1) % stride == 0 || t + 1 == c.steps) {
                emit(t + 1, o.z_next.z, o.log_eta);
            }
        });
        auto& s = rows[r];
        s.stream_seed = rng.seed();
        s.iterations = c.steps;
        s.evals = c.steps * spec.evals_per_iteration;
        s.cr = try_estimate(log_eta, c.burn_in);
    });

    ExperimentOutcome outcome;
    {
        CsvFile summary(dir / "summary.csv", kSummaryHeader, c);
        write_summary(summary, rows);
    }
    std::ostringstream msg;
    msg << spec.name << " normalized chain on " << c.objective << ", " << c.steps << " steps:";
    for (std::size_t r = 0; r < c.replicates; ++r) {
        outcome.files.push_back(trace_path(dir, r));
        if (rows[r].cr) {
            msg << " CR=" << num(rows[r].cr->cr) << " +- " << num(rows[r].cr->half_width);
        } else {
            msg << " CR=(insufficient data)";
        }
    }
    outcome.files.push_back(dir / "summary.csv");
    outcome.message = msg.str();
    return outcome;
}

ExperimentOutcome run_invariance_suite(const RunConfig& c, const std::filesystem::path& dir) {
    std::vector<invariance::SuiteCase> cases;
    for (const auto& k : invariance::standard_suite()) {
        if ((c.algorithm == "all" || k.algorithm == c.algorithm) && (c.objective == "all" || k.objective == c.objective)) {
            cases.push_back(k);
        }
    }
    if (cases.empty()) {
        // Not in the standard grid: run the same battery on the requested pair.
        for (const char* g : {"identity", "g^{1/4}", "arctan"}) {
            using Kind = invariance::SuiteCase::Kind;
            cases.push_back({c.algorithm, c.objective, g, Kind::monotone});
            cases.push_back({c.algorithm, c.objective, g, Kind::translation, 1.0, 1.0});
            for (const double alpha : {0.0625, 3.0, 1024.0}) {
                cases.push_back({c.algorithm, c.objective, g, Kind::scale, alpha});
            }
        }
    }
    const invariance::PairedRunSetup setup{AlgorithmState(c.start_point(), c.sigma0), *c.seed, c.horizon};
    const auto results = invariance::run_suite(cases, c.n, setup);

    ExperimentOutcome outcome;
    std::size_t failed = 0;
    {
        CsvFile summary(dir / "summary.csv",
                        "case,pass,max_x_deviation,max_sigma_deviation,tolerance,digits,first_divergence_t,detail", c);
        for (const auto& r : results) {
            failed += r.report.pass() ? 0 : 1;
            std::string detail = r.report.pass() ? std::string() : r.report.describe();
            std::replace(detail.begin(), detail.end(), ',', ' ');
            std::string label = r.which.label();
            std::replace(label.begin(), label.end(), ',', ' ');
            summary.row({label, r.report.pass() ? "true" : "false", num(r.report.max_x_deviation),
                         num(r.report.max_sigma_deviation), num(r.report.tolerance), std::to_string(r.digits),
                         r.report.fail_t ? std::to_string(*r.report.fail_t) : std::string(), detail});
        }
    }
    outcome.files.push_back(dir / "summary.csv");
    outcome.message = std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) +
                      " invariance pairs passed";
    if (failed > 0) {
        outcome.exit_code = ExitCode::invariant_violation;
    }
    return outcome;
}

std::string join(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += (i ? " " : "") + num(v(i));
    }
    return out;
}

ExperimentOutcome run_si_check(const RunConfig& c, const std::filesystem::path& dir) {
    const auto f = objectives::make_objective<double>(c.objective, c.n);
    std::vector<objectives::InvarianceReport> reports(c.replicates);
    std::vector<std::uint64_t> seeds(c.replicates);
    parallel_replicates(c.replicates, [&](std::size_t r) {
        RngStream rng = RngStream::derive(*c.seed, r);
        seeds[r] = rng.seed();
        reports[r] = objectives::check_scaling_invariance(f, c.trials, objectives::default_rho_grid(), rng);
    });
    ExperimentOutcome outcome;
    std::size_t refuted = 0;
    {
        CsvFile summary(dir / "summary.csv", "replicate,stream_seed,verdict,trials_used,witness_x,witness_y,witness_rho",
                        c);
        for (std::size_t r = 0; r < c.replicates; ++r) {
            const auto& rep = reports[r];
            refuted += rep.consistent() ? 0 : 1;
            summary.row({std::to_string(r), std::to_string(seeds[r]), rep.consistent() ? "consistent" : "refuted",
                         std::to_string(rep.trials), rep.witness ? join(rep.witness->x) : std::string(),
                         rep.witness ? join(rep.witness->y) : std::string(),
                         rep.witness ? num(rep.witness->rho) : std::string()});
        }
    }
    outcome.files.push_back(dir / "summary.csv");
    outcome.message = c.objective + ": refuted in " + std::to_string(refuted) + " of " +
                      std::to_string(c.replicates) + " replicate(s)";
    return outcome;
}

}  // namespace

ExperimentOutcome run_experiment(const RunConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    try {
        switch (config.mode) {
            case Mode::trajectory:
                return run_trajectories(config, out_dir,
                                        algorithms::make_algorithm<double>(config.algorithm, config.n,
                                                                           config.algorithm_options));
            case Mode::constant_sigma: {
                RunConfig c = config;
                if (!c.target_f) {
                    c.target_f = 1e-6;
                }
                return run_trajectories(c, out_dir, algorithms::make_algorithm<double>("constant", c.n));
            }
            case Mode::normalized_chain:
            case Mode::cr_estimate:
                return run_chains(config, out_dir);
            case Mode::invariance_suite:
                return run_invariance_suite(config, out_dir);
            case Mode::si_check:
                return run_si_check(config, out_dir);
        }
    } catch (const InvariantViolation& e) {
        ExperimentOutcome outcome;
        outcome.exit_code = ExitCode::invariant_violation;
        outcome.message = e.what();
        return outcome;
    }
    throw ConfigError("mode", 0, "unhandled mode");
}

}  // namespace cbsars::cli
