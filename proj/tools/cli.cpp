#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fheston/asymptotics.hpp"
#include "fheston/cgf_engine.hpp"
#include "fheston/core_model.hpp"
#include "fheston/error.hpp"
#include "fheston/pricing.hpp"
#include "fheston/simulation.hpp"
#include "fheston/verify.hpp"

namespace fheston::cli {

namespace {

using Cell = std::variant<double, std::string, long long, bool>;

// Column layout of every verb. Changing these breaks downstream parsers.
const std::vector<std::string> kCgfColumns = {"u", "w", "t", "value", "status"};
const std::vector<std::string> kPriceColumns = {"x", "t", "price", "implied_vol"};
const std::vector<std::string> kSmileColumns = {"x", "t", "implied_vol", "source"};
const std::vector<std::string> kAsymptoteColumns = {"x", "payoff", "asymptote"};
const std::vector<std::string> kSimulateColumns = {"x", "t", "price", "std_error", "implied_vol", "n_paths", "seed"};
const std::vector<std::string> kRatefnColumns = {"x", "rate", "branch"};
const std::vector<std::string> kVerifyColumns = {"name", "expected", "observed", "tolerance", "pass"};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string quoted = "\"";
            for (char ch : s) {
                if (ch == '"') quoted += '"';
                quoted += ch;
            }
            return quoted + '"';
        }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
    struct Visitor {
        nlohmann::ordered_json operator()(double v) const {
            return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
        }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(long long v) const { return v; }
        nlohmann::ordered_json operator()(bool v) const { return v; }
    };
    return std::visit(Visitor{}, c);
}

void write_table(const Table& table, const std::string& format, std::ostream& out) {
    if (format == "json") {
        auto array = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json obj;
            for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
            array.push_back(std::move(obj));
        }
        out << array.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

void write_error(std::ostream& err, const std::string& kind, const std::string& detail) {
    nlohmann::ordered_json obj;
    obj["error"] = kind + ": " + detail;
    obj["kind"] = kind;
    obj["detail"] = detail;
    err << obj.dump() << '\n';
}

struct ModelFlags {
    RawParams values{1.0, 0.04, 0.2, 0.04, 0.01, 0.2};
    std::vector<std::pair<CLI::Option*, std::size_t>> options;  // flag, field index
    std::string config;

    void attach(CLI::App& app) {
        const char* flags[] = {"--kappa", "--theta", "--xi", "--v0", "--eta", "--d"};
        double* fields[] = {&values.kappa, &values.theta, &values.xi, &values.v0, &values.eta, &values.d};
        for (std::size_t i = 0; i < 6; ++i) {
            options.emplace_back(app.add_option(flags[i], *fields[i])->capture_default_str(), i);
        }
        app.add_option("--config", config, "JSON file with kappa, theta, xi, v0, eta, d; flags override it");
    }

    // Model parameters from (in increasing priority) base, the config file, explicit flags.
    RawParams resolve(RawParams base) const {
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) throw Error(ErrorKind::OutOfRange, "config");
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            base = params_from_json(text);
        }
        RawParams out = base;
        double* dst[] = {&out.kappa, &out.theta, &out.xi, &out.v0, &out.eta, &out.d};
        const double* src[] = {&values.kappa, &values.theta, &values.xi, &values.v0, &values.eta, &values.d};
        for (const auto& [option, field] : options) {
            if (option->count() > 0) *dst[field] = *src[field];
        }
        return out;
    }
};

struct Ladder {
    double x_min = -0.2;
    double x_max = 0.2;
    int x_steps = 9;

    void attach(CLI::App& app) {
        app.add_option("--x-min", x_min)->capture_default_str();
        app.add_option("--x-max", x_max)->capture_default_str();
        app.add_option("--x-steps", x_steps, "number of strikes")->capture_default_str();
    }

    std::vector<double> points() const {
        if (!std::isfinite(x_min) || !std::isfinite(x_max)) throw Error(ErrorKind::NonFinite, "x");
        if (x_steps < 1) throw Error(ErrorKind::OutOfRange, "x-steps");
        if (x_steps == 1) return {x_min};
        if (!(x_max > x_min)) throw Error(ErrorKind::OutOfRange, "x-max");
        std::vector<double> xs(static_cast<std::size_t>(x_steps));
        for (int i = 0; i < x_steps; ++i) xs[static_cast<std::size_t>(i)] = x_min + (x_max - x_min) * i / (x_steps - 1);
        return xs;
    }
};

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, name);
}

void require_positive(double v, const char* name) {
    require_finite(v, name);
    if (!(v > 0.0)) throw Error(ErrorKind::OutOfRange, name);
}

std::string_view status_name(CgfStatus s) {
    switch (s) {
        case CgfStatus::converged: return "converged";
        case CgfStatus::blew_up: return "blew_up";
        case CgfStatus::outside_domain: return "outside_domain";
    }
    return "unknown";
}

std::string_view payoff_name(PayoffKind k) {
    switch (k) {
        case PayoffKind::put: return "put";
        case PayoffKind::call: return "call";
        case PayoffKind::covered_call: return "covered_call";
    }
    return "unknown";
}

// Implied vol of a model call price, NaN when the price sits on a no-arbitrage bound.
double call_implied_vol(double x, double t, double call) {
    try {
        return implied_vol(OptionQuote{x, t, call}, OptionKind::call);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoSolution) return std::numeric_limits<double>::quiet_NaN();
        throw;
    }
}

MomentDomain domain_for(const ModelParams& p) { return p.d() < 0.0 ? moment_domain_estimate(p) : MomentDomain{}; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Option pricing, smiles and asymptotics for the uncorrelated fractional Heston model", "fheston"};
    app.require_subcommand(1);

    std::string format = "csv";
    const auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    };

    ModelFlags model;
    double u = 1.0, w = 0.0, x = 0.0, t = 1.0;
    double tol = 0.0;
    double damping = 0.5;
    std::uint64_t seed = 1;
    std::size_t paths = 100'000;
    std::size_t steps = 400;
    unsigned workers = 0;
    std::string scheme = "full_truncation";
    std::string regime = "small";
    std::string suite;
    std::vector<double> xs{0.0};
    Ladder ladder;

    auto* cgf_cmd = app.add_subcommand("cgf", "m(u, w, t) = log E exp(u X_t + w V^d_t)");
    auto* price_cmd = app.add_subcommand("price", "Fourier call price and implied volatility");
    auto* smile_cmd = app.add_subcommand("smile", "Fourier smile next to its asymptotic approximation");
    auto* asym_cmd = app.add_subcommand("asymptote", "large-maturity exponential decay of option prices");
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo call prices");
    auto* rate_cmd = app.add_subcommand("ratefn", "large-maturity rate function");
    auto* verify_cmd = app.add_subcommand("verify", "self-checks against closed forms and limit theorems");

    for (auto* sub : {cgf_cmd, price_cmd, smile_cmd, asym_cmd, sim_cmd, rate_cmd, verify_cmd}) {
        model.attach(*sub);
        add_format(sub);
    }

    cgf_cmd->add_option("--u", u)->capture_default_str();
    cgf_cmd->add_option("--w", w)->capture_default_str();
    cgf_cmd->add_option("--t", t)->capture_default_str();
    cgf_cmd->add_option("--tol", tol, "ODE tolerance (default 1e-10)");

    price_cmd->add_option("--x", x, "log-strike")->capture_default_str();
    price_cmd->add_option("--t", t)->capture_default_str();
    price_cmd->add_option("--damping", damping)->capture_default_str();
    price_cmd->add_option("--tol", tol, "quadrature tolerance (default 1e-10)");

    smile_cmd->add_option("--t", t)->capture_default_str();
    smile_cmd->add_option("--damping", damping)->capture_default_str();
    smile_cmd->add_option("--tol", tol, "quadrature tolerance (default 1e-10)");
    smile_cmd->add_option("--regime", regime)->check(CLI::IsMember({"small", "large"}))->capture_default_str();
    smile_cmd->add_option("--paths", paths, "Monte Carlo paths; 0 skips the mc rows")->default_val(0);
    smile_cmd->add_option("--steps", steps)->capture_default_str();
    smile_cmd->add_option("--seed", seed)->capture_default_str();
    ladder.attach(*smile_cmd);

    ladder.attach(*asym_cmd);
    ladder.attach(*rate_cmd);

    sim_cmd->add_option("--x", xs, "log-strike (repeatable)")->capture_default_str();
    sim_cmd->add_option("--t", t)->capture_default_str();
    sim_cmd->add_option("--paths", paths)->capture_default_str();
    sim_cmd->add_option("--steps", steps, "steps per unit time")->capture_default_str();
    sim_cmd->add_option("--seed", seed)->capture_default_str();
    sim_cmd->add_option("--scheme", scheme)
        ->check(CLI::IsMember({"full_truncation", "exact_transition"}))
        ->capture_default_str();
    sim_cmd->add_option("--workers", workers, "threads; 0 uses every core")->capture_default_str();

    auto* paths_opt = verify_cmd->add_option("--paths", paths);
    auto* steps_opt = verify_cmd->add_option("--steps", steps);
    verify_cmd->add_option("--seed", seed)->capture_default_str();
    verify_cmd->add_option("--suite", suite, "smalltime | largetime | bounds | oracle | mc")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        write_error(err, "OutOfRange", e.what());
        return 2;
    }

    try {
        Table table;
        int status = 0;

        if (verify_cmd->parsed()) {
            const Suite s = parse_suite(suite);
            VerifyOptions opts;
            const RawParams base = model.resolve(suite_defaults(s));
            opts.overrides = {base.kappa, base.theta, base.xi, base.v0, base.eta, base.d};
            opts.seed = seed;
            if (paths_opt->count() > 0) opts.paths = paths;
            if (steps_opt->count() > 0) opts.steps = steps;
            table.columns = kVerifyColumns;
            for (const CheckRow& row : run_suite(s, opts)) {
                table.rows.push_back({row.name, row.expected, row.observed, row.tolerance, row.pass});
                if (!row.pass) status = 1;
            }
            write_table(table, format, out);
            return status;
        }

        const ModelParams p = validate_params(model.resolve(model.values));
        FourierOptions fopts;
        fopts.damping = damping;
        if (tol != 0.0) fopts.quad_tol = tol;
        if (!(damping > 0.0 && damping < 1.0)) throw Error(ErrorKind::OutOfRange, "damping");
        if (!(fopts.quad_tol > 0.0)) throw Error(ErrorKind::OutOfRange, "tol");

        if (cgf_cmd->parsed()) {
            require_finite(u, "u");
            require_finite(w, "w");
            require_positive(t, "t");
            const CgfResult r = cgf(p, CgfQuery{u, w, t}, tol != 0.0 ? tol : 1e-10);
            table.columns = kCgfColumns;
            table.rows.push_back({u, w, t, r.value.real(), std::string(status_name(r.status))});
            write_table(table, format, out);
            if (r.status != CgfStatus::converged) {
                write_error(err, "OutsideDomain", "cgf " + std::string(status_name(r.status)));
                return 1;
            }
            return 0;
        }

        if (price_cmd->parsed()) {
            require_finite(x, "x");
            require_positive(t, "t");
            FourierPricer pricer(p, t, fopts);
            const double call = pricer.call_price(x);
            table.columns = kPriceColumns;
            table.rows.push_back({x, t, call, call_implied_vol(x, t, call)});
        } else if (smile_cmd->parsed()) {
            require_positive(t, "t");
            const auto grid = ladder.points();
            const MomentDomain domain = regime == "large" ? domain_for(p) : MomentDomain{};
            std::vector<SmilePoint> asymptotic;
            for (double xi : grid) {
                if (regime == "small") {
                    if (xi != 0.0) asymptotic.push_back(smile_small_time(p, xi, t));
                } else {
                    asymptotic.push_back(smile_large_time(p, xi, t, domain.u_minus, domain.u_plus));
                }
            }
            std::vector<double> strikes;
            if (regime == "small") {
                strikes = grid;
            } else {
                for (const auto& a : asymptotic) strikes.push_back(a.log_strike);
            }
            FourierPricer pricer(p, t, fopts);
            table.columns = kSmileColumns;
            for (double k : strikes) {
                table.rows.push_back({k, t, call_implied_vol(k, t, pricer.call_price(k)),
                                      std::string(to_string(SmileSource::fourier))});
            }
            for (const auto& a : asymptotic) {
                table.rows.push_back({a.log_strike, t, a.implied_vol, std::string(to_string(a.source))});
            }
            if (paths > 0) {
                McConfig cfg{paths, steps, seed, Scheme::full_truncation, 0};
                const auto mc = mc_call_prices(p, strikes, t, cfg);
                for (std::size_t i = 0; i < strikes.size(); ++i) {
                    table.rows.push_back({strikes[i], t, call_implied_vol(strikes[i], t, mc[i].mean),
                                          std::string(to_string(SmileSource::mc))});
                }
            }
        } else if (asym_cmd->parsed()) {
            const LargeTimeRate rate = large_time_rate(p, domain_for(p));
            table.columns = kAsymptoteColumns;
            for (double xi : ladder.points()) {
                for (PayoffKind kind : {PayoffKind::put, PayoffKind::call, PayoffKind::covered_call}) {
                    table.rows.push_back({xi, std::string(payoff_name(kind)), option_asymptote_large_time(xi, kind, rate)});
                }
            }
        } else if (sim_cmd->parsed()) {
            require_positive(t, "t");
            McConfig cfg{paths, steps, seed,
                         scheme == "exact_transition" ? Scheme::exact_transition : Scheme::full_truncation, workers};
            const auto est = mc_call_prices(p, xs, t, cfg);
            table.columns = kSimulateColumns;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                table.rows.push_back({xs[i], t, est[i].mean, est[i].std_error,
                                      call_implied_vol(xs[i], t, est[i].mean),
                                      static_cast<long long>(est[i].n_paths), static_cast<long long>(est[i].seed)});
            }
        } else if (rate_cmd->parsed()) {
            table.columns = kRatefnColumns;
            const auto grid = ladder.points();
            if (p.d() > 0.0) {
                for (double xi : grid) {
                    table.rows.push_back({xi, rate_plus_star(xi, p), std::string(to_string(RateBranch::interior))});
                }
            } else if (p.d() < 0.0) {
                const MomentDomain domain = moment_domain_estimate(p);
                for (double xi : grid) {
                    const RateFunctionEval r = rate_minus_star(xi, p.eta(), domain.u_minus, domain.u_plus);
                    table.rows.push_back({xi, r.value, std::string(to_string(r.branch))});
                }
            } else {
                throw Error(ErrorKind::OutOfRange, "d");
            }
        }
        write_table(table, format, out);
        return status;
    } catch (const Error& e) {
        write_error(err, std::string(to_string(e.kind())), e.detail());
        return is_validation_error(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        write_error(err, "Internal", e.what());
        return 1;
    }
}

}  // namespace fheston::cli
