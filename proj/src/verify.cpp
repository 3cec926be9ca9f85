#include "fheston/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fheston/asymptotics.hpp"
#include "fheston/cgf_engine.hpp"
#include "fheston/error.hpp"
#include "fheston/pricing.hpp"
#include "fheston/simulation.hpp"

namespace fheston {

namespace {

std::string label(std::string_view what, std::initializer_list<std::pair<std::string_view, double>> args) {
    std::ostringstream out;
    out << what;
    for (const auto& [key, value] : args) out << ' ' << key << '=' << value;
    return out.str();
}

double rel_tol(double expected, double rel, double floor) { return std::max(rel * std::abs(expected), floor); }

ModelParams with(const RawParams& base, auto&& edit) {
    RawParams raw = base;
    edit(raw);
    return validate_params(raw);
}

std::vector<CheckRow> smalltime_suite(const ModelParams& p) {
    std::vector<CheckRow> rows;
    const double u = 1.0;
    const double limit = small_time_cgf_limit(p, u);
    double prev_gap = std::abs(limit);
    const double ts[] = {1e-1, 1e-2, 1e-3, 1e-4};
    for (double t : ts) {
        const double observed = scaled_small_time_cgf(p, u, t);
        const double tol = t == ts[3] ? std::min(prev_gap, 0.01 * std::abs(limit)) : prev_gap;
        rows.push_back(make_check(label("scaled_cgf", {{"u", u}, {"t", t}}), limit, observed, tol));
        prev_gap = std::abs(observed - limit);
    }
    return rows;
}

std::vector<CheckRow> largetime_suite(const ModelParams& p) {
    std::vector<CheckRow> rows;
    const double t = 200.0;
    if (p.d() > 0.0) {
        for (double u : {0.25, 0.5, 0.75}) {
            const double observed = scaled_large_time_cgf(p, u, t);
            const double limit = lambda_plus(u, p);
            rows.push_back(make_check(label("scaled_cgf", {{"u", u}, {"t", t}}), limit, observed,
                                      rel_tol(limit, 0.02, 1e-8)));
            const double rescaled = limit / (1.0 + 0.5 * p.d());
            rows.push_back(make_check(label("scaled_cgf_vs_rescaled_limit", {{"u", u}, {"t", t}}), rescaled, observed,
                                      rel_tol(rescaled, 0.02, 1e-8)));
        }
    } else {
        for (double u : {0.0, 0.5, 1.0}) {
            const double observed = scaled_large_time_cgf(p, u, t);
            const double limit = lambda_minus(u, p.eta());
            rows.push_back(make_check(label("scaled_cgf", {{"u", u}, {"t", t}}), limit, observed,
                                      rel_tol(limit, 0.02, 1e-8)));
        }
    }
    return rows;
}

std::vector<CheckRow> bounds_suite(const ModelParams& p) {
    std::vector<CheckRow> rows;
    const double horizon = 50.0;
    for (int i = 1; i <= 9; ++i) {
        const double u = 0.1 * i;
        const RiccatiSolution sol = riccati_solve(p, CgfQuery{u, {}, horizon});
        double violation = 0.0;
        for (std::size_t k = 1; k < sol.grid.size(); ++k) {
            const PsiBounds psi = bounds_psi(p, u, sol.grid[k]);
            const double b = sol.b[k].real();
            violation = std::max({violation, psi.minus - b, b - psi.plus});
        }
        if (sol.blow_up_time) violation = std::numeric_limits<double>::infinity();
        rows.push_back(make_check(label("psi_bounds_violation", {{"u", u}, {"t_max", horizon}}), 0.0, violation, 1e-9));
    }
    return rows;
}

std::vector<CheckRow> oracle_suite(const RawParams& base) {
    std::vector<CheckRow> rows;
    const ModelParams p = validate_params(base);
    for (double t : {0.1, 1.0, 10.0}) {
        const CgfResult r = cgf(p, CgfQuery{1.0, {}, t});
        rows.push_back(make_check(label("martingale", {{"t", t}}), 0.0, std::abs(r.value), 1e-8));
    }

    const ModelParams heston = with(base, [](RawParams& r) { r.kappa = 0.0; r.d = 0.0; r.eta = 0.0; });
    for (double u : {-1.0, 0.5, 2.0}) {
        for (double t : {0.25, 1.0}) {
            const double expected = heston_tan_mgf(heston.v0(), heston.xi(), u, t);
            const double observed = cgf(heston, CgfQuery{u, {}, t}).value.real();
            rows.push_back(make_check(label("tan_formula", {{"u", u}, {"t", t}}), expected, observed,
                                      rel_tol(expected, 1e-6, 1e-15)));
        }
    }

    const double t_series = 0.5;
    for (double d : {-0.3, 0.2}) {
        const ModelParams q = with(base, [d](RawParams& r) { r.kappa = 0.0; r.d = d; });
        for (double u : {-0.3, 0.5, 1.3}) {
            const double expected = series_B_kappa0(q, u, t_series);
            const double observed = riccati_solve(q, CgfQuery{u, {}, t_series}).b.back().real();
            rows.push_back(make_check(label("kappa0_series_B", {{"d", d}, {"u", u}, {"t", t_series}}), expected,
                                      observed, rel_tol(expected, 1e-6, 1e-15)));
        }
    }

    const ModelParams flat = with(base, [](RawParams& r) { r.kappa = 0.0; r.d = 0.0; });
    const auto coeffs = series_coefficients(flat, 0.5, 3);
    const double xi2 = flat.xi() * flat.xi();
    const double taylor[] = {0.5, xi2 / 24.0, xi2 * xi2 / 240.0};
    for (int i = 0; i < 3; ++i) {
        const double sign = i % 2 == 0 ? 1.0 : -1.0;
        const double observed = sign * coeffs.alpha[i] / std::pow(2.0, i + 1);
        rows.push_back(make_check(label("taylor_coefficient", {{"i", i + 1}}), taylor[i], observed,
                                  rel_tol(taylor[i], 1e-12, 1e-15)));
    }
    return rows;
}

std::vector<CheckRow> mc_suite(const ModelParams& p, const VerifyOptions& opts) {
    std::vector<CheckRow> rows;
    McConfig cfg;
    cfg.n_paths = opts.paths.value_or(50'000);
    cfg.steps_per_unit_time = opts.steps.value_or(200);
    cfg.seed = opts.seed;
    const double t = 1.0;
    const double xs[] = {-0.2, 0.0, 0.2};
    const auto mc = mc_call_prices(p, xs, t, cfg);
    FourierPricer pricer(p, t);
    for (std::size_t i = 0; i < 3; ++i) {
        rows.push_back(make_check(label("call_fourier_vs_mc", {{"x", xs[i]}, {"t", t}}), pricer.call_price(xs[i]),
                                  mc[i].mean, 3.0 * mc[i].std_error));
    }
    const McEstimate mean = mean_Vd_mc(p, t, cfg);
    const double expected = p.d() < 0.0 ? mean_Vd_time_average(p, t) : mean_Vd(p, t);
    rows.push_back(make_check(label(p.d() < 0.0 ? "time_average_Vd" : "mean_Vd", {{"t", t}}), expected, mean.mean,
                              3.0 * mean.std_error));
    return rows;
}

}  // namespace

Suite parse_suite(std::string_view name) {
    for (Suite s : {Suite::smalltime, Suite::largetime, Suite::bounds, Suite::oracle, Suite::mc}) {
        if (name == to_string(s)) return s;
    }
    throw Error(ErrorKind::OutOfRange, "suite");
}

std::string_view to_string(Suite suite) {
    switch (suite) {
        case Suite::smalltime: return "smalltime";
        case Suite::largetime: return "largetime";
        case Suite::bounds: return "bounds";
        case Suite::oracle: return "oracle";
        case Suite::mc: return "mc";
    }
    return "unknown";
}

CheckRow make_check(std::string name, double expected, double observed, double tolerance) {
    const bool pass = std::isfinite(observed) && std::abs(observed - expected) <= tolerance;
    return {std::move(name), expected, observed, tolerance, pass};
}

RawParams ParamOverrides::apply(RawParams base) const {
    if (kappa) base.kappa = *kappa;
    if (theta) base.theta = *theta;
    if (xi) base.xi = *xi;
    if (v0) base.v0 = *v0;
    if (eta) base.eta = *eta;
    if (d) base.d = *d;
    return base;
}

RawParams suite_defaults(Suite suite) {
    switch (suite) {
        case Suite::smalltime: return {0.0, 0.04, 0.2, 0.04, 0.0, -0.2};
        case Suite::largetime: return {1.0, 0.001, 0.3, 0.04, 0.04, -0.2};
        case Suite::bounds: return {1.0, 0.04, 0.5, 0.04, 0.01, 0.2};
        case Suite::oracle: return {1.0, 0.04, 0.5, 0.04, 0.01, 0.2};
        case Suite::mc: return {2.0, 0.04, 0.3, 0.04, 0.01, 0.2};
    }
    return {};
}

std::vector<CheckRow> run_suite(Suite suite, const VerifyOptions& opts) {
    const RawParams raw = opts.overrides.apply(suite_defaults(suite));
    const ModelParams p = validate_params(raw);
    switch (suite) {
        case Suite::smalltime: return smalltime_suite(p);
        case Suite::largetime: return largetime_suite(p);
        case Suite::bounds: return bounds_suite(p);
        case Suite::oracle: return oracle_suite(raw);
        case Suite::mc: return mc_suite(p, opts);
    }
    return {};
}

}  // namespace fheston
