#include "fheston/core_model.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

namespace fheston {

namespace {

void require_finite(double value, const char* field) {
    if (!std::isfinite(value)) throw Error(ErrorKind::NonFinite, field);
}

}  // namespace

ModelParams validate_params(const RawParams& raw) {
    require_finite(raw.kappa, "kappa");
    require_finite(raw.theta, "theta");
    require_finite(raw.xi, "xi");
    require_finite(raw.v0, "v0");
    require_finite(raw.eta, "eta");
    require_finite(raw.d, "d");

    if (raw.kappa < 0.0) throw Error(ErrorKind::OutOfRange, "kappa");
    if (raw.theta < 0.0) throw Error(ErrorKind::OutOfRange, "theta");
    if (raw.xi < 0.0) throw Error(ErrorKind::OutOfRange, "xi");
    if (raw.v0 <= 0.0) throw Error(ErrorKind::OutOfRange, "v0");
    if (raw.eta < 0.0) throw Error(ErrorKind::OutOfRange, "eta");
    if (raw.d < -0.5 || raw.d > 0.5) throw Error(ErrorKind::OutOfRange, "d");
    return ModelParams(raw);
}

RawParams params_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        throw Error(ErrorKind::OutOfRange, "json");
    }
    if (!doc.is_object()) throw Error(ErrorKind::OutOfRange, "json");

    RawParams raw;
    const std::array<std::pair<const char*, double*>, 6> fields{{
        {"kappa", &raw.kappa}, {"theta", &raw.theta}, {"xi", &raw.xi},
        {"v0", &raw.v0},       {"eta", &raw.eta},     {"d", &raw.d},
    }};
    for (const auto& [key, target] : fields) {
        auto it = doc.find(key);
        if (it == doc.end() || !it->is_number()) throw Error(ErrorKind::OutOfRange, key);
        *target = it->get<double>();
    }
    for (const auto& item : doc.items()) {
        bool known = false;
        for (const auto& [key, target] : fields) known = known || item.key() == key;
        if (!known) throw Error(ErrorKind::OutOfRange, item.key());
    }
    return raw;
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.empty() || nodes.front() != 0.0) throw Error(ErrorKind::OutOfRange, "grid: first node must be 0");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i])) throw Error(ErrorKind::NonFinite, "grid");
        if (i > 0 && !(nodes[i] > nodes[i - 1])) throw Error(ErrorKind::OutOfRange, "grid: nodes not increasing");
    }
    return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::uniform(double t, std::size_t steps) {
    if (!(t > 0.0) || steps == 0) throw Error(ErrorKind::OutOfRange, "grid");
    std::vector<double> nodes(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) nodes[i] = t * static_cast<double>(i) / static_cast<double>(steps);
    nodes.back() = t;
    return TimeGrid(std::move(nodes));
}

// Lanczos approximation with g = 7 and nine coefficients (the widely
// published set from Godfrey).
double gamma_fn(double x) {
    if (!(x > 0.0)) throw Error(ErrorKind::OutOfRange, "gamma argument must be positive");
    if (x < 0.5) return gamma_fn(x + 1.0) / x;

    static constexpr std::array<double, 9> coeff{
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
    };
    constexpr double g = 7.0;

    const double z = x - 1.0;
    double series = coeff[0];
    for (std::size_t i = 1; i < coeff.size(); ++i) series += coeff[i] / (z + static_cast<double>(i));
    const double tmp = z + g + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(tmp, z + 0.5) * std::exp(-tmp) * series;
}

double reciprocal_gamma(double x) {
    if (!(x > -1.0)) throw Error(ErrorKind::OutOfRange, "reciprocal_gamma argument must exceed -1");
    if (x == 0.0) return 0.0;
    if (x > 0.0) return 1.0 / gamma_fn(x);
    return x / gamma_fn(x + 1.0);
}

double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace fheston
