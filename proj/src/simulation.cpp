#include "fheston/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "fheston/error.hpp"
#include "fheston/pricing.hpp"
#include "fheston/simd/kernels.hpp"
#include "numerics_detail.hpp"

namespace fheston {

namespace {

constexpr std::size_t kBlockPaths = 512;

// Welford accumulator; merge() is Chan's pairwise update.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.n) / total;
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }
};

McEstimate to_estimate(const Moments& m, std::uint64_t seed) {
    const double var = m.n > 1 ? m.m2 / static_cast<double>(m.n - 1) : 0.0;
    return {m.mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(m.n)), m.n, seed};
}

// Runs fn(first_path, count, out) over fixed blocks of paths and merges the
// per-block moments in block order, so the result is independent of how
// blocks are spread over threads.
template <class BlockFn>
std::vector<Moments> run_blocks(std::size_t n_paths, unsigned workers, std::size_t n_outputs, BlockFn&& fn) {
    const std::size_t n_blocks = (n_paths + kBlockPaths - 1) / kBlockPaths;
    std::vector<std::vector<Moments>> per_block(n_blocks, std::vector<Moments>(n_outputs));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::size_t first = b * kBlockPaths;
            try {
                fn(first, std::min(kBlockPaths, n_paths - first), per_block[b]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_blocks);
                return;
            }
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_blocks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Moments> total(n_outputs);
    for (const auto& block : per_block) {
        for (std::size_t j = 0; j < n_outputs; ++j) total[j].merge(block[j]);
    }
    return total;
}

simd::CirStep euler_step(const ModelParams& p, double dt, double weight) {
    return {p.kappa() * dt, p.kappa() * p.theta() * dt, p.xi(), weight};
}

double cir_exact_step(const ModelParams& p, double v, double dt, PathRng& rng) {
    const double kappa = p.kappa();
    const double theta = p.theta();
    const double xi = p.xi();
    const double decay = std::exp(-kappa * dt);
    if (xi == 0.0) return theta + (v - theta) * decay;
    const double c = kappa > 0.0 ? -xi * xi * std::expm1(-kappa * dt) / (4.0 * kappa) : 0.25 * xi * xi * dt;
    const double dof = 4.0 * kappa * theta / (xi * xi);
    const double noncentrality = v * decay / c;
    long jumps = 0;
    if (noncentrality > 0.0) jumps = std::poisson_distribution<long>(0.5 * noncentrality)(rng);
    const double shape = 0.5 * dof + static_cast<double>(jumps);
    if (shape <= 0.0) return 0.0;
    return c * std::gamma_distribution<double>(shape, 2.0)(rng);
}

// Simulates paths [first, first + count) and returns, per path, the terminal
// truncated variance and sum_k weights[k] * V_k.
struct BlockResult {
    std::vector<double> terminal;
    std::vector<double> integral;
};

BlockResult simulate_block(const ModelParams& p, const TimeGrid& grid, std::span<const double> weights,
                           const McConfig& cfg, std::size_t first, std::size_t count) {
    const std::size_t steps = grid.size() - 1;
    BlockResult out{std::vector<double>(count, p.v0()), std::vector<double>(count, 0.0)};
    std::vector<PathRng> rngs;
    rngs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) rngs.emplace_back(cfg.seed, first + i);

    if (cfg.scheme == Scheme::full_truncation) {
        std::vector<double> dw(count);
        for (std::size_t k = 0; k < steps; ++k) {
            const double dt = grid[k + 1] - grid[k];
            const double sqrt_dt = std::sqrt(dt);
            for (std::size_t i = 0; i < count; ++i) dw[i] = sqrt_dt * rngs[i].normal();
            simd::cir_step_accumulate(out.terminal, out.integral, dw, euler_step(p, dt, weights[k]));
        }
        for (double& v : out.terminal) v = v > 0.0 ? v : 0.0;
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            double v = p.v0();
            double acc = 0.0;
            for (std::size_t k = 0; k < steps; ++k) {
                acc = acc + weights[k] * v;
                v = cir_exact_step(p, v, grid[k + 1] - grid[k], rngs[i]);
            }
            out.terminal[i] = v;
            out.integral[i] = acc;
        }
    }
    return out;
}

void require_positive_time(double t) {
    if (!std::isfinite(t)) throw Error(ErrorKind::NonFinite, "t");
    if (t <= 0.0) throw Error(ErrorKind::OutOfRange, "t");
}

}  // namespace

void validate_config(const McConfig& cfg) {
    if (cfg.n_paths < 2) throw Error(ErrorKind::OutOfRange, "paths");
    if (cfg.steps_per_unit_time < 1) throw Error(ErrorKind::OutOfRange, "steps");
}

TimeGrid mc_grid(double t, std::size_t steps_per_unit_time) {
    require_positive_time(t);
    const double raw = std::ceil(t * static_cast<double>(steps_per_unit_time) - 1e-9);
    return TimeGrid::uniform(t, static_cast<std::size_t>(std::max(1.0, raw)));
}

VariancePath simulate_cir_path(const ModelParams& p, const TimeGrid& grid, PathRng& rng, Scheme scheme) {
    if (grid.size() == 0) throw Error(ErrorKind::GridMismatch, "empty grid");
    std::vector<double> values(grid.size());
    values[0] = p.v0();
    double s = p.v0();
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double dt = grid[k + 1] - grid[k];
        if (scheme == Scheme::full_truncation) {
            const simd::CirStep step = euler_step(p, dt, 0.0);
            const double dw = std::sqrt(dt) * rng.normal();
            const double vp = s > 0.0 ? s : 0.0;
            s = s + (step.kappa_theta_dt - step.kappa_dt * vp) + step.xi * std::sqrt(vp) * dw;
            values[k + 1] = s > 0.0 ? s : 0.0;
        } else {
            s = cir_exact_step(p, s, dt, rng);
            values[k + 1] = s;
        }
    }
    return {grid, std::move(values)};
}

std::vector<double> product_integration_weights(const TimeGrid& grid, double d) {
    if (grid.size() < 2) return {};
    const double t = grid.back();
    const double inv_gamma = 1.0 / gamma_fn(d + 2.0);
    std::vector<double> w(grid.size() - 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double left = std::pow(t - grid[k], d + 1.0);
        const double right = k + 2 == grid.size() ? 0.0 : std::pow(t - grid[k + 1], d + 1.0);
        w[k] = (left - right) * inv_gamma;
    }
    return w;
}

double integrated_frac_variance(const VariancePath& path, double d, double eta, double t) {
    if (path.grid.size() == 0 || t != path.grid.back()) throw Error(ErrorKind::GridMismatch, "t is not the last node");
    if (path.values.size() != path.grid.size()) throw Error(ErrorKind::GridMismatch, "values and grid differ in size");
    const auto w = product_integration_weights(path.grid, d);
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc = acc + w[k] * path.values[k];
    return eta * t + acc;
}

double expected_integrated_frac_variance(const ModelParams& p, double t) {
    require_positive_time(t);
    const double d = p.d();
    const double stationary = p.theta() * std::pow(t, d + 1.0) / (d + 1.0);
    const double transient = (p.v0() - p.theta()) * detail::kernel_exp_integral(d, p.kappa(), t);
    return p.eta() * t + (stationary + transient) / gamma_fn(d + 1.0);
}

std::vector<McEstimate> mc_call_prices(const ModelParams& p, std::span<const double> xs, double t,
                                       const McConfig& cfg) {
    validate_config(cfg);
    for (double x : xs) {
        if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "x");
    }
    const TimeGrid grid = mc_grid(t, cfg.steps_per_unit_time);
    const auto weights = product_integration_weights(grid, p.d());
    const double eta_t = p.eta() * t;
    const auto moments = run_blocks(cfg.n_paths, cfg.workers, xs.size(),
                                    [&](std::size_t first, std::size_t count, std::vector<Moments>& out) {
                                        const BlockResult r = simulate_block(p, grid, weights, cfg, first, count);
                                        for (std::size_t i = 0; i < count; ++i) {
                                            const double sigma = std::sqrt(eta_t + r.integral[i]);
                                            for (std::size_t j = 0; j < xs.size(); ++j) {
                                                out[j].add(bs_call_price(xs[j], 1.0, sigma));
                                            }
                                        }
                                    });
    std::vector<McEstimate> est;
    est.reserve(moments.size());
    for (const auto& m : moments) est.push_back(to_estimate(m, cfg.seed));
    return est;
}

McEstimate mc_call_price(const ModelParams& p, double x, double t, const McConfig& cfg) {
    const double xs[] = {x};
    return mc_call_prices(p, xs, t, cfg).front();
}

McEstimate mc_call_price_euler(const ModelParams& p, double x, double t, const McConfig& cfg) {
    validate_config(cfg);
    if (p.d() != 0.0) throw Error(ErrorKind::OutOfRange, "d");
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "x");
    const TimeGrid grid = mc_grid(t, cfg.steps_per_unit_time);
    const double strike = std::exp(x);
    const auto moments = run_blocks(cfg.n_paths, cfg.workers, 1,
                                    [&](std::size_t first, std::size_t count, std::vector<Moments>& out) {
                                        for (std::size_t i = 0; i < count; ++i) {
                                            PathRng rng(cfg.seed, first + i);
                                            double s = p.v0();
                                            double log_spot = 0.0;
                                            for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
                                                const double dt = grid[k + 1] - grid[k];
                                                const double zw = rng.normal();
                                                const double zb = rng.normal();
                                                const double vp = s > 0.0 ? s : 0.0;
                                                const double vd = p.eta() + vp;
                                                log_spot += -0.5 * vd * dt + std::sqrt(vd * dt) * zb;
                                                s = s + p.kappa() * (p.theta() - vp) * dt +
                                                    p.xi() * std::sqrt(vp * dt) * zw;
                                            }
                                            out[0].add(std::max(std::exp(log_spot) - strike, 0.0));
                                        }
                                    });
    return to_estimate(moments.front(), cfg.seed);
}

McEstimate mean_Vd_mc(const ModelParams& p, double t, const McConfig& cfg) {
    validate_config(cfg);
    const TimeGrid grid = mc_grid(t, cfg.steps_per_unit_time);
    const double d = p.d();
    std::vector<double> weights(grid.size() - 1, 0.0);
    if (d > 0.0) {
        const double inv_gamma = 1.0 / gamma_fn(d + 1.0);
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            const double right = k + 2 == grid.size() ? 0.0 : std::pow(t - grid[k + 1], d);
            weights[k] = (std::pow(t - grid[k], d) - right) * inv_gamma;
        }
    } else if (d < 0.0) {
        weights = product_integration_weights(grid, d);
    }
    const auto moments = run_blocks(cfg.n_paths, cfg.workers, 1,
                                    [&](std::size_t first, std::size_t count, std::vector<Moments>& out) {
                                        const BlockResult r = simulate_block(p, grid, weights, cfg, first, count);
                                        for (std::size_t i = 0; i < count; ++i) {
                                            double value;
                                            if (d > 0.0) {
                                                value = p.eta() + r.integral[i];
                                            } else if (d == 0.0) {
                                                value = p.eta() + r.terminal[i];
                                            } else {
                                                value = p.eta() + r.integral[i] / t;
                                            }
                                            out[0].add(value);
                                        }
                                    });
    return to_estimate(moments.front(), cfg.seed);
}

double mean_Vd_time_average(const ModelParams& p, double t) { return expected_integrated_frac_variance(p, t) / t; }

double cir_mean(const ModelParams& p, double t) { return p.theta() + (p.v0() - p.theta()) * std::exp(-p.kappa() * t); }

double cov_V_stationary(const ModelParams& p, double h) {
    if (p.kappa() == 0.0) throw Error(ErrorKind::OutOfRange, "kappa");
    if (!std::isfinite(h)) throw Error(ErrorKind::NonFinite, "h");
    return p.xi() * p.xi() * p.theta() * std::exp(-p.kappa() * std::abs(h)) / (2.0 * p.kappa());
}

}  // namespace fheston
