#include "pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "linalg.hpp"

namespace pursuit {

namespace {

bool logging_enabled() {
    static const bool on = [] {
        const char* v = std::getenv("PURSUIT_LOG");
        return v != nullptr && v[0] != '\0' && v[0] != '0';
    }();
    return on;
}

void warn(const std::string& msg) {
    if (logging_enabled()) std::fprintf(stderr, "[pursuit] %s\n", msg.c_str());
}

Dataset resample(const Dataset& data, std::size_t count, Rng& rng) {
    Dataset out(count, data.dim());
    for (std::size_t i = 0; i < count; ++i) {
        const auto src = data.row(rng.uniform_below(data.rows()));
        auto dst = out.mutable_row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

}  // namespace

void PursuitConfig::validate() const {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (n_init < 1) throw std::invalid_argument("n_init must be >= 1");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(eta1 > 0.0)) throw std::invalid_argument("eta1 must be positive");
    if (!(eta2 > 0.0)) throw std::invalid_argument("eta2 must be positive");
}

PursuitConfig default_recipe(std::size_t d, double p, indices::IndexKind phi,
                             std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("d must be >= 2");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
    PursuitConfig cfg;
    cfg.steps = static_cast<std::size_t>(std::ceil(2.0 * std::log2(static_cast<double>(d))));
    cfg.eta1 = phi == indices::IndexKind::Kurtosis ? static_cast<double>(d) * p * p
                                                   : std::sqrt(static_cast<double>(d)) * p;
    cfg.eta2 = 0.5;
    cfg.n_init = static_cast<std::size_t>(std::ceil(1.0 / p));
    cfg.pair = indices::default_pair(phi);
    cfg.seed = seed;
    return cfg;
}

void fit_budget(PursuitConfig& cfg, std::size_t total_rows) {
    cfg.n_init = std::min(cfg.n_init, total_rows);
    const std::size_t slots = 2 * cfg.steps + 1;
    const std::size_t spare = total_rows > cfg.n_init ? total_rows - cfg.n_init : 0;
    if (spare / slots >= 8) {
        cfg.strategy = BatchStrategy::FreshSlices;
        cfg.batch_size = spare / slots;
    } else {
        cfg.strategy = BatchStrategy::ResampleWithReplacement;
        cfg.batch_size = total_rows;
    }
}

std::vector<std::vector<double>> sample_inits(const Dataset& data, std::size_t n_init) {
    std::vector<std::vector<double>> inits;
    inits.reserve(n_init);
    for (std::size_t i = 0; i < data.rows() && inits.size() < n_init; ++i) {
        std::vector<double> u(data.row(i).begin(), data.row(i).end());
        if (la::normalize(u.data(), u.size()) < 1e-300) {
            warn("skipping zero-norm row " + std::to_string(i) + " during initialization");
            continue;
        }
        inits.push_back(std::move(u));
    }
    if (inits.size() < n_init)
        throw std::invalid_argument("fewer than n_init usable rows for initialization: need " +
                                    std::to_string(n_init) + ", found " +
                                    std::to_string(inits.size()));
    return inits;
}

std::vector<double> riemannian_gradient(const Dataset& batch, const std::vector<double>& u,
                                        indices::IndexKind phi) {
    auto g = indices::dataset_score_gradient(batch, u, phi);
    la::axpy(g.data(), u.data(), u.size(), -la::dot(g, u));
    return g;
}

std::vector<double> ascent_step(const std::vector<double>& u, const std::vector<double>& g,
                                double eta, bool* degenerate) {
    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) next[i] = u[i] + eta * g[i];
    if (la::normalize(next.data(), next.size()) < 1e-12) {
        if (degenerate) *degenerate = true;
        return u;
    }
    return next;
}

AscentOutcome gradient_ascent(const Dataset& train, const Dataset& eval_batch,
                              const std::vector<std::vector<double>>& inits,
                              const PursuitConfig& cfg, double eta, Rng& rng) {
    if (inits.empty()) throw std::invalid_argument("gradient_ascent: no initializations");
    const std::size_t d = train.dim();
    const std::size_t n_init = inits.size();
    const auto phi = cfg.pair.phi;
    const auto psi = cfg.pair.psi;

    AscentOutcome out;
    out.best_dirs = inits;
    out.best_scores.resize(n_init);
    out.degenerate.assign(n_init, false);

    std::vector<std::vector<double>> current = inits;
    std::vector<double> eval_proj(eval_batch.rows());

    auto psi_score = [&](const std::vector<double>& u) {
        for (std::size_t k = 0; k < eval_batch.rows(); ++k)
            eval_proj[k] = la::dot(eval_batch.row(k).data(), u.data(), d);
        return indices::projection_score(eval_proj.data(), eval_proj.size(), psi);
    };

    out.trace.emplace_back(n_init);
    for (std::size_t j = 0; j < n_init; ++j) {
        out.best_scores[j] = psi_score(current[j]);
        out.trace.back()[j] = out.best_scores[j];
    }

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        Dataset batch;
        if (cfg.strategy == BatchStrategy::FreshSlices) {
            const std::size_t lo = cfg.batch_size * step;
            const std::size_t hi = lo + cfg.batch_size;
            if (hi > train.rows())
                throw std::invalid_argument("insufficient rows for fresh batches: need " +
                                            std::to_string(cfg.batch_size * cfg.steps) +
                                            ", have " + std::to_string(train.rows()));
            batch = train.slice(lo, hi);
        } else {
            batch = resample(train, cfg.batch_size, rng);
        }

        out.trace.emplace_back(n_init);
        for (std::size_t j = 0; j < n_init; ++j) {
            bool degenerate = false;
            const auto g = riemannian_gradient(batch, current[j], phi);
            current[j] = ascent_step(current[j], g, eta, &degenerate);
            if (degenerate) {
                out.degenerate[j] = true;
                warn("degenerate renormalization at step " + std::to_string(step) +
                     " init " + std::to_string(j));
            }
            const double score = psi_score(current[j]);
            out.trace.back()[j] = score;
            if (score > out.best_scores[j]) {
                out.best_scores[j] = score;
                out.best_dirs[j] = current[j];
            }
        }
    }
    return out;
}

RunResult two_step(const Dataset& data, const PursuitConfig& cfg) {
    cfg.validate();
    if (cfg.strategy == BatchStrategy::FreshSlices && data.rows() < cfg.required_rows())
        throw std::invalid_argument(
            "dataset too small for fresh slices: need " + std::to_string(cfg.required_rows()) +
            " rows (n_init + 2*batch*steps + batch), have " + std::to_string(data.rows()));

    Rng rng(cfg.seed);
    const auto inits = sample_inits(data, cfg.n_init);

    Dataset phase1_train, phase2_train, eval_batch;
    const std::size_t ns = cfg.batch_size * cfg.steps;
    if (cfg.strategy == BatchStrategy::FreshSlices) {
        phase1_train = data.slice(cfg.n_init, cfg.n_init + ns);
        phase2_train = data.slice(cfg.n_init + ns, cfg.n_init + 2 * ns);
        eval_batch = data.slice(cfg.n_init + 2 * ns, cfg.n_init + 2 * ns + cfg.batch_size);
    } else {
        phase1_train = data.slice(0, data.rows());
        phase2_train = phase1_train;
        eval_batch = resample(phase1_train, cfg.batch_size, rng);
    }

    auto phase1 = gradient_ascent(phase1_train, eval_batch, inits, cfg, cfg.eta1, rng);
    auto phase2 = gradient_ascent(phase2_train, eval_batch, phase1.best_dirs, cfg, cfg.eta2, rng);

    RunResult result;
    result.per_init_best = std::move(phase2.best_dirs);
    result.per_init_score = std::move(phase2.best_scores);
    result.degenerate.resize(cfg.n_init);
    for (std::size_t j = 0; j < cfg.n_init; ++j)
        result.degenerate[j] = phase1.degenerate[j] || phase2.degenerate[j];

    result.score_trace = std::move(phase1.trace);
    for (auto& row : phase2.trace) result.score_trace.push_back(std::move(row));

    std::size_t best = 0;
    for (std::size_t j = 1; j < result.per_init_score.size(); ++j)
        if (result.per_init_score[j] > result.per_init_score[best]) best = j;
    result.u_hat = result.per_init_best[best];

    if (data.has_true_direction())
        result.alignment = std::abs(la::dot(result.u_hat, data.true_direction()));
    return result;
}

}  // namespace pursuit
