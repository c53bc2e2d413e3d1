#include "eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "linalg.hpp"

namespace pursuit::eval {

namespace {

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

// Runs job(i) for i in [0, count) on up to `jobs` threads. Results must be
// written to preallocated slots so scheduling never affects the outcome.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& job) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            job(i);
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = std::min<int>(jobs, static_cast<int>(count));
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

Dataset gaussian_dataset(std::size_t n, std::size_t d, Rng& rng) {
    Dataset out(n, d);
    for (double& v : out.mutable_values()) v = rng.normal();
    return out;
}

double entropy_bits(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double q = static_cast<double>(c) / static_cast<double>(total);
        h -= q * std::log2(q);
    }
    return h;
}

}  // namespace

double alignment(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("alignment: dimension mismatch");
    return std::abs(la::dot(u, v));
}

std::string Method::name() const {
    if (gradient) return indices::name(phi);
    if (spectral_method == spectral::SpectralMethod::ThreeTensorDecomp &&
        three_tensor_end == spectral::Extreme::Max)
        return "3tensor-max";
    return spectral::name(spectral_method);
}

std::optional<Method> Method::parse(const std::string& tag) {
    Method m;
    if (auto kind = indices::parse(tag)) {
        m.gradient = true;
        m.phi = *kind;
        return m;
    }
    if (tag == "3tensor-max") {
        m.gradient = false;
        m.spectral_method = spectral::SpectralMethod::ThreeTensorDecomp;
        m.three_tensor_end = spectral::Extreme::Max;
        return m;
    }
    if (auto sm = spectral::parse(tag)) {
        m.gradient = false;
        m.spectral_method = *sm;
        return m;
    }
    return std::nullopt;
}

std::vector<double> run_method(const Dataset& data, const Method& method, double p,
                               std::uint64_t seed, std::size_t n_init_min) {
    if (!method.gradient)
        return spectral::recover_spectral(data, method.spectral_method, method.three_tensor_end);

    auto cfg = default_recipe(data.dim(), p, method.phi, seed);
    cfg.n_init = std::max(cfg.n_init, n_init_min);
    fit_budget(cfg, data.rows());
    return two_step(data, cfg).u_hat;
}

IgSplit information_gain(const std::vector<double>& train_proj,
                         const std::vector<int>& train_labels,
                         const std::vector<double>& test_proj,
                         const std::vector<int>& test_labels) {
    const std::size_t n = train_proj.size();
    if (n == 0 || n != train_labels.size())
        throw std::invalid_argument("information_gain: bad train data");
    if (test_proj.size() != test_labels.size())
        throw std::invalid_argument("information_gain: bad test data");

    std::map<int, std::size_t> label_id;
    for (int l : train_labels) label_id.emplace(l, label_id.size());
    for (int l : test_labels) label_id.emplace(l, label_id.size());
    const std::size_t classes = label_id.size();

    IgSplit out;
    if (classes < 2) {
        out.single_class = true;
        out.threshold = *std::max_element(train_proj.begin(), train_proj.end());
        return out;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return train_proj[a] < train_proj[b]; });

    std::vector<std::size_t> total(classes, 0);
    for (int l : train_labels) ++total[label_id.at(l)];
    const double h_y = entropy_bits(total, n);

    // Scan candidate thresholds (midpoints of consecutive distinct sorted
    // values) left to right; the strict > keeps the smallest maximizer.
    std::vector<std::size_t> left(classes, 0);
    double best_ig = -1.0;
    double best_t = train_proj[order.back()];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left[label_id.at(train_labels[order[i]])];
        const double lo = train_proj[order[i]];
        const double hi = train_proj[order[i + 1]];
        if (!(hi > lo)) continue;
        std::vector<std::size_t> right(classes);
        for (std::size_t c = 0; c < classes; ++c) right[c] = total[c] - left[c];
        const std::size_t nl = i + 1, nr = n - nl;
        const double cond = (static_cast<double>(nl) / n) * entropy_bits(left, nl) +
                            (static_cast<double>(nr) / n) * entropy_bits(right, nr);
        const double ig = h_y - cond;
        if (ig > best_ig) {
            best_ig = ig;
            best_t = 0.5 * (lo + hi);
        }
    }
    if (best_ig < 0.0) best_ig = 0.0;  // all projections identical
    out.threshold = best_t;
    out.train_ig = best_ig;

    if (!test_proj.empty()) {
        std::vector<std::size_t> above(classes, 0), below(classes, 0), tot(classes, 0);
        std::size_t na = 0;
        for (std::size_t i = 0; i < test_proj.size(); ++i) {
            const std::size_t c = label_id.at(test_labels[i]);
            ++tot[c];
            if (test_proj[i] > best_t) {
                ++above[c];
                ++na;
            } else {
                ++below[c];
            }
        }
        const std::size_t nt = test_proj.size(), nb = nt - na;
        const double h = entropy_bits(tot, nt);
        const double cond = (static_cast<double>(na) / nt) * entropy_bits(above, na) +
                            (static_cast<double>(nb) / nt) * entropy_bits(below, nb);
        out.test_ig = h - cond;
    }
    return out;
}

TestOutcome planted_hypothesis_test(const Dataset& data, const std::vector<double>& u_hat,
                                    double threshold) {
    TestOutcome out;
    out.statistic = indices::dataset_score(data, u_hat, indices::IndexKind::Relu2);
    out.threshold = threshold;
    out.planted = out.statistic >= threshold;
    return out;
}

std::vector<double> recover_test_direction(const Dataset& data, double p, std::uint64_t seed) {
    auto cfg = default_recipe(data.dim(), p, indices::IndexKind::Relu2, seed);
    cfg.n_init = std::max<std::size_t>(cfg.n_init, 64);
    cfg.strategy = BatchStrategy::ResampleWithReplacement;
    cfg.batch_size = data.rows();
    return two_step(data, cfg).u_hat;
}

double calibrate_threshold(std::size_t d, std::size_t n, double p, int trials, Rng& rng) {
    if (trials < 30) throw std::invalid_argument("calibration needs at least 30 trials");

    std::vector<double> h0_stats, h1_stats;
    for (int t = 0; t < trials; ++t) {
        Rng h0_rng = rng.child(2 * static_cast<std::uint64_t>(t));
        auto null_data = gaussian_dataset(n, d, h0_rng);
        auto u = gen::sample_unit_sphere(d, h0_rng);
        h0_stats.push_back(indices::dataset_score(null_data, u, indices::IndexKind::Relu2));

        Rng h1_rng = rng.child(2 * static_cast<std::uint64_t>(t) + 1);
        gen::PlantedSpec spec;
        spec.d = d;
        spec.p = p;
        spec.signal = gen::SignalLaw::ImbalancedClusters;
        auto planted = gen::sample_planted(spec, n, h1_rng);
        auto u_hat = recover_test_direction(planted, p, h1_rng.next_u64());
        h1_stats.push_back(indices::dataset_score(planted, u_hat, indices::IndexKind::Relu2));
    }

    const double h0_mean = mean_of(h0_stats);
    const double h1_mean = mean_of(h1_stats);
    if (h0_mean >= h1_mean)
        throw CalibrationError("calibration failed: H0 mean " + std::to_string(h0_mean) +
                                   " >= H1 mean " + std::to_string(h1_mean),
                               h0_mean, h1_mean);
    return 0.5 * (h0_mean + h1_mean);
}

double PhaseGridSpec::p_for(std::size_t d) const {
    return p_rule == PRule::PowerLaw ? std::pow(static_cast<double>(d), p_param) : p_param;
}

void PhaseGridSpec::validate() const {
    if (d_values.empty() || n_values.empty()) throw std::invalid_argument("empty grid axes");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    for (std::size_t d : d_values) {
        const double p = p_for(d);
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("p rule gives p outside (0,1) at d = " + std::to_string(d));
    }
}

double phase_cell_trial(const PhaseGridSpec& spec, std::size_t ni, std::size_t di, int trial) {
    const std::size_t cell_index = ni * spec.d_values.size() + di;
    const std::size_t d = spec.d_values[di];
    const std::size_t n = spec.n_values[ni];
    const double p = spec.p_for(d);

    const std::uint64_t cell_seed = Rng::child_seed(spec.seed, cell_index);
    Rng trial_rng(Rng::child_seed(cell_seed, static_cast<std::uint64_t>(trial)));

    gen::PlantedSpec pv;
    pv.d = d;
    pv.p = p;
    pv.signal = spec.signal;
    auto data = gen::sample_planted(pv, n, trial_rng);
    auto u_hat = run_method(data, spec.method, p, trial_rng.next_u64());
    return alignment(u_hat, data.true_direction());
}

PhaseGridResult run_phase_grid(const PhaseGridSpec& spec) {
    spec.validate();
    PhaseGridResult result;
    result.spec = spec;
    result.cells.resize(spec.d_values.size() * spec.n_values.size());

    parallel_for(result.cells.size(), spec.jobs, [&](std::size_t idx) {
        const std::size_t di = idx % spec.d_values.size();
        const std::size_t ni = idx / spec.d_values.size();
        PhaseCell cell;
        cell.d = spec.d_values[di];
        cell.n = spec.n_values[ni];
        cell.p = spec.p_for(cell.d);

        std::vector<double> alignments;
        for (int t = 0; t < spec.trials; ++t) {
            try {
                alignments.push_back(phase_cell_trial(spec, ni, di, t));
            } catch (const std::exception&) {
                // Cell failures are recorded, not fatal.
            }
        }
        cell.trials = static_cast<int>(alignments.size());
        if (alignments.empty()) {
            cell.mean = std::numeric_limits<double>::quiet_NaN();
            cell.stddev = std::numeric_limits<double>::quiet_NaN();
        } else {
            cell.mean = mean_of(alignments);
            cell.stddev = stddev_of(alignments, cell.mean);
        }
        result.cells[idx] = cell;
    });
    return result;
}

std::vector<ComparisonRow> run_method_comparison(const ComparisonSpec& spec) {
    if (spec.n_values.empty() || spec.methods.empty())
        throw std::invalid_argument("comparison needs methods and sample counts");
    if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");

    const std::size_t jobs_total = spec.n_values.size() * static_cast<std::size_t>(spec.trials);
    // alignments[(ni * trials + trial) * methods + mi]
    std::vector<double> alignments(jobs_total * spec.methods.size(),
                                   std::numeric_limits<double>::quiet_NaN());

    parallel_for(jobs_total, spec.jobs, [&](std::size_t idx) {
        const std::size_t ni = idx / spec.trials;
        const int trial = static_cast<int>(idx % spec.trials);
        Rng rng(Rng::child_seed(spec.seed, idx));

        gen::PlantedSpec pv;
        pv.d = spec.d;
        pv.p = spec.p;
        pv.signal = spec.signal;
        const auto data = gen::sample_planted(pv, spec.n_values[ni], rng);
        (void)trial;

        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
            try {
                auto u_hat = run_method(data, spec.methods[mi], spec.p, rng.child(mi).next_u64(),
                                        spec.n_init_min);
                alignments[idx * spec.methods.size() + mi] =
                    alignment(u_hat, data.true_direction());
            } catch (const std::exception&) {
                // Recorded as NaN; the comparison continues.
            }
        }
    });

    std::vector<ComparisonRow> rows;
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
            std::vector<double> vals;
            for (int t = 0; t < spec.trials; ++t) {
                const double a =
                    alignments[(ni * spec.trials + t) * spec.methods.size() + mi];
                if (!std::isnan(a)) vals.push_back(a);
            }
            ComparisonRow row;
            row.method = spec.methods[mi].name();
            row.n = spec.n_values[ni];
            row.trials = static_cast<int>(vals.size());
            if (vals.empty()) {
                row.mean = std::numeric_limits<double>::quiet_NaN();
                row.stddev = std::numeric_limits<double>::quiet_NaN();
            } else {
                row.mean = mean_of(vals);
                row.stddev = stddev_of(vals, row.mean);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

McGradient mc_expected_gradient(gen::SignalLaw signal, double a, double p,
                                indices::IndexKind phi, std::size_t draws, Rng& rng) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alignment must lie in (0, 1)");
    if (draws < 10000) throw std::invalid_argument("need at least 10^4 draws");
    if (!indices::is_pointwise(phi))
        throw std::invalid_argument("oracle needs a pointwise index");

    // With u = a u* + sqrt(1-a^2) e2 and Gaussian ambient, the projected
    // gradient identity reduces the signal component to one dimension:
    //   <g_u(x), u*> = phi'(a nu + sqrt(1-a^2) z) (nu - <x,u> a).
    const double b = std::sqrt(1.0 - a * a);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double nu = gen::sample_signal(signal, p, rng);
        const double z = rng.normal();
        const double proj = a * nu + b * z;
        const double val = indices::phi_deriv(phi, proj) * (nu - proj * a);
        sum += val;
        sum_sq += val * val;
    }
    const double mean = sum / static_cast<double>(draws);
    const double var = sum_sq / static_cast<double>(draws) - mean * mean;
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(draws))};
}

IgReport run_ig_protocol(const Dataset& train_in, const Dataset& holdout_in,
                         const IgProtocolSpec& spec) {
    if (!train_in.has_labels() || !holdout_in.has_labels())
        throw std::invalid_argument("information-gain protocol needs labeled data");
    if (train_in.dim() != holdout_in.dim())
        throw std::invalid_argument("train/holdout dimension mismatch");

    Dataset train = train_in.slice(0, train_in.rows());
    train.set_labels(train_in.labels());
    Dataset holdout = holdout_in.slice(0, holdout_in.rows());
    holdout.set_labels(holdout_in.labels());

    if (spec.pca_k > 0 && train.dim() > spec.pca_k) {
        auto basis = gen::pca_fit(train, spec.pca_k);
        train = basis.apply(train);
        holdout = basis.apply(holdout);
    }
    if (spec.whiten) {
        auto t = gen::whiten_fit(train);
        train = t.apply(train);
        holdout = t.apply(holdout);
    }

    std::vector<std::vector<double>> directions;
    if (spec.method.gradient) {
        auto cfg = default_recipe(train.dim(), 0.1, spec.method.phi, spec.seed);
        cfg.n_init = std::min(spec.n_init, train.rows());
        fit_budget(cfg, train.rows());
        auto run = two_step(train, cfg);

        std::vector<std::size_t> order(run.per_init_best.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return run.per_init_score[a] > run.per_init_score[b];
        });
        for (std::size_t k = 0; k < order.size() && directions.size() < spec.directions; ++k)
            directions.push_back(run.per_init_best[order[k]]);
    } else {
        Dataset work = train.slice(0, train.rows());
        for (std::size_t k = 0; k < spec.directions; ++k) {
            auto u = spectral::recover_spectral(work, spec.method.spectral_method,
                                                spec.method.three_tensor_end);
            work = spectral::deflate(work, u);
            directions.push_back(std::move(u));
        }
    }

    std::map<int, std::size_t> classes;
    for (int l : train.labels()) classes.emplace(l, classes.size());

    IgReport report;
    report.max_bits = classes.size() > 1 ? std::log2(static_cast<double>(classes.size())) : 0.0;
    report.single_class = classes.size() < 2;

    std::vector<double> train_proj(train.rows()), holdout_proj(holdout.rows());
    for (const auto& u : directions) {
        for (std::size_t i = 0; i < train.rows(); ++i)
            train_proj[i] = la::dot(train.row(i).data(), u.data(), u.size());
        for (std::size_t i = 0; i < holdout.rows(); ++i)
            holdout_proj[i] = la::dot(holdout.row(i).data(), u.data(), u.size());
        const auto split =
            information_gain(train_proj, train.labels(), holdout_proj, holdout.labels());
        report.projections.push_back({split.threshold, split.train_ig, split.test_ig});
    }

    std::sort(report.projections.begin(), report.projections.end(),
              [](const IgProjection& a, const IgProjection& b) {
                  return a.holdout_ig > b.holdout_ig;
              });
    auto quantile = [&](double q) {
        if (report.projections.empty()) return 0.0;
        std::vector<double> igs;
        for (const auto& pr : report.projections) igs.push_back(pr.holdout_ig);
        std::sort(igs.begin(), igs.end());
        const double pos = q * static_cast<double>(igs.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, igs.size() - 1);
        return igs[lo] + (pos - static_cast<double>(lo)) * (igs[hi] - igs[lo]);
    };
    report.q1 = quantile(0.25);
    report.median = quantile(0.5);
    report.q3 = quantile(0.75);
    return report;
}

}  // namespace pursuit::eval
