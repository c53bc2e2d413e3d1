#include "pursuit/pursuit.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "eval.hpp"
#include "gen.hpp"
#include "indices.hpp"
#include "linalg.hpp"
#include "pursuit.hpp"
#include "spectral.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
pv_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const pursuit::CsvError& e) {
        set_error(e.what());
        return PV_ERR_IO;
    } catch (const pursuit::eval::CalibrationError& e) {
        set_error(e.what());
        return PV_ERR_NUMERIC;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return PV_ERR_INVALID;
    } catch (const std::exception& e) {
        set_error(e.what());
        const std::string what = e.what();
        return what.find("cannot") != std::string::npos || what.find("file") != std::string::npos
                   ? PV_ERR_IO
                   : PV_ERR_NUMERIC;
    }
}

pursuit::gen::SignalLaw to_signal(pv_signal_law law) {
    switch (law) {
        case PV_SIGNAL_IMBALANCED_CLUSTERS: return pursuit::gen::SignalLaw::ImbalancedClusters;
        case PV_SIGNAL_BERNOULLI_RADEMACHER:
            return pursuit::gen::SignalLaw::BernoulliRademacher;
        case PV_SIGNAL_GAUSSIAN_MIXTURE_SHIFT:
            return pursuit::gen::SignalLaw::GaussianMixtureShift;
    }
    throw std::invalid_argument("unknown signal law tag");
}

pursuit::gen::AmbientLaw to_ambient(pv_ambient_law law) {
    switch (law) {
        case PV_AMBIENT_GAUSSIAN: return pursuit::gen::AmbientLaw::Gaussian;
        case PV_AMBIENT_RADEMACHER: return pursuit::gen::AmbientLaw::Rademacher;
        case PV_AMBIENT_STUDENT_T2: return pursuit::gen::AmbientLaw::HeavyTailedStudentT;
        case PV_AMBIENT_SKEW_NORMAL: return pursuit::gen::AmbientLaw::SkewNormal;
    }
    throw std::invalid_argument("unknown ambient law tag");
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct pv_dataset {
    pursuit::Dataset data;
};

struct pv_run_result {
    pursuit::RunResult result;
};

struct pv_phase_result {
    pursuit::eval::PhaseGridResult result;
};

struct pv_compare_result {
    std::vector<pursuit::eval::ComparisonRow> rows;
};

extern "C" {

const char* pv_last_error(void) { return g_last_error.c_str(); }

pv_status pv_dataset_planted(const pv_planted_spec* spec, int64_t n, uint64_t seed,
                             pv_dataset** out) {
    return guarded([&]() -> pv_status {
        if (!spec || !out) throw std::invalid_argument("null argument");
        pursuit::gen::PlantedSpec s;
        s.d = static_cast<std::size_t>(spec->d);
        s.signal = to_signal(spec->signal);
        s.p = spec->p;
        s.ambient = to_ambient(spec->ambient);
        if (spec->u_star) s.u_star.assign(spec->u_star, spec->u_star + spec->d);
        pursuit::Rng rng(seed);
        *out = new pv_dataset{pursuit::gen::sample_planted(s, static_cast<std::size_t>(n), rng)};
        return PV_OK;
    });
}

pv_status pv_dataset_mixture_shift(int64_t n, int64_t d, double p, double delta,
                                   double lambda, uint64_t seed, pv_dataset** out) {
    return guarded([&]() -> pv_status {
        if (!out) throw std::invalid_argument("null argument");
        pursuit::Rng rng(seed);
        *out = new pv_dataset{pursuit::gen::sample_mixture_shift(
            static_cast<std::size_t>(n), static_cast<std::size_t>(d), p, delta, lambda, rng)};
        return PV_OK;
    });
}

pv_status pv_dataset_anisotropic(int64_t n, int64_t d, double p, double lambda,
                                 uint64_t seed, pv_dataset** out) {
    return guarded([&]() -> pv_status {
        if (!out) throw std::invalid_argument("null argument");
        pursuit::Rng rng(seed);
        *out = new pv_dataset{pursuit::gen::sample_anisotropic(
            static_cast<std::size_t>(n), static_cast<std::size_t>(d), p, lambda, rng)};
        return PV_OK;
    });
}

pv_status pv_dataset_load_csv(const char* path, pv_dataset** out) {
    return guarded([&]() -> pv_status {
        if (!path || !out) throw std::invalid_argument("null argument");
        *out = new pv_dataset{pursuit::load_csv(path)};
        return PV_OK;
    });
}

pv_status pv_dataset_save_csv(const pv_dataset* data, const char* path) {
    return guarded([&]() -> pv_status {
        if (!data || !path) throw std::invalid_argument("null argument");
        pursuit::save_csv(data->data, path);
        return PV_OK;
    });
}

void pv_dataset_free(pv_dataset* data) { delete data; }

int64_t pv_dataset_rows(const pv_dataset* data) {
    return data ? static_cast<int64_t>(data->data.rows()) : 0;
}

int64_t pv_dataset_dim(const pv_dataset* data) {
    return data ? static_cast<int64_t>(data->data.dim()) : 0;
}

int pv_dataset_has_labels(const pv_dataset* data) {
    return data && data->data.has_labels() ? 1 : 0;
}

int pv_dataset_has_true_direction(const pv_dataset* data) {
    return data && data->data.has_true_direction() ? 1 : 0;
}

pv_status pv_dataset_true_direction(const pv_dataset* data, double* out) {
    return guarded([&]() -> pv_status {
        if (!data || !out) throw std::invalid_argument("null argument");
        if (!data->data.has_true_direction())
            throw std::invalid_argument("dataset carries no ground-truth direction");
        const auto& u = data->data.true_direction();
        std::memcpy(out, u.data(), u.size() * sizeof(double));
        return PV_OK;
    });
}

pv_status pv_dataset_set_true_direction(pv_dataset* data, const double* u) {
    return guarded([&]() -> pv_status {
        if (!data || !u) throw std::invalid_argument("null argument");
        data->data.set_true_direction(std::vector<double>(u, u + data->data.dim()));
        return PV_OK;
    });
}

pv_status pv_dataset_whiten(const pv_dataset* data, pv_dataset** out) {
    return guarded([&]() -> pv_status {
        if (!data || !out) throw std::invalid_argument("null argument");
        *out = new pv_dataset{pursuit::gen::whiten(data->data)};
        return PV_OK;
    });
}

pv_status pv_dataset_pca(const pv_dataset* data, int64_t k, pv_dataset** out) {
    return guarded([&]() -> pv_status {
        if (!data || !out) throw std::invalid_argument("null argument");
        *out = new pv_dataset{
            pursuit::gen::pca_reduce(data->data, static_cast<std::size_t>(k)).first};
        return PV_OK;
    });
}

pv_status pv_dataset_deflate(const pv_dataset* data, const double* u, pv_dataset** out) {
    return guarded([&]() -> pv_status {
        if (!data || !u || !out) throw std::invalid_argument("null argument");
        *out = new pv_dataset{pursuit::spectral::deflate(
            data->data, std::vector<double>(u, u + data->data.dim()))};
        return PV_OK;
    });
}

pv_status pv_dataset_split(const pv_dataset* data, int64_t n_head, pv_dataset** head,
                           pv_dataset** tail) {
    return guarded([&]() -> pv_status {
        if (!data || !head || !tail) throw std::invalid_argument("null argument");
        const auto n = data->data.rows();
        const auto k = static_cast<std::size_t>(n_head);
        if (k > n) throw std::invalid_argument("split point beyond dataset");
        auto a = data->data.slice(0, k);
        auto b = data->data.slice(k, n);
        if (data->data.has_labels()) {
            const auto& l = data->data.labels();
            a.set_labels({l.begin(), l.begin() + k});
            b.set_labels({l.begin() + k, l.end()});
        }
        *head = new pv_dataset{std::move(a)};
        *tail = new pv_dataset{std::move(b)};
        return PV_OK;
    });
}

pv_status pv_dataset_score(const pv_dataset* data, const double* u, const char* index,
                           double* out) {
    return guarded([&]() -> pv_status {
        if (!data || !u || !index || !out) throw std::invalid_argument("null argument");
        auto kind = pursuit::indices::parse(index);
        if (!kind) throw std::invalid_argument("unknown index tag: " + std::string(index));
        *out = pursuit::indices::dataset_score(
            data->data, std::vector<double>(u, u + data->data.dim()), *kind);
        return PV_OK;
    });
}

pv_status pv_two_step(const pv_dataset* data, const pv_pursuit_config* config,
                      pv_run_result** out) {
    return guarded([&]() -> pv_status {
        if (!data || !config || !out) throw std::invalid_argument("null argument");
        auto phi = pursuit::indices::parse(config->phi ? config->phi : "relu2");
        if (!phi) throw std::invalid_argument("unknown index tag: " + std::string(config->phi));

        const double p_hint = config->p_hint > 0.0 ? config->p_hint : 0.1;
        auto cfg = pursuit::default_recipe(data->data.dim(), p_hint, *phi, config->seed);
        if (config->psi) {
            auto psi = pursuit::indices::parse(config->psi);
            if (!psi)
                throw std::invalid_argument("unknown index tag: " + std::string(config->psi));
            cfg.pair.psi = *psi;
        }
        if (config->n_init > 0) cfg.n_init = static_cast<std::size_t>(config->n_init);
        if (config->steps > 0) cfg.steps = static_cast<std::size_t>(config->steps);
        if (config->eta1 > 0.0) cfg.eta1 = config->eta1;
        if (config->eta2 > 0.0) cfg.eta2 = config->eta2;

        if (config->batch_size > 0) {
            cfg.batch_size = static_cast<std::size_t>(config->batch_size);
            if (config->strategy == PV_BATCH_AUTO)
                cfg.strategy = data->data.rows() >= cfg.required_rows()
                                   ? pursuit::BatchStrategy::FreshSlices
                                   : pursuit::BatchStrategy::ResampleWithReplacement;
        } else {
            pursuit::fit_budget(cfg, data->data.rows());
        }
        if (config->strategy == PV_BATCH_FRESH_SLICES)
            cfg.strategy = pursuit::BatchStrategy::FreshSlices;
        else if (config->strategy == PV_BATCH_RESAMPLE)
            cfg.strategy = pursuit::BatchStrategy::ResampleWithReplacement;

        *out = new pv_run_result{pursuit::two_step(data->data, cfg)};
        return PV_OK;
    });
}

void pv_run_result_free(pv_run_result* result) { delete result; }

int64_t pv_run_result_dim(const pv_run_result* result) {
    return result ? static_cast<int64_t>(result->result.u_hat.size()) : 0;
}

pv_status pv_run_result_direction(const pv_run_result* result, double* out) {
    return guarded([&]() -> pv_status {
        if (!result || !out) throw std::invalid_argument("null argument");
        std::memcpy(out, result->result.u_hat.data(),
                    result->result.u_hat.size() * sizeof(double));
        return PV_OK;
    });
}

double pv_run_result_alignment(const pv_run_result* result) {
    return result ? result->result.alignment : -1.0;
}

pv_status pv_run_result_report_json(const pv_run_result* result, char** out) {
    return guarded([&]() -> pv_status {
        if (!result || !out) throw std::invalid_argument("null argument");
        const auto& r = result->result;
        json doc;
        doc["u_hat"] = r.u_hat;
        if (r.alignment >= 0.0) doc["alignment"] = r.alignment;
        doc["per_init_scores"] = r.per_init_score;
        doc["score_trace"] = r.score_trace;
        doc["degenerate_inits"] = r.degenerate;
        *out = dup_string(doc.dump(2));
        return PV_OK;
    });
}

void pv_string_free(char* s) { delete[] s; }

pv_status pv_recover_spectral(const pv_dataset* data, const char* method, double* u_out) {
    return guarded([&]() -> pv_status {
        if (!data || !method || !u_out) throw std::invalid_argument("null argument");
        auto m = pursuit::eval::Method::parse(method);
        if (!m || m->gradient)
            throw std::invalid_argument("unknown spectral method tag: " + std::string(method));
        auto u = pursuit::spectral::recover_spectral(data->data, m->spectral_method,
                                                     m->three_tensor_end);
        std::memcpy(u_out, u.data(), u.size() * sizeof(double));
        return PV_OK;
    });
}

pv_status pv_run_phase_grid(const pv_phase_spec* spec, pv_phase_result** out) {
    return guarded([&]() -> pv_status {
        if (!spec || !out) throw std::invalid_argument("null argument");
        pursuit::eval::PhaseGridSpec s;
        s.d_values.assign(spec->d_values, spec->d_values + spec->num_d);
        s.n_values.assign(spec->n_values, spec->n_values + spec->num_n);
        s.p_rule = spec->p_power_law ? pursuit::eval::PRule::PowerLaw
                                     : pursuit::eval::PRule::Constant;
        s.p_param = spec->p_param;
        s.trials = spec->trials;
        auto m = pursuit::eval::Method::parse(spec->method ? spec->method : "relu2");
        if (!m) throw std::invalid_argument("unknown method tag: " + std::string(spec->method));
        s.method = *m;
        s.signal = to_signal(spec->signal);
        s.seed = spec->seed;
        s.jobs = spec->jobs > 0 ? spec->jobs : 1;
        *out = new pv_phase_result{pursuit::eval::run_phase_grid(s)};
        return PV_OK;
    });
}

void pv_phase_result_free(pv_phase_result* result) { delete result; }

size_t pv_phase_result_cells(const pv_phase_result* result) {
    return result ? result->result.cells.size() : 0;
}

pv_status pv_phase_result_cell(const pv_phase_result* result, size_t index,
                               pv_phase_cell* out) {
    return guarded([&]() -> pv_status {
        if (!result || !out) throw std::invalid_argument("null argument");
        if (index >= result->result.cells.size())
            throw std::invalid_argument("cell index out of range");
        const auto& c = result->result.cells[index];
        *out = {static_cast<int64_t>(c.d), static_cast<int64_t>(c.n),
                c.p,                       c.mean,
                c.stddev,                  c.trials};
        return PV_OK;
    });
}

pv_status pv_run_compare(const pv_compare_spec* spec, pv_compare_result** out) {
    return guarded([&]() -> pv_status {
        if (!spec || !out) throw std::invalid_argument("null argument");
        pursuit::eval::ComparisonSpec s;
        s.d = static_cast<std::size_t>(spec->d);
        s.p = spec->p;
        s.signal = to_signal(spec->signal);
        s.n_values.assign(spec->n_values, spec->n_values + spec->num_n);
        for (size_t i = 0; i < spec->num_methods; ++i) {
            auto m = pursuit::eval::Method::parse(spec->methods[i]);
            if (!m)
                throw std::invalid_argument("unknown method tag: " +
                                            std::string(spec->methods[i]));
            s.methods.push_back(*m);
        }
        s.trials = spec->trials;
        s.seed = spec->seed;
        s.jobs = spec->jobs > 0 ? spec->jobs : 1;
        *out = new pv_compare_result{pursuit::eval::run_method_comparison(s)};
        return PV_OK;
    });
}

void pv_compare_result_free(pv_compare_result* result) { delete result; }

size_t pv_compare_result_rows(const pv_compare_result* result) {
    return result ? result->rows.size() : 0;
}

pv_status pv_compare_result_row(const pv_compare_result* result, size_t index,
                                pv_compare_row* out) {
    return guarded([&]() -> pv_status {
        if (!result || !out) throw std::invalid_argument("null argument");
        if (index >= result->rows.size()) throw std::invalid_argument("row index out of range");
        const auto& r = result->rows[index];
        *out = {r.method.c_str(), static_cast<int64_t>(r.n), r.mean, r.stddev, r.trials};
        return PV_OK;
    });
}

pv_status pv_run_ig(const pv_dataset* train, const pv_dataset* holdout,
                    const pv_ig_spec* spec, char** json_out) {
    return guarded([&]() -> pv_status {
        if (!train || !holdout || !spec || !json_out)
            throw std::invalid_argument("null argument");
        pursuit::eval::IgProtocolSpec s;
        auto m = pursuit::eval::Method::parse(spec->method ? spec->method : "relu2");
        if (!m) throw std::invalid_argument("unknown method tag: " + std::string(spec->method));
        s.method = *m;
        s.pca_k = spec->pca_k > 0 ? static_cast<std::size_t>(spec->pca_k) : 0;
        s.whiten = spec->whiten != 0;
        if (spec->n_init > 0) s.n_init = static_cast<std::size_t>(spec->n_init);
        if (spec->directions > 0) s.directions = static_cast<std::size_t>(spec->directions);
        s.seed = spec->seed;

        const auto report = pursuit::eval::run_ig_protocol(train->data, holdout->data, s);
        json doc;
        doc["method"] = s.method.name();
        doc["max_bits"] = report.max_bits;
        doc["single_class"] = report.single_class;
        doc["quartiles"] = {{"q1", report.q1}, {"median", report.median}, {"q3", report.q3}};
        doc["projections"] = json::array();
        for (const auto& p : report.projections)
            doc["projections"].push_back({{"threshold", p.threshold},
                                          {"train_ig", p.train_ig},
                                          {"holdout_ig", p.holdout_ig}});
        *json_out = dup_string(doc.dump(2));
        return PV_OK;
    });
}

pv_status pv_calibrate_threshold(int64_t d, int64_t n, double p, int trials, uint64_t seed,
                                 double* threshold_out) {
    return guarded([&]() -> pv_status {
        if (!threshold_out) throw std::invalid_argument("null argument");
        pursuit::Rng rng(seed);
        *threshold_out = pursuit::eval::calibrate_threshold(
            static_cast<std::size_t>(d), static_cast<std::size_t>(n), p, trials, rng);
        return PV_OK;
    });
}

pv_status pv_hypothesis_test(const pv_dataset* data, const double* u_hat, double threshold,
                             int* decision_out, double* statistic_out) {
    return guarded([&]() -> pv_status {
        if (!data || !u_hat) throw std::invalid_argument("null argument");
        const auto outcome = pursuit::eval::planted_hypothesis_test(
            data->data, std::vector<double>(u_hat, u_hat + data->data.dim()), threshold);
        if (decision_out) *decision_out = outcome.planted ? 1 : 0;
        if (statistic_out) *statistic_out = outcome.statistic;
        return PV_OK;
    });
}

}  // extern "C"
