// Command-line front end. Talks to the library exclusively through the C API.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pursuit/pursuit.h"

using nlohmann::json;

namespace {

bool g_verbose = false;

void log_line(const std::string& msg) {
    if (g_verbose) std::fprintf(stderr, "pursuit: %s\n", msg.c_str());
}

[[noreturn]] void die(int code, const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    std::exit(code);
}

// Exit-code contract: 1 = I/O failure, 2 = validation, 3 = numerical.
int exit_code(pv_status status) {
    switch (status) {
        case PV_ERR_IO: return 1;
        case PV_ERR_INVALID: return 2;
        default: return 3;
    }
}

void check(pv_status status) {
    if (status != PV_OK) die(exit_code(status), pv_last_error());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(1, "cannot open " + path + " for writing");
    out << content;
    if (!out) die(1, "write failed: " + path);
}

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

pv_signal_law parse_signal(const std::string& tag) {
    if (tag == "ic") return PV_SIGNAL_IMBALANCED_CLUSTERS;
    if (tag == "br") return PV_SIGNAL_BERNOULLI_RADEMACHER;
    if (tag == "gms") return PV_SIGNAL_GAUSSIAN_MIXTURE_SHIFT;
    die(2, "unknown signal law '" + tag + "' (valid: ic, br, gms)");
}

pv_ambient_law parse_ambient(const std::string& tag) {
    if (tag == "gaussian") return PV_AMBIENT_GAUSSIAN;
    if (tag == "rademacher") return PV_AMBIENT_RADEMACHER;
    if (tag == "t2") return PV_AMBIENT_STUDENT_T2;
    if (tag == "skewnormal") return PV_AMBIENT_SKEW_NORMAL;
    die(2, "unknown ambient law '" + tag + "' (valid: gaussian, rademacher, t2, skewnormal)");
}

const std::vector<std::string> kMethodTags = {
    "relu2",         "kurtosis", "abs",     "absmax",  "skewness",
    "approxentropy", "cov4max",  "cov4min", "3tensor", "3tensor-max"};

void require_method(const std::string& tag) {
    for (const auto& t : kMethodTags)
        if (t == tag) return;
    std::string valid;
    for (const auto& t : kMethodTags) valid += (valid.empty() ? "" : ", ") + t;
    die(2, "unknown method '" + tag + "' (valid: " + valid + ")");
}

// Values from --config act as defaults; explicit flags override them.
json load_config(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    }
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) die(1, "cannot open config file " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        die(2, std::string("config parse failure: ") + e.what());
    }
    if (!cfg.is_object()) die(2, "config root must be a JSON object");
    return cfg;
}

template <typename T>
void config_default(const json& cfg, const std::string& key, T& value) {
    if (cfg.contains(key)) {
        try {
            value = cfg.at(key).get<T>();
        } catch (const std::exception&) {
            die(2, "config key '" + key + "' has the wrong type");
        }
    }
}

struct DatasetHandle {
    pv_dataset* ptr = nullptr;
    ~DatasetHandle() { pv_dataset_free(ptr); }
    pv_dataset* get() const { return ptr; }
    pv_dataset** out() { return &ptr; }
};

std::string direction_csv(const std::vector<double>& u) {
    std::string header, row;
    for (size_t i = 0; i < u.size(); ++i) {
        header += (i ? "," : "") + ("x" + std::to_string(i));
        row += (i ? "," : "") + fmt17(u[i]);
    }
    return header + "\n" + row + "\n";
}

std::string pgm_from_cells(const std::vector<pv_phase_cell>& cells, size_t num_d,
                           size_t num_n) {
    // Columns follow increasing log2 d; the bottom pixel row is the smallest n.
    std::string out = "P2\n" + std::to_string(num_d) + " " + std::to_string(num_n) + "\n255\n";
    for (size_t r = 0; r < num_n; ++r) {
        const size_t ni = num_n - 1 - r;
        for (size_t di = 0; di < num_d; ++di) {
            const double mean = cells[ni * num_d + di].mean;
            int pixel = 0;
            if (mean == mean) {
                pixel = static_cast<int>(std::lround(255.0 * mean));
                pixel = pixel < 0 ? 0 : pixel > 255 ? 255 : pixel;
            }
            out += (di ? " " : "") + std::to_string(pixel);
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

struct GenerateOpts {
    std::string dist = "ic", ambient = "gaussian";
    int64_t d = 16, n = 256;
    double p = 0.1, delta = 3.0, lambda = 1.0;
    uint64_t seed = 0;
    std::string out_dir = ".", name = "data", config_path;
};

void setup_generate(CLI::App& app, const json& cfg) {
    auto o = std::make_shared<GenerateOpts>();
    config_default(cfg, "dist", o->dist);
    config_default(cfg, "ambient", o->ambient);
    config_default(cfg, "d", o->d);
    config_default(cfg, "n", o->n);
    config_default(cfg, "p", o->p);
    config_default(cfg, "delta", o->delta);
    config_default(cfg, "lambda", o->lambda);
    config_default(cfg, "seed", o->seed);
    config_default(cfg, "out", o->out_dir);
    config_default(cfg, "name", o->name);

    app.add_option("--dist", o->dist, "ic, br, gms, mixshift, aniso");
    app.add_option("--ambient", o->ambient, "gaussian, rademacher, t2, skewnormal");
    app.add_option("--d", o->d);
    app.add_option("--n", o->n);
    app.add_option("--p", o->p);
    app.add_option("--delta", o->delta, "mixture shift magnitude (mixshift)");
    app.add_option("--lambda", o->lambda, "minority covariance scale (mixshift, aniso)");
    app.add_option("--seed", o->seed);
    app.add_option("--out", o->out_dir);
    app.add_option("--name", o->name, "basename of the emitted files");
    app.add_option("--config", o->config_path);

    app.callback([o]() {
        DatasetHandle data;
        json sidecar{{"dist", o->dist}, {"d", o->d},       {"n", o->n},
                     {"p", o->p},       {"seed", o->seed}, {"ambient", o->ambient}};
        if (o->dist == "mixshift") {
            sidecar["delta"] = o->delta;
            sidecar["lambda"] = o->lambda;
            check(pv_dataset_mixture_shift(o->n, o->d, o->p, o->delta, o->lambda, o->seed,
                                           data.out()));
        } else if (o->dist == "aniso") {
            sidecar["lambda"] = o->lambda;
            check(pv_dataset_anisotropic(o->n, o->d, o->p, o->lambda, o->seed, data.out()));
        } else {
            pv_planted_spec spec{};
            spec.d = o->d;
            if (o->dist == "ic") spec.signal = PV_SIGNAL_IMBALANCED_CLUSTERS;
            else if (o->dist == "br") spec.signal = PV_SIGNAL_BERNOULLI_RADEMACHER;
            else if (o->dist == "gms") spec.signal = PV_SIGNAL_GAUSSIAN_MIXTURE_SHIFT;
            else die(2, "unknown dist '" + o->dist + "' (valid: ic, br, gms, mixshift, aniso)");
            spec.p = o->p;
            spec.ambient = parse_ambient(o->ambient);
            check(pv_dataset_planted(&spec, o->n, o->seed, data.out()));
        }
        if (pv_dataset_has_true_direction(data.get())) {
            std::vector<double> u(pv_dataset_dim(data.get()));
            check(pv_dataset_true_direction(data.get(), u.data()));
            sidecar["u_star"] = u;
        }
        const std::string base = o->out_dir + "/" + o->name;
        check(pv_dataset_save_csv(data.get(), (base + ".csv").c_str()));
        write_text(base + ".json", sidecar.dump(2) + "\n");
        log_line("wrote " + base + ".csv");
    });
}

struct PursueOpts {
    std::string input, index = "relu2", psi, strategy = "auto";
    int64_t batch = 0, n_init = 0, steps = 0;
    double eta1 = 0.0, eta2 = 0.0, p = 0.0;
    uint64_t seed = 0;
    std::string out_dir = ".", name = "run", config_path;
};

void setup_pursue(CLI::App& app, const json& cfg) {
    auto o = std::make_shared<PursueOpts>();
    config_default(cfg, "input", o->input);
    config_default(cfg, "index", o->index);
    config_default(cfg, "psi", o->psi);
    config_default(cfg, "strategy", o->strategy);
    config_default(cfg, "batch", o->batch);
    config_default(cfg, "n_init", o->n_init);
    config_default(cfg, "steps", o->steps);
    config_default(cfg, "eta1", o->eta1);
    config_default(cfg, "eta2", o->eta2);
    config_default(cfg, "p", o->p);
    config_default(cfg, "seed", o->seed);
    config_default(cfg, "out", o->out_dir);
    config_default(cfg, "name", o->name);

    app.add_option("--input", o->input, "dataset CSV")->required(!cfg.contains("input"));
    app.add_option("--index", o->index, "ascent objective phi");
    app.add_option("--psi", o->psi, "selection score (default: pairing for phi)");
    app.add_option("--strategy", o->strategy, "auto, fresh, resample");
    app.add_option("--batch", o->batch, "0 derives from the dataset");
    app.add_option("--n-init", o->n_init);
    app.add_option("--steps", o->steps);
    app.add_option("--eta1", o->eta1);
    app.add_option("--eta2", o->eta2);
    app.add_option("--p", o->p, "imbalance hint for the step-size recipe");
    app.add_option("--seed", o->seed);
    app.add_option("--out", o->out_dir);
    app.add_option("--name", o->name);
    app.add_option("--config", o->config_path);

    app.callback([o]() {
        require_method(o->index);
        if (!o->psi.empty()) require_method(o->psi);
        DatasetHandle data;
        check(pv_dataset_load_csv(o->input.c_str(), data.out()));

        // Sidecar JSON next to the CSV supplies the ground truth when present.
        std::string sidecar_path = o->input;
        if (sidecar_path.size() > 4 && sidecar_path.substr(sidecar_path.size() - 4) == ".csv")
            sidecar_path = sidecar_path.substr(0, sidecar_path.size() - 4) + ".json";
        std::ifstream side(sidecar_path);
        if (side) {
            json doc;
            try {
                side >> doc;
            } catch (const std::exception&) {
                doc = json::object();
            }
            if (doc.contains("u_star")) {
                auto u = doc.at("u_star").get<std::vector<double>>();
                if (static_cast<int64_t>(u.size()) == pv_dataset_dim(data.get()))
                    check(pv_dataset_set_true_direction(data.get(), u.data()));
            }
        }

        pv_pursuit_config pc{};
        pc.batch_size = o->batch;
        pc.n_init = o->n_init;
        pc.steps = o->steps;
        pc.eta1 = o->eta1;
        pc.eta2 = o->eta2;
        pc.phi = o->index.c_str();
        pc.psi = o->psi.empty() ? nullptr : o->psi.c_str();
        if (o->strategy == "fresh") pc.strategy = PV_BATCH_FRESH_SLICES;
        else if (o->strategy == "resample") pc.strategy = PV_BATCH_RESAMPLE;
        else if (o->strategy == "auto") pc.strategy = PV_BATCH_AUTO;
        else die(2, "unknown strategy '" + o->strategy + "' (valid: auto, fresh, resample)");
        pc.p_hint = o->p;
        pc.seed = o->seed;

        pv_run_result* result = nullptr;
        check(pv_two_step(data.get(), &pc, &result));
        std::vector<double> u(pv_run_result_dim(result));
        check(pv_run_result_direction(result, u.data()));
        char* report = nullptr;
        check(pv_run_result_report_json(result, &report));
        const std::string base = o->out_dir + "/" + o->name;
        write_text(base + "_report.json", std::string(report) + "\n");
        write_text(base + "_direction.csv", direction_csv(u));
        pv_string_free(report);
        pv_run_result_free(result);
        log_line("wrote " + base + "_report.json");
    });
}

struct PhaseOpts {
    std::vector<int64_t> d_values = {16, 32, 64}, n_values = {256, 1024, 4096};
    double p_exp = -0.5, p_const = 0.0;
    bool constant_p = false, csv_only = false;
    int trials = 10, jobs = 1;
    std::string method = "relu2", signal = "ic";
    uint64_t seed = 0;
    std::string out_dir = ".", name = "phase", config_path;
    CLI::Option* p_const_opt = nullptr;
};

void setup_phase(CLI::App& app, const json& cfg) {
    auto o = std::make_shared<PhaseOpts>();
    config_default(cfg, "d", o->d_values);
    config_default(cfg, "n", o->n_values);
    config_default(cfg, "p_exp", o->p_exp);
    if (cfg.contains("p_const")) {
        o->constant_p = true;
        config_default(cfg, "p_const", o->p_const);
    }
    config_default(cfg, "trials", o->trials);
    config_default(cfg, "jobs", o->jobs);
    config_default(cfg, "method", o->method);
    config_default(cfg, "signal", o->signal);
    config_default(cfg, "seed", o->seed);
    config_default(cfg, "out", o->out_dir);
    config_default(cfg, "name", o->name);
    config_default(cfg, "csv_only", o->csv_only);

    app.add_option("--d", o->d_values, "dimension grid");
    app.add_option("--n", o->n_values, "total sample budgets");
    app.add_option("--p-exp", o->p_exp, "p = d^exp");
    o->p_const_opt = app.add_option("--p-const", o->p_const, "constant p overriding --p-exp");
    app.add_option("--trials", o->trials);
    app.add_option("--jobs", o->jobs);
    app.add_option("--method", o->method);
    app.add_option("--signal", o->signal, "ic, br, gms");
    app.add_option("--seed", o->seed);
    app.add_option("--out", o->out_dir);
    app.add_option("--name", o->name);
    app.add_flag("--csv-only", o->csv_only, "skip the PGM heatmap");
    app.add_option("--config", o->config_path);

    app.callback([o]() {
        require_method(o->method);
        const bool const_p = o->constant_p || o->p_const_opt->count() > 0;
        auto ds = o->d_values;
        auto ns = o->n_values;
        std::sort(ds.begin(), ds.end());
        std::sort(ns.begin(), ns.end());

        pv_phase_spec spec{};
        spec.d_values = ds.data();
        spec.num_d = ds.size();
        spec.n_values = ns.data();
        spec.num_n = ns.size();
        spec.p_power_law = const_p ? 0 : 1;
        spec.p_param = const_p ? o->p_const : o->p_exp;
        spec.trials = o->trials;
        spec.method = o->method.c_str();
        spec.signal = parse_signal(o->signal);
        spec.seed = o->seed;
        spec.jobs = o->jobs;

        pv_phase_result* result = nullptr;
        check(pv_run_phase_grid(&spec, &result));
        const size_t cells = pv_phase_result_cells(result);
        std::vector<pv_phase_cell> grid(cells);
        for (size_t i = 0; i < cells; ++i) check(pv_phase_result_cell(result, i, &grid[i]));
        pv_phase_result_free(result);

        std::string csv = "d,n,p,mean,std,trials\n";
        for (const auto& c : grid)
            csv += std::to_string(c.d) + "," + std::to_string(c.n) + "," + fmt17(c.p) + "," +
                   fmt17(c.mean) + "," + fmt17(c.stddev) + "," + std::to_string(c.trials) +
                   "\n";
        const std::string base = o->out_dir + "/" + o->name;
        write_text(base + ".csv", csv);
        if (!o->csv_only)
            write_text(base + ".pgm", pgm_from_cells(grid, ds.size(), ns.size()));
        log_line("wrote " + base + ".csv");
    });
}

struct CompareOpts {
    int64_t d = 100;
    double p = 0.1;
    std::vector<int64_t> n_values = {512, 1024, 2048, 4096};
    std::vector<std::string> methods = {"relu2"};
    int trials = 30, jobs = 1;
    std::string signal = "ic";
    uint64_t seed = 0;
    std::string out_dir = ".", name = "compare", config_path;
};

void setup_compare(CLI::App& app, const json& cfg) {
    auto o = std::make_shared<CompareOpts>();
    config_default(cfg, "d", o->d);
    config_default(cfg, "p", o->p);
    config_default(cfg, "n", o->n_values);
    config_default(cfg, "methods", o->methods);
    config_default(cfg, "trials", o->trials);
    config_default(cfg, "jobs", o->jobs);
    config_default(cfg, "signal", o->signal);
    config_default(cfg, "seed", o->seed);
    config_default(cfg, "out", o->out_dir);
    config_default(cfg, "name", o->name);

    app.add_option("--d", o->d);
    app.add_option("--p", o->p);
    app.add_option("--n", o->n_values, "sample sizes");
    app.add_option("--methods", o->methods, "index or spectral tags");
    app.add_option("--trials", o->trials);
    app.add_option("--jobs", o->jobs);
    app.add_option("--signal", o->signal, "ic, br, gms");
    app.add_option("--seed", o->seed);
    app.add_option("--out", o->out_dir);
    app.add_option("--name", o->name);
    app.add_option("--config", o->config_path);

    app.callback([o]() {
        for (const auto& m : o->methods) require_method(m);
        std::vector<const char*> tags;
        for (const auto& m : o->methods) tags.push_back(m.c_str());

        pv_compare_spec spec{};
        spec.d = o->d;
        spec.p = o->p;
        spec.signal = parse_signal(o->signal);
        spec.n_values = o->n_values.data();
        spec.num_n = o->n_values.size();
        spec.methods = tags.data();
        spec.num_methods = tags.size();
        spec.trials = o->trials;
        spec.seed = o->seed;
        spec.jobs = o->jobs;

        pv_compare_result* result = nullptr;
        check(pv_run_compare(&spec, &result));
        std::string csv = "method,n,mean,std,trials\n";
        for (size_t i = 0; i < pv_compare_result_rows(result); ++i) {
            pv_compare_row row{};
            check(pv_compare_result_row(result, i, &row));
            csv += std::string(row.method) + "," + std::to_string(row.n) + "," +
                   fmt17(row.mean) + "," + fmt17(row.stddev) + "," +
                   std::to_string(row.trials) + "\n";
        }
        pv_compare_result_free(result);
        const std::string base = o->out_dir + "/" + o->name;
        write_text(base + ".csv", csv);
        log_line("wrote " + base + ".csv");
    });
}

struct IgOpts {
    std::string train, holdout, method = "relu2";
    double holdout_frac = 0.3;
    int64_t pca_k = 100, n_init = 500, directions = 30;
    bool whiten = false;
    uint64_t seed = 0;
    std::string out_dir = ".", name = "ig", config_path;
};

void setup_ig(CLI::App& app, const json& cfg) {
    auto o = std::make_shared<IgOpts>();
    config_default(cfg, "train", o->train);
    config_default(cfg, "holdout", o->holdout);
    config_default(cfg, "method", o->method);
    config_default(cfg, "holdout_frac", o->holdout_frac);
    config_default(cfg, "pca_k", o->pca_k);
    config_default(cfg, "n_init", o->n_init);
    config_default(cfg, "directions", o->directions);
    config_default(cfg, "whiten", o->whiten);
    config_default(cfg, "seed", o->seed);
    config_default(cfg, "out", o->out_dir);
    config_default(cfg, "name", o->name);

    app.add_option("--train", o->train, "labeled CSV")->required(!cfg.contains("train"));
    app.add_option("--holdout", o->holdout, "labeled CSV; absent: split --train");
    app.add_option("--holdout-frac", o->holdout_frac, "tail fraction held out when splitting");
    app.add_option("--method", o->method);
    app.add_option("--pca-k", o->pca_k, "0 disables PCA");
    app.add_option("--n-init", o->n_init);
    app.add_option("--directions", o->directions);
    app.add_flag("--whiten", o->whiten);
    app.add_option("--seed", o->seed);
    app.add_option("--out", o->out_dir);
    app.add_option("--name", o->name);
    app.add_option("--config", o->config_path);

    app.callback([o]() {
        require_method(o->method);
        if (o->holdout_frac <= 0.0 || o->holdout_frac >= 1.0)
            die(2, "--holdout-frac must lie strictly between 0 and 1");
        DatasetHandle train_set, holdout_set;
        check(pv_dataset_load_csv(o->train.c_str(), train_set.out()));
        if (!pv_dataset_has_labels(train_set.get()))
            die(2, "information gain needs labeled data: " + o->train +
                       " has no label column");
        if (!o->holdout.empty()) {
            check(pv_dataset_load_csv(o->holdout.c_str(), holdout_set.out()));
            if (!pv_dataset_has_labels(holdout_set.get()))
                die(2, "information gain needs labeled data: " + o->holdout +
                           " has no label column");
        } else {
            const int64_t n = pv_dataset_rows(train_set.get());
            const auto head = static_cast<int64_t>(
                std::llround(static_cast<double>(n) * (1.0 - o->holdout_frac)));
            DatasetHandle front;
            check(pv_dataset_split(train_set.get(), head, front.out(), holdout_set.out()));
            std::swap(train_set.ptr, front.ptr);
        }

        pv_ig_spec spec{};
        spec.method = o->method.c_str();
        spec.pca_k = o->pca_k;
        spec.whiten = o->whiten ? 1 : 0;
        spec.n_init = o->n_init;
        spec.directions = o->directions;
        spec.seed = o->seed;

        char* report = nullptr;
        check(pv_run_ig(train_set.get(), holdout_set.get(), &spec, &report));
        json doc = json::parse(report);
        if (doc.value("single_class", false))
            std::fprintf(stderr, "warning: single-class data, all information gains are 0\n");
        const std::string base = o->out_dir + "/" + o->name;
        write_text(base + ".json", std::string(report) + "\n");
        pv_string_free(report);
        log_line("wrote " + base + ".json");
    });
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("PURSUIT_LOG"); env && *env) g_verbose = true;
    const json cfg = load_config(argc, argv);
    // Config keys mean different things per subcommand; only the invoked one
    // sees them.
    const std::string invoked = argc > 1 ? argv[1] : "";
    const auto cfg_for = [&](const std::string& name) {
        return invoked == name ? cfg : json::object();
    };

    CLI::App app{"Projection pursuit for planted non-Gaussian directions"};
    app.require_subcommand(1);
    setup_generate(*app.add_subcommand("generate", "sample a synthetic dataset"),
                   cfg_for("generate"));
    setup_pursue(*app.add_subcommand("pursue", "recover a direction by gradient ascent"),
                 cfg_for("pursue"));
    setup_phase(*app.add_subcommand("phase", "phase-transition grid and heatmap"),
                cfg_for("phase"));
    setup_compare(*app.add_subcommand("compare", "method comparison table"),
                  cfg_for("compare"));
    setup_ig(*app.add_subcommand("ig", "information-gain protocol on labeled data"),
             cfg_for("ig"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
