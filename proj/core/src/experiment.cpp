#include "levcode/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "levcode/coding.hpp"
#include "levcode/csvio.hpp"
#include "levcode/datasets.hpp"
#include "levcode/errors.hpp"
#include "levcode/gd.hpp"
#include "levcode/leverage.hpp"
#include "levcode/loss.hpp"
#include "levcode/partition.hpp"
#include "levcode/rng.hpp"
#include "levcode/simulate.hpp"
#include "levcode/sketch.hpp"
#include "levcode/svd.hpp"

namespace levcode {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InvalidInputError("config: cannot parse " + key + " = '" + value + "' as integer");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument("bad");
        return v;
    } catch (const std::exception&) {
        throw InvalidInputError("config: cannot parse " + key + " = '" + value + "' as number");
    }
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string opt_str(const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : "unset";
}

std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

std::ofstream open_csv(const ExperimentConfig& cfg, const std::string& name) {
    const auto path = out_path(cfg, name);
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path.string());
    return out;
}

void require_seed(const std::optional<std::uint64_t>& seed, const std::string& name) {
    if (!seed)
        throw InvalidInputError("missing required seed '" + name +
                                "' (seeds have no defaults; pass --" + name + " or set it in the "
                                "config file)");
}

std::vector<bool> variant_list(const ExperimentConfig& cfg) {
    if (cfg.weighted == "on") return {true};
    if (cfg.weighted == "off") return {false};
    if (cfg.weighted == "both") return {true, false};
    throw InvalidInputError("config: weighted must be one of on/off/both, got '" + cfg.weighted +
                            "'");
}

const char* variant_name(bool weighted) { return weighted ? "weighted" : "unweighted"; }

GdConfig resolved_gd(const ExperimentConfig& cfg, double def_step, double def_tol,
                     std::size_t def_iters) {
    GdConfig g;
    g.step = cfg.step.value_or(def_step);
    g.grad_tol = cfg.grad_tol.value_or(def_tol);
    g.max_iters = cfg.max_iters.value_or(def_iters);
    return g;
}

Vec ones(std::size_t n) { return Vec(n, 1.0); }

Vec weights_as_doubles(const SketchPlan& sp) {
    Vec w(sp.weights.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(sp.weights[j]);
    return w;
}

/// Row leverage scores for either orientation: tall matrices factor
/// directly, wide ones through the transpose (the left singular vectors of
/// X are the right singular vectors of X^T).
LeverageProfile row_leverage_profile(const Mat& x) {
    if (x.rows() >= x.cols()) return leverage_profile(x);
    const SvdResult svd_t = reduced_svd(transpose(x));
    LeverageProfile prof;
    prof.rank = numerical_rank(svd_t.sigma);
    prof.ell.assign(x.rows(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < prof.rank; ++j) s += svd_t.V(i, j) * svd_t.V(i, j);
        prof.ell[i] = s;
    }
    return prof;
}

/// Max |a_I^T B_I - 1| over `count` sampled responder sets; stamped into
/// summary CSVs so every output records how well its scheme decoded.
double sampled_code_residual(const CodingScheme& scheme, std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const CodingParams& pr = scheme.params;
    std::vector<std::size_t> all(pr.n);
    std::iota(all.begin(), all.end(), 0);
    double worst = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
        rng.shuffle(all);
        std::vector<std::size_t> subset(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(pr.f));
        std::sort(subset.begin(), subset.end());
        const DecodeVector dv = decode_vector(scheme, subset);
        for (std::size_t j = 0; j < pr.k; ++j) {
            Complex acc{0.0, 0.0};
            for (std::size_t i = 0; i < pr.f; ++i) acc += dv.a[i] * scheme.B(subset[i], j);
            worst = std::max(worst, std::abs(acc - Complex{1.0, 0.0}));
        }
    }
    return worst;
}

/// Binomial coefficient, saturating at `cap`.
std::size_t choose_capped(std::size_t n, std::size_t r, std::size_t cap) {
    r = std::min(r, n - r);
    long double acc = 1.0L;
    for (std::size_t i = 1; i <= r; ++i) {
        acc = acc * static_cast<long double>(n - r + i) / static_cast<long double>(i);
        if (acc > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<std::size_t>(acc + 0.5L);
}

bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
    const std::size_t f = comb.size();
    std::size_t i = f;
    while (i-- > 0) {
        if (comb[i] != i + n - f) {
            ++comb[i];
            for (std::size_t j = i + 1; j < f; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

void write_trace_csv(const ExperimentConfig& cfg, const std::string& name, const GdTrace& trace) {
    std::ofstream out = open_csv(cfg, name);
    const std::vector<std::string> header = {"iteration", "grad_norm", "loss", "responders"};
    write_csv_row(out, header);
    for (const GdRecord& rec : trace.records) {
        std::string responders;
        for (std::size_t i = 0; i < rec.responders.size(); ++i) {
            if (i) responders += ';';
            responders += std::to_string(rec.responders[i]);
        }
        const std::vector<std::string> row = {std::to_string(rec.iter), csv_double(rec.grad_norm),
                                              csv_double(rec.loss), responders};
        write_csv_row(out, row);
    }
}

struct RunOutcome {
    GdTrace trace;
    bool diverged = false;
};

RunOutcome run_network_variant(const LossModel& model, const PartitionPlan& plan,
                               const SketchPlan& sp, const Vec& weights,
                               const CodingScheme& scheme, const GdConfig& gdc,
                               std::uint64_t straggler_seed) {
    RunOutcome out;
    const StragglerModel straggler = StragglerModel::uniform(scheme.params.s);
    try {
        out.trace = run_distributed_gd(model, plan, sp, weights, scheme, gdc, straggler,
                                       straggler_seed);
    } catch (DivergenceError& e) {
        out.trace = std::move(e.trace);
        out.diverged = true;
    }
    return out;
}

struct MeanTraceAccumulator {
    std::vector<double> sums;
    std::vector<std::size_t> counts;

    void add(const GdTrace& trace) {
        if (trace.records.size() > sums.size()) {
            sums.resize(trace.records.size(), 0.0);
            counts.resize(trace.records.size(), 0);
        }
        for (std::size_t i = 0; i < trace.records.size(); ++i) {
            sums[i] += trace.records[i].grad_norm;
            ++counts[i];
        }
    }
};

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError(path + ":" + std::to_string(lineno) +
                                    ": expected key=value, got '" + line + "'");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n") {
        cfg.n = parse_u64(key, value);
    } else if (key == "k") {
        cfg.k = parse_u64(key, value);
    } else if (key == "d") {
        cfg.d = parse_u64(key, value);
    } else if (key == "rho") {
        std::vector<std::size_t> rhos;
        for (const std::string& part : split(value, ',')) {
            const std::uint64_t r = parse_u64(key, trim(part));
            if (r == 0) throw InvalidInputError("config: rho must be >= 1");
            rhos.push_back(r);
        }
        cfg.rhos = std::move(rhos);
    } else if (key == "runs") {
        cfg.runs = parse_u64(key, value);
    } else if (key == "checks") {
        cfg.checks = parse_u64(key, value);
    } else if (key == "limit") {
        cfg.limit = parse_u64(key, value);
    } else if (key == "classes") {
        const auto parts = split(value, ',');
        if (parts.size() != 2)
            throw InvalidInputError("config: classes must be two comma-separated digits");
        cfg.classes = {static_cast<int>(parse_u64(key, trim(parts[0]))),
                       static_cast<int>(parse_u64(key, trim(parts[1])))};
    } else if (key == "weighted") {
        cfg.weighted = value;
    } else if (key == "step") {
        cfg.step = parse_double(key, value);
    } else if (key == "tol") {
        cfg.grad_tol = parse_double(key, value);
    } else if (key == "max-iters") {
        cfg.max_iters = parse_u64(key, value);
    } else if (key == "seed-data") {
        cfg.seed_data = parse_u64(key, value);
    } else if (key == "seed-sampler") {
        cfg.seed_sampler = parse_u64(key, value);
    } else if (key == "seed-straggler") {
        cfg.seed_straggler = parse_u64(key, value);
    } else if (key == "mnist-images") {
        cfg.mnist_images = value;
    } else if (key == "mnist-labels") {
        cfg.mnist_labels = value;
    } else if (key == "mnist-test-images") {
        cfg.mnist_test_images = value;
    } else if (key == "mnist-test-labels") {
        cfg.mnist_test_labels = value;
    } else if (key == "out") {
        cfg.out_dir = value;
    } else {
        throw InvalidInputError("config: unknown key '" + key + "'");
    }
}

std::string canonical_config(const ExperimentConfig& cfg) {
    std::ostringstream s;
    s << "n=" << cfg.n << "\nk=" << cfg.k << "\nd=" << cfg.d << "\nrho=" << join_sizes(cfg.rhos)
      << "\nruns=" << cfg.runs << "\nchecks=" << cfg.checks << "\nlimit=" << cfg.limit
      << "\nclasses=" << cfg.classes.first << "," << cfg.classes.second
      << "\nweighted=" << cfg.weighted << "\nstep=" << (cfg.step ? csv_double(*cfg.step) : "unset")
      << "\ntol=" << (cfg.grad_tol ? csv_double(*cfg.grad_tol) : "unset")
      << "\nmax-iters=" << (cfg.max_iters ? std::to_string(*cfg.max_iters) : "unset")
      << "\nseed-data=" << opt_str(cfg.seed_data) << "\nseed-sampler=" << opt_str(cfg.seed_sampler)
      << "\nseed-straggler=" << opt_str(cfg.seed_straggler)
      << "\nmnist-images=" << cfg.mnist_images << "\nmnist-labels=" << cfg.mnist_labels
      << "\nmnist-test-images=" << cfg.mnist_test_images
      << "\nmnist-test-labels=" << cfg.mnist_test_labels << "\n";
    return s.str();
}

std::string config_digest(const ExperimentConfig& cfg) {
    // FNV-1a 64 over the canonical serialization (out dir excluded: the same
    // experiment written elsewhere is still the same experiment).
    const std::string canon = canonical_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int cmd_code_check(const ExperimentConfig& cfg, std::ostream& log) {
    require_seed(cfg.seed_sampler, "seed-sampler");
    const CodingParams params = validate_params(cfg.n, cfg.k, cfg.d);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));

    SplitMix64 wrng(SplitMix64::derive(*cfg.seed_sampler, 7));
    Vec wvec(params.k);
    for (double& v : wvec) v = wrng.next_uniform(0.5, 2.5);
    double wmax = 0.0;
    for (double v : wvec) wmax = std::max(wmax, std::abs(v));

    const bool exhaustive = choose_capped(params.n, params.f, 10000) <= 10000;
    std::size_t checked = 0;
    std::size_t warnings = 0;
    double max_unweighted = 0.0;
    double max_weighted_rel = 0.0;

    const auto check_subset = [&](const std::vector<std::size_t>& subset) {
        const DecodeVector dv = decode_vector(scheme, subset);
        if (dv.conditioning_warning) ++warnings;
        for (std::size_t j = 0; j < params.k; ++j) {
            Complex acc{0.0, 0.0};
            for (std::size_t i = 0; i < params.f; ++i) acc += dv.a[i] * scheme.B(subset[i], j);
            max_unweighted = std::max(max_unweighted, std::abs(acc - Complex{1.0, 0.0}));
            max_weighted_rel =
                std::max(max_weighted_rel, std::abs(acc * wvec[j] - Complex{wvec[j], 0.0}) / wmax);
        }
        ++checked;
    };

    if (exhaustive) {
        std::vector<std::size_t> comb(params.f);
        std::iota(comb.begin(), comb.end(), 0);
        do {
            check_subset(comb);
        } while (next_combination(comb, params.n));
    } else {
        SplitMix64 rng(SplitMix64::derive(*cfg.seed_sampler, 11));
        std::vector<std::size_t> all(params.n);
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t t = 0; t < cfg.checks; ++t) {
            rng.shuffle(all);
            std::vector<std::size_t> subset(all.begin(),
                                            all.begin() + static_cast<std::ptrdiff_t>(params.f));
            std::sort(subset.begin(), subset.end());
            check_subset(subset);
        }
    }

    std::ofstream out = open_csv(cfg, "code_check.csv");
    const std::vector<std::string> header = {
        "n", "k", "d", "w_supp", "s", "f", "subsets_checked", "exhaustive",
        "max_residual_unweighted", "max_residual_weighted_rel", "conditioning_warnings",
        "config_digest", "seed_sampler"};
    write_csv_row(out, header);
    const std::vector<std::string> row = {
        std::to_string(params.n), std::to_string(params.k), std::to_string(params.d),
        std::to_string(params.w_supp), std::to_string(params.s), std::to_string(params.f),
        std::to_string(checked), exhaustive ? "1" : "0", csv_double(max_unweighted),
        csv_double(max_weighted_rel), std::to_string(warnings), config_digest(cfg),
        std::to_string(*cfg.seed_sampler)};
    write_csv_row(out, row);

    log << "code-check (n=" << params.n << ", k=" << params.k << ", d=" << params.d
        << ", w=" << params.w_supp << ", f=" << params.f << "): " << checked << " responder sets ("
        << (exhaustive ? "exhaustive" : "sampled") << ")\n"
        << "  max unweighted residual  " << csv_double(max_unweighted) << "\n"
        << "  max weighted residual    " << csv_double(max_weighted_rel) << " (relative)\n";
    return 0;
}

int cmd_regression(const ExperimentConfig& cfg, std::ostream& log) {
    require_seed(cfg.seed_data, "seed-data");
    require_seed(cfg.seed_sampler, "seed-sampler");
    require_seed(cfg.seed_straggler, "seed-straggler");
    if (cfg.runs == 0) throw InvalidInputError("regression: runs must be >= 1");

    const CodingParams params = validate_params(cfg.n, cfg.k, cfg.d);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const double code_res =
        sampled_code_residual(scheme, 20, SplitMix64::derive(*cfg.seed_sampler, 0x5EED));
    const GdConfig gdc = resolved_gd(cfg, 1e-7, 0.1, 5000);
    const std::vector<bool> variants = variant_list(cfg);
    const std::string digest = config_digest(cfg);

    std::ofstream summary = open_csv(cfg, "regression_summary.csv");
    const std::vector<std::string> header = {
        "kind", "rho", "variant", "run", "iterations", "converged", "error",
        "conditioning_warnings", "code_residual", "config_digest", "seed_data", "seed_sampler",
        "seed_straggler"};
    write_csv_row(summary, header);

    std::ofstream mean_trace = open_csv(cfg, "regression_trace_mean.csv");
    const std::vector<std::string> mt_header = {"rho", "variant", "iteration", "mean_grad_norm",
                                                "runs_active"};
    write_csv_row(mean_trace, mt_header);

    for (std::size_t rho : cfg.rhos) {
        const std::size_t K = rho * params.k;
        struct Agg {
            double iters = 0.0;
            double errs = 0.0;
            std::size_t converged = 0;
            std::size_t diverged = 0;
            std::size_t warnings = 0;
            MeanTraceAccumulator mt;
        };
        std::vector<Agg> agg(variants.size());

        for (std::size_t run = 0; run < cfg.runs; ++run) {
            const SynthRegression synth = synth_regression(SplitMix64::derive(*cfg.seed_data, run));
            const Dataset ds = truncate_to_multiple(synth.data, K);
            const std::size_t N = ds.X.rows();

            const SvdResult svd = reduced_svd(ds.X);
            const LeverageProfile prof = leverage_profile(svd);
            if (prof.rank < ds.X.cols())
                throw RankDeficiencyError("regression: data matrix is rank deficient (rank " +
                                              std::to_string(prof.rank) + ")",
                                          prof.rank);
            const Vec pi = normalize_scores(prof.ell);
            const PartitionPlan plan = make_partition(N, K, pi);
            const SketchPlan sp =
                (rho == 1) ? identity_sketch(plan)
                           : sample_weighted(plan, params.k,
                                             SplitMix64::derive(*cfg.seed_sampler,
                                                                rho * 1000003 + run));
            const Vec theta_ols = pinv_solve(svd, ds.y);
            const LossModel model = LossModel::least_squares(ds.X, ds.y);

            for (std::size_t v = 0; v < variants.size(); ++v) {
                const bool weighted = variants[v];
                const Vec w = weighted ? weights_as_doubles(sp) : ones(sp.distinct_parts.size());
                const RunOutcome rc = run_network_variant(
                    model, plan, sp, w, scheme, gdc,
                    SplitMix64::derive(*cfg.seed_straggler, (rho * 1000003 + run) * 2 + v));

                double err = std::numeric_limits<double>::quiet_NaN();
                if (!rc.diverged) {
                    double sq = 0.0;
                    for (std::size_t j = 0; j < theta_ols.size(); ++j) {
                        const double dm = rc.trace.final_theta[j] - theta_ols[j];
                        sq += dm * dm;
                    }
                    err = sq;
                }

                write_trace_csv(cfg,
                                "regression_trace_rho" + std::to_string(rho) + "_" +
                                    variant_name(weighted) + "_run" + std::to_string(run) + ".csv",
                                rc.trace);

                const std::vector<std::string> row = {
                    rc.diverged ? "diverged" : "run", std::to_string(rho), variant_name(weighted),
                    std::to_string(run), std::to_string(rc.trace.iterations),
                    rc.trace.converged ? "1" : "0", csv_double(err),
                    std::to_string(rc.trace.conditioning_warnings), csv_double(code_res), digest,
                    std::to_string(*cfg.seed_data), std::to_string(*cfg.seed_sampler),
                    std::to_string(*cfg.seed_straggler)};
                write_csv_row(summary, row);

                Agg& a = agg[v];
                if (rc.diverged) {
                    ++a.diverged;
                } else {
                    a.iters += static_cast<double>(rc.trace.iterations);
                    a.errs += err;
                    if (rc.trace.converged) ++a.converged;
                }
                a.warnings += rc.trace.conditioning_warnings;
                a.mt.add(rc.trace);
            }
        }

        for (std::size_t v = 0; v < variants.size(); ++v) {
            const Agg& a = agg[v];
            const double denom = static_cast<double>(cfg.runs - a.diverged);
            const double mean_iters = denom > 0 ? a.iters / denom : 0.0;
            const double mean_err = denom > 0 ? a.errs / denom : 0.0;
            const std::vector<std::string> row = {
                "mean", std::to_string(rho), variant_name(variants[v]), "",
                csv_double(mean_iters), std::to_string(a.converged), csv_double(mean_err),
                std::to_string(a.warnings), csv_double(code_res), digest,
                std::to_string(*cfg.seed_data), std::to_string(*cfg.seed_sampler),
                std::to_string(*cfg.seed_straggler)};
            write_csv_row(summary, row);
            log << "regression rho=" << rho << " " << variant_name(variants[v])
                << ": mean iterations " << csv_double(mean_iters) << ", mean error "
                << csv_double(mean_err) << ", converged " << a.converged << "/" << cfg.runs
                << (a.diverged ? (", diverged " + std::to_string(a.diverged)) : "") << "\n";

            for (std::size_t i = 0; i < a.mt.sums.size(); ++i) {
                const std::vector<std::string> mt_row = {
                    std::to_string(rho), variant_name(variants[v]), std::to_string(i),
                    csv_double(a.mt.sums[i] / static_cast<double>(a.mt.counts[i])),
                    std::to_string(a.mt.counts[i])};
                write_csv_row(mean_trace, mt_row);
            }
        }
    }
    return 0;
}

int cmd_mnist(const ExperimentConfig& cfg, std::ostream& log) {
    require_seed(cfg.seed_sampler, "seed-sampler");
    require_seed(cfg.seed_straggler, "seed-straggler");
    if (cfg.mnist_images.empty() || cfg.mnist_labels.empty() || cfg.mnist_test_images.empty() ||
        cfg.mnist_test_labels.empty()) {
        throw InvalidInputError(
            "mnist: need --mnist-images, --mnist-labels, --mnist-test-images and "
            "--mnist-test-labels");
    }
    if (cfg.runs == 0) throw InvalidInputError("mnist: runs must be >= 1");

    const CodingParams params = validate_params(cfg.n, cfg.k, cfg.d);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const double code_res =
        sampled_code_residual(scheme, 20, SplitMix64::derive(*cfg.seed_sampler, 0x5EED));
    const GdConfig gdc = resolved_gd(cfg, 1e-5, 5.0, 2000);
    const std::vector<bool> variants = variant_list(cfg);
    const std::string digest = config_digest(cfg);

    Dataset train = load_mnist(cfg.mnist_images, cfg.mnist_labels, cfg.classes, cfg.limit);
    const Dataset test = load_mnist(cfg.mnist_test_images, cfg.mnist_test_labels, cfg.classes,
                                    std::numeric_limits<std::size_t>::max());

    // One truncation serving every rho: N must be divisible by each K = rho*k.
    std::size_t rho_lcm = 1;
    for (std::size_t rho : cfg.rhos) rho_lcm = std::lcm(rho_lcm, rho);
    train = truncate_to_multiple(std::move(train), params.k * rho_lcm);
    const std::size_t N = train.X.rows();

    log << "mnist: " << N << " training rows, " << test.X.rows() << " test rows, p = "
        << train.X.cols() << "; computing leverage scores...\n";
    const LeverageProfile prof = row_leverage_profile(train.X);
    if (prof.rank < train.X.cols())
        log << "mnist: numerical rank " << prof.rank << " < p = " << train.X.cols()
            << " (constant pixels); scores use the rank-truncated basis\n";
    const Vec pi = normalize_scores(prof.ell);
    const LossModel model = LossModel::logistic(train.X, train.y);

    const auto test_error = [&](const Vec& theta) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < test.X.rows(); ++i) {
            const double score = dot(test.X.row(i), theta);
            const double pred = score < 0.0 ? -1.0 : 1.0;
            if (pred != test.y[i]) ++wrong;
        }
        return static_cast<double>(wrong) / static_cast<double>(test.X.rows());
    };

    std::ofstream summary = open_csv(cfg, "mnist_summary.csv");
    const std::vector<std::string> header = {
        "kind", "rho", "variant", "run", "iterations", "converged", "test_error", "test_count",
        "train_rows", "rank", "conditioning_warnings", "code_residual", "config_digest",
        "seed_sampler", "seed_straggler"};
    write_csv_row(summary, header);

    for (std::size_t rho : cfg.rhos) {
        const std::size_t K = rho * params.k;
        const PartitionPlan plan = make_partition(N, K, pi);

        std::vector<double> sum_err(variants.size(), 0.0);
        std::vector<double> sum_iters(variants.size(), 0.0);
        std::vector<std::size_t> conv(variants.size(), 0);
        std::vector<std::size_t> div(variants.size(), 0);

        for (std::size_t run = 0; run < cfg.runs; ++run) {
            const SketchPlan sp =
                (rho == 1) ? identity_sketch(plan)
                           : sample_weighted(plan, params.k,
                                             SplitMix64::derive(*cfg.seed_sampler,
                                                                rho * 1000003 + run));
            for (std::size_t v = 0; v < variants.size(); ++v) {
                const bool weighted = variants[v];
                const Vec w = weighted ? weights_as_doubles(sp) : ones(sp.distinct_parts.size());
                const RunOutcome rc = run_network_variant(
                    model, plan, sp, w, scheme, gdc,
                    SplitMix64::derive(*cfg.seed_straggler, (rho * 1000003 + run) * 2 + v));
                const double err =
                    rc.diverged ? std::numeric_limits<double>::quiet_NaN()
                                : test_error(rc.trace.final_theta);

                write_trace_csv(cfg,
                                "mnist_trace_rho" + std::to_string(rho) + "_" +
                                    variant_name(weighted) + "_run" + std::to_string(run) + ".csv",
                                rc.trace);

                const std::vector<std::string> row = {
                    rc.diverged ? "diverged" : "run", std::to_string(rho), variant_name(weighted),
                    std::to_string(run), std::to_string(rc.trace.iterations),
                    rc.trace.converged ? "1" : "0", csv_double(err),
                    std::to_string(test.X.rows()), std::to_string(N), std::to_string(prof.rank),
                    std::to_string(rc.trace.conditioning_warnings), csv_double(code_res), digest,
                    std::to_string(*cfg.seed_sampler), std::to_string(*cfg.seed_straggler)};
                write_csv_row(summary, row);

                if (rc.diverged) {
                    ++div[v];
                } else {
                    sum_err[v] += err;
                    sum_iters[v] += static_cast<double>(rc.trace.iterations);
                    if (rc.trace.converged) ++conv[v];
                }
            }
        }

        for (std::size_t v = 0; v < variants.size(); ++v) {
            const double denom = static_cast<double>(cfg.runs - div[v]);
            const double mean_err = denom > 0 ? sum_err[v] / denom : 0.0;
            const double mean_iters = denom > 0 ? sum_iters[v] / denom : 0.0;
            const std::vector<std::string> row = {
                "mean", std::to_string(rho), variant_name(variants[v]), "",
                csv_double(mean_iters), std::to_string(conv[v]), csv_double(mean_err),
                std::to_string(test.X.rows()), std::to_string(N), std::to_string(prof.rank),
                "", csv_double(code_res), digest, std::to_string(*cfg.seed_sampler),
                std::to_string(*cfg.seed_straggler)};
            write_csv_row(summary, row);
            log << "mnist rho=" << rho << " " << variant_name(variants[v]) << ": mean test error "
                << csv_double(mean_err) << ", mean iterations " << csv_double(mean_iters) << "\n";
        }
    }
    return 0;
}

int cmd_leverage(const ExperimentConfig& cfg, std::ostream& log) {
    Dataset ds;
    std::string seed_data_field = "";
    if (!cfg.mnist_images.empty() && !cfg.mnist_labels.empty()) {
        ds = load_mnist(cfg.mnist_images, cfg.mnist_labels, cfg.classes, cfg.limit);
    } else {
        require_seed(cfg.seed_data, "seed-data");
        ds = synth_regression(*cfg.seed_data).data;
        seed_data_field = std::to_string(*cfg.seed_data);
    }

    const std::size_t K = cfg.rhos.front() * cfg.k;
    ds = truncate_to_multiple(std::move(ds), K);
    const LeverageProfile prof = row_leverage_profile(ds.X);
    if (prof.rank < ds.X.cols())
        log << "leverage: numerical rank " << prof.rank << " < p = " << ds.X.cols()
            << "; scores use the rank-truncated basis\n";
    const Vec pi = normalize_scores(prof.ell);
    const PartitionPlan plan = make_partition(ds.X.rows(), K, pi);

    const auto ratio_stats = [](std::span<const double> v) {
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        std::size_t zeros = 0;
        for (double x : v) {
            if (x > 0.0) {
                mx = std::max(mx, x);
                mn = std::min(mn, x);
            } else {
                ++zeros;
            }
        }
        return std::make_pair(mn > 0.0 && mx > 0.0 ? mx / mn : 0.0, zeros);
    };
    const auto [pi_ratio, pi_zeros] = ratio_stats(pi);
    const auto [Pi_ratio, Pi_zeros] = ratio_stats(plan.Pi);

    std::ofstream scores = open_csv(cfg, "leverage_scores.csv");
    const std::vector<std::string> sc_header = {"kind", "index", "value"};
    write_csv_row(scores, sc_header);
    for (std::size_t i = 0; i < prof.ell.size(); ++i) {
        const std::vector<std::string> row = {"ell", std::to_string(i), csv_double(prof.ell[i])};
        write_csv_row(scores, row);
    }
    for (std::size_t i = 0; i < pi.size(); ++i) {
        const std::vector<std::string> row = {"pi", std::to_string(i), csv_double(pi[i])};
        write_csv_row(scores, row);
    }
    for (std::size_t i = 0; i < plan.Pi.size(); ++i) {
        const std::vector<std::string> row = {"Pi", std::to_string(i), csv_double(plan.Pi[i])};
        write_csv_row(scores, row);
    }

    std::ofstream summary = open_csv(cfg, "leverage_summary.csv");
    const std::vector<std::string> header = {
        "N", "p", "rank", "K", "pi_sum", "pi_max_min_ratio", "pi_zero_count",
        "Pi_max_min_ratio", "Pi_zero_count", "config_digest", "seed_data"};
    write_csv_row(summary, header);
    double pi_sum = 0.0;
    for (double v : pi) pi_sum += v;
    const std::vector<std::string> row = {
        std::to_string(ds.X.rows()), std::to_string(ds.X.cols()), std::to_string(prof.rank),
        std::to_string(K), csv_double(pi_sum), csv_double(pi_ratio), std::to_string(pi_zeros),
        csv_double(Pi_ratio), std::to_string(Pi_zeros), config_digest(cfg), seed_data_field};
    write_csv_row(summary, row);

    log << "leverage: N=" << ds.X.rows() << " p=" << ds.X.cols() << " rank=" << prof.rank
        << " K=" << K << "\n"
        << "  pi max/min ratio " << csv_double(pi_ratio) << " (" << pi_zeros << " zero rows)\n"
        << "  Pi max/min ratio " << csv_double(Pi_ratio) << " (" << Pi_zeros << " zero parts)\n";
    return 0;
}

}  // namespace levcode
