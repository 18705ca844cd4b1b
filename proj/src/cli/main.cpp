// cpustat: scan a series for a fixed number of change points with U-statistic
// tests, calibrated against simulated limiting quantiles.
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "cpustat/detect.hpp"
#include "cpustat/experiments.hpp"
#include "cpustat/ustat.hpp"

namespace {

using namespace cpustat;

constexpr std::uint64_t kDefaultSeed = 42;
// detection/experiment tables are auto-built under a fixed seed so every run
// (and every cache state) sees the same critical values
constexpr std::uint64_t kAutoTableSeed = 1000003;

struct IoError : core::Error {
    using core::Error::Error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw core::BadSpec("cannot parse number: '" + std::string(text) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// single column, optional header; rows like "12,0.35" keep the last field
core::Series read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file " + path);
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find_last_of(',');
        std::string_view field = trim(comma == std::string_view::npos ? row : row.substr(comma + 1));
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
            if (lineno == 1) continue;  // header
            throw core::BadSpec("line " + std::to_string(lineno) + " of " + path +
                                " is not numeric: '" + std::string(field) + "'");
        }
        values.push_back(v);
    }
    return core::Series::validate(std::move(values));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("short write to " + path);
}

nulldist::QuantileTable load_or_build_table(const std::string& cache_dir, std::size_t k,
                                            std::size_t m, std::size_t reps, std::uint64_t seed) {
    if (auto cached = nulldist::load_cached(cache_dir, k, m, reps, seed, 1)) return *cached;
    std::fprintf(stderr,
                 "note: no cached quantile table for k=%zu m=%zu reps=%zu seed=%llu;"
                 " simulating one now (stored under %s)\n",
                 k, m, reps, static_cast<unsigned long long>(seed), cache_dir.c_str());
    nulldist::QuantileTable table =
        nulldist::simulate_null_quantiles(k, m, reps, {0.01, 0.05, 0.10}, seed, 1);
    nulldist::store_cached(cache_dir, table);
    return table;
}

// re-derive the tabulated rows for the requested levels from retained samples
void retarget_levels(nulldist::QuantileTable& table, const std::vector<double>& levels) {
    nulldist::QuantileTable out = table;
    out.levels.clear();
    out.ks_q.clear();
    out.cv_q.clear();
    for (double level : levels) {
        out.levels.push_back(level);
        out.ks_q.push_back(table.ks_quantile(level));
        out.cv_q.push_back(table.cv_quantile(level));
    }
    table = std::move(out);
}

std::vector<double> parse_triple(const std::string& text) {
    std::string_view s = trim(text);
    if (!s.empty() && s.front() == '(') s.remove_prefix(1);
    if (!s.empty() && s.back() == ')') s.remove_suffix(1);
    std::vector<double> vals;
    std::size_t start = 0;
    const std::string body(s);
    while (start <= body.size()) {
        const auto comma = body.find(',', start);
        const std::string piece =
            body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        vals.push_back(parse_double(trim(piece)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (vals.size() != 3) throw core::BadSpec("expected a (mu,rho,omega) triple, got '" + text + "'");
    return vals;
}

datagen::ScenarioTag tag_from_name(const std::string& name) {
    for (datagen::ScenarioTag tag :
         {datagen::ScenarioTag::MeanMean, datagen::ScenarioTag::MeanMeanAR,
          datagen::ScenarioTag::MeanAutocorr, datagen::ScenarioTag::MeanVariance})
        if (name == datagen::tag_name(tag)) return tag;
    throw core::UnknownTag("unknown scenario '" + name +
                           "' (expected mean-mean, mean-mean-ar, mean-autocorr, mean-variance)");
}

std::string report_to_json(const core::DetectionReport& r) {
    nlohmann::json j;
    j["n"] = r.n;
    j["k"] = r.k;
    j["stride"] = r.stride;
    j["grid_tuples"] = r.grid_tuples;
    j["t1"] = r.t1;
    j["t2"] = r.t2;
    j["t1_normalized"] = r.t1_normalized;
    j["t2_normalized"] = r.t2_normalized;
    j["sigma2_hat"] = r.sigma2_hat;
    j["lrv_method"] = r.lrv_method;
    j["argmax"] = r.argmax_tuple;
    j["degenerate"] = r.degenerate;
    nlohmann::json decisions = nlohmann::json::array();
    for (const auto& [level, d] : r.decisions) {
        nlohmann::json row;
        row["level"] = level;
        row["ks_quantile"] = d.ks_quantile;
        row["cv_quantile"] = d.cv_quantile;
        row["ks_reject"] = d.ks_reject;
        row["cv_reject"] = d.cv_reject;
        decisions.push_back(row);
    }
    j["decisions"] = decisions;
    if (r.ks_pvalue) j["ks_pvalue"] = *r.ks_pvalue;
    if (r.cv_pvalue) j["cv_pvalue"] = *r.cv_pvalue;
    return j.dump(2) + "\n";
}

void print_report(const core::DetectionReport& r) {
    std::printf("n=%zu k=%zu stride=%zu grid_tuples=%llu lrv=%s\n", r.n, r.k, r.stride,
                static_cast<unsigned long long>(r.grid_tuples), r.lrv_method.c_str());
    std::printf("t1=%s t2=%s\n", fmt17(r.t1).c_str(), fmt17(r.t2).c_str());
    std::printf("t1_normalized=%s t2_normalized=%s sigma2_hat=%s\n", fmt17(r.t1_normalized).c_str(),
                fmt17(r.t2_normalized).c_str(), fmt17(r.sigma2_hat).c_str());
    for (const auto& [level, d] : r.decisions)
        std::printf("level=%s ks_quantile=%s ks_reject=%d cv_quantile=%s cv_reject=%d\n",
                    fmt17(level).c_str(), fmt17(d.ks_quantile).c_str(), d.ks_reject ? 1 : 0,
                    fmt17(d.cv_quantile).c_str(), d.cv_reject ? 1 : 0);
    std::string locs;
    for (std::size_t i = 0; i < r.argmax_tuple.size(); ++i) {
        if (i) locs += ',';
        locs += std::to_string(r.argmax_tuple[i]);
    }
    std::printf("argmax=%s\n", locs.c_str());
    if (r.ks_pvalue && r.cv_pvalue)
        std::printf("ks_pvalue=%s cv_pvalue=%s\n", fmt17(*r.ks_pvalue).c_str(),
                    fmt17(*r.cv_pvalue).c_str());
    std::printf("degenerate=%d\n", r.degenerate ? 1 : 0);
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------

struct CommonOpts {
    std::uint64_t seed = kDefaultSeed;
    bool seed_given = false;
    std::string cache_dir = "cache";
    int threads = 0;
};

struct SimulateNullOpts {
    std::size_t k = 2;
    std::size_t m = 2000;
    std::size_t reps = 5000;
    std::size_t stride = 1;
    std::vector<double> levels{0.01, 0.05, 0.10};
    std::string out = "quantiles";
};

struct DetectOpts {
    std::string input;
    std::string out;
    std::size_t k = 2;
    std::string kernel = "difference";
    std::string lrv = "ar1-diff";
    std::optional<std::size_t> bandwidth;
    std::optional<std::size_t> block_len;
    std::optional<std::size_t> stride;
    std::vector<double> levels{0.01, 0.05, 0.10};
    std::size_t table_m = 500;
    std::size_t table_reps = 1000;
};

struct GenDataOpts {
    std::string scenario = "mean-mean";
    double mu2 = 0.0;
    double mu3 = 0.0;
    double rho3 = 0.0;
    double omega3 = 1.0;
    std::string out = "data.csv";
};

struct ExperimentOpts {
    std::string row;
    std::string scenario;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double rho3 = 0.0;
    double omega3 = 1.0;
    std::size_t n = 200;
    std::size_t reps = 500;
    std::string lrv = "ar1-diff";
    std::vector<double> levels{0.05};
    std::size_t table_m = 500;
    std::size_t table_reps = 1000;
    std::string out;
};

int cmd_simulate_null(const CommonOpts& common, const SimulateNullOpts& opt) {
    nulldist::QuantileTable table;
    if (auto cached = nulldist::load_cached(common.cache_dir, opt.k, opt.m, opt.reps, common.seed,
                                            opt.stride)) {
        table = std::move(*cached);
    } else {
        table = nulldist::simulate_null_quantiles(opt.k, opt.m, opt.reps, opt.levels, common.seed,
                                                  opt.stride);
        nulldist::store_cached(common.cache_dir, table);
    }
    retarget_levels(table, opt.levels);

    const std::string csv = nulldist::to_csv(table);
    std::fputs(csv.c_str(), stdout);
    write_file(opt.out + ".csv", csv);
    write_file(opt.out + ".json", nulldist::to_json_string(table));
    std::fprintf(stderr, "wrote %s.csv and %s.json\n", opt.out.c_str(), opt.out.c_str());
    return 0;
}

int cmd_detect(const CommonOpts& common, const DetectOpts& opt) {
    const core::Series series = read_series_csv(opt.input);
    const nulldist::QuantileTable table =
        load_or_build_table(common.cache_dir, opt.k, opt.table_m, opt.table_reps, kAutoTableSeed);

    detect::DetectOptions options;
    options.k = opt.k;
    options.kernel = opt.kernel == "indicator" ? core::KernelSpec::indicator_less()
                                               : core::KernelSpec::difference();
    if (opt.kernel != "difference" && opt.kernel != "indicator")
        throw core::BadSpec("unknown kernel '" + opt.kernel + "' (difference|indicator)");
    const auto method = lrv::method_from_name(opt.lrv);
    if (!method) throw core::BadSpec("unknown lrv method '" + opt.lrv + "'");
    options.lrv_method = *method;
    options.bandwidth = opt.bandwidth;
    options.block_len = opt.block_len;
    options.stride = opt.stride;
    options.levels = opt.levels;

    const core::DetectionReport report = detect::detect(series, table, options);
    print_report(report);
    if (!opt.out.empty()) write_file(opt.out, report_to_json(report));
    return 0;
}

int cmd_gen_data(const CommonOpts& common, const GenDataOpts& opt) {
    datagen::ScenarioSpec spec;
    spec.tag = tag_from_name(opt.scenario);
    spec.mu2 = opt.mu2;
    spec.mu3 = opt.mu3;
    spec.rho3 = opt.rho3;
    spec.omega3 = opt.omega3;

    rng::NormalStream g(common.seed);
    const auto segments = datagen::build_scenario(spec);
    const auto [series, changes] = datagen::simulate_piecewise(segments, g);

    std::ostringstream csv;
    csv << "index,value\n";
    for (std::size_t i = 0; i < series.n(); ++i) csv << i << ',' << fmt17(series[i]) << '\n';
    write_file(opt.out, csv.str());

    nlohmann::json truth;
    truth["scenario"] = opt.scenario;
    truth["label"] = spec.label();
    truth["seed"] = common.seed;
    truth["n"] = series.n();
    truth["changes"] = changes;
    std::string truth_path = opt.out;
    const auto dot = truth_path.rfind(".csv");
    if (dot != std::string::npos && dot == truth_path.size() - 4) truth_path.resize(dot);
    truth_path += ".truth.json";
    write_file(truth_path, truth.dump(2) + "\n");

    std::string joined;
    for (std::size_t i = 0; i < changes.size(); ++i) {
        if (i) joined += ',';
        joined += std::to_string(changes[i]);
    }
    std::printf("n=%zu changes=%s label=%s\n", series.n(), joined.c_str(), spec.label().c_str());
    std::fprintf(stderr, "wrote %s and %s\n", opt.out.c_str(), truth_path.c_str());
    return 0;
}

int cmd_experiment(const CommonOpts& common, const ExperimentOpts& opt) {
    if (opt.row.empty() == opt.scenario.empty())
        throw core::BadSpec("pass exactly one of --row '(mu,rho,omega)' or --scenario <tag>");

    const nulldist::QuantileTable table =
        load_or_build_table(common.cache_dir, 2, opt.table_m, opt.table_reps, kAutoTableSeed);
    const auto parsed_method = lrv::method_from_name(opt.lrv);
    if (!parsed_method) throw core::BadSpec("unknown lrv method '" + opt.lrv + "'");
    const lrv::LrvMethod method = *parsed_method;

    // content-addressed result cache: recomputing a published row is expensive
    std::string key_text = (opt.row.empty() ? "scenario:" + opt.scenario : "row:" + opt.row) + ";";
    for (double l : opt.levels) key_text += fmt17(l) + ";";
    {
        char meta[256];
        std::snprintf(meta, sizeof(meta), "n=%zu;reps=%zu;seed=%llu;lrv=%s;mu2=%s;mu3=%s;rho3=%s;omega3=%s;table=%s",
                      opt.n, opt.reps, static_cast<unsigned long long>(common.seed),
                      opt.lrv.c_str(), fmt17(opt.mu2).c_str(), fmt17(opt.mu3).c_str(),
                      fmt17(opt.rho3).c_str(), fmt17(opt.omega3).c_str(),
                      nulldist::cache_key(table.k, table.m, table.replications, table.seed,
                                          table.stride)
                          .c_str());
        key_text += meta;
    }
    char key_hex[17];
    std::snprintf(key_hex, sizeof(key_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(key_text)));
    const std::string cache_file = common.cache_dir + "/exp-" + key_hex + ".json";

    experiments::ExperimentResult result;
    bool from_cache = false;
    {
        std::ifstream in(cache_file);
        if (in) {
            std::ostringstream buf;
            buf << in.rdbuf();
            try {
                const nlohmann::json j = nlohmann::json::parse(buf.str());
                result.label = j.at("label").get<std::string>();
                result.n = j.at("n").get<std::size_t>();
                result.replications = j.at("replications").get<std::size_t>();
                result.seed = j.at("seed").get<std::uint64_t>();
                result.lrv_method = j.at("lrv").get<std::string>();
                result.levels = j.at("levels").get<std::vector<double>>();
                result.ks_rate = j.at("ks_rate").get<std::vector<double>>();
                result.cv_rate = j.at("cv_rate").get<std::vector<double>>();
                result.mean_t1 = j.at("mean_t1").get<double>();
                result.mean_t2 = j.at("mean_t2").get<double>();
                from_cache = true;
            } catch (const std::exception&) {
                from_cache = false;
            }
        }
    }

    if (!from_cache) {
        if (!opt.row.empty()) {
            const auto triple = parse_triple(opt.row);
            result = experiments::empirical_level(triple[0], triple[1], triple[2], opt.n, opt.reps,
                                                  table, common.seed, method, opt.levels);
        } else {
            datagen::ScenarioSpec spec;
            spec.tag = tag_from_name(opt.scenario);
            spec.mu2 = opt.mu2;
            spec.mu3 = opt.mu3;
            spec.rho3 = opt.rho3;
            spec.omega3 = opt.omega3;
            result = experiments::empirical_power(spec, opt.reps, table, common.seed, method,
                                                  opt.levels);
        }
        nlohmann::json j;
        j["label"] = result.label;
        j["n"] = result.n;
        j["replications"] = result.replications;
        j["seed"] = result.seed;
        j["lrv"] = result.lrv_method;
        j["levels"] = result.levels;
        j["ks_rate"] = result.ks_rate;
        j["cv_rate"] = result.cv_rate;
        j["mean_t1"] = result.mean_t1;
        j["mean_t2"] = result.mean_t2;
        std::filesystem::create_directories(common.cache_dir);
        write_file(cache_file, j.dump(2) + "\n");
        std::fprintf(stderr, "finished %zu replications in %.1fs\n", result.replications,
                     result.runtime_seconds);
    } else {
        std::fprintf(stderr, "loaded cached result %s\n", cache_file.c_str());
    }

    const std::string csv = experiments::emit_table({result}, experiments::TableFormat::Csv);
    std::fputs(csv.c_str(), stdout);
    if (!opt.out.empty()) write_file(opt.out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"change-point tests for a fixed number of breaks via U-statistic scans"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--seed", common.seed, "master RNG seed (env CPUSTAT_SEED, then 42)")
        ->each([&common](const std::string&) { common.seed_given = true; });
    app.add_option("--cache", common.cache_dir, "quantile/result cache directory")
        ->capture_default_str();
    app.add_option("--threads", common.threads, "cap OpenMP worker count (0 = runtime default)");

    SimulateNullOpts sim;
    CLI::App* c_sim = app.add_subcommand("simulate-null", "tabulate limiting null quantiles");
    c_sim->fallthrough();
    c_sim->add_option("--k", sim.k, "number of change points")->capture_default_str();
    c_sim->add_option("--m", sim.m, "bridge resolution")->capture_default_str();
    c_sim->add_option("--reps", sim.reps, "Monte Carlo replications")->capture_default_str();
    c_sim->add_option("--stride", sim.stride, "grid stride over the simplex lattice")
        ->capture_default_str();
    c_sim->add_option("--levels", sim.levels, "significance levels")
        ->delimiter(',')
        ->capture_default_str();
    c_sim->add_option("--out", sim.out, "output path prefix")->capture_default_str();

    DetectOpts det;
    CLI::App* c_det = app.add_subcommand("detect", "run both tests on a CSV series");
    c_det->fallthrough();
    c_det->add_option("input", det.input, "CSV with one value per row")->required();
    c_det->add_option("--out", det.out, "write the full report as JSON");
    c_det->add_option("--k", det.k, "number of change points under the alternative")
        ->capture_default_str();
    c_det->add_option("--kernel", det.kernel, "difference|indicator")->capture_default_str();
    c_det->add_option("--lrv", det.lrv, "ar1|ar1-diff|newey-west|subsampling|spectral")
        ->capture_default_str();
    c_det->add_option("--bandwidth", det.bandwidth, "lag truncation for newey-west/spectral");
    c_det->add_option("--block-len", det.block_len, "block length for subsampling");
    c_det->add_option("--stride", det.stride, "partition grid stride (default: auto)");
    c_det->add_option("--levels", det.levels, "significance levels")
        ->delimiter(',')
        ->capture_default_str();
    c_det->add_option("--table-m", det.table_m, "auto-table bridge resolution")
        ->capture_default_str();
    c_det->add_option("--table-reps", det.table_reps, "auto-table replications")
        ->capture_default_str();

    GenDataOpts gen;
    CLI::App* c_gen = app.add_subcommand("gen-data", "generate a three-segment scenario series");
    c_gen->fallthrough();
    c_gen->add_option("--scenario", gen.scenario,
                      "mean-mean|mean-mean-ar|mean-autocorr|mean-variance")
        ->capture_default_str();
    c_gen->add_option("--mu2", gen.mu2, "second-segment mean")->capture_default_str();
    c_gen->add_option("--mu3", gen.mu3, "third-segment mean (mean-mean variants)")
        ->capture_default_str();
    c_gen->add_option("--rho3", gen.rho3, "third-segment autocorrelation (mean-autocorr)")
        ->capture_default_str();
    c_gen->add_option("--omega3", gen.omega3, "third-segment innovation scale (mean-variance)")
        ->capture_default_str();
    c_gen->add_option("--out", gen.out, "output CSV path")->capture_default_str();

    ExperimentOpts exp;
    CLI::App* c_exp = app.add_subcommand("experiment", "empirical level/power of both tests");
    c_exp->fallthrough();
    c_exp->add_option("--row", exp.row, "homogeneous null model '(mu,rho,omega)'");
    c_exp->add_option("--scenario", exp.scenario,
                      "mean-mean|mean-mean-ar|mean-autocorr|mean-variance");
    c_exp->add_option("--mu2", exp.mu2, "second-segment mean")->capture_default_str();
    c_exp->add_option("--mu3", exp.mu3, "third-segment mean")->capture_default_str();
    c_exp->add_option("--rho3", exp.rho3, "third-segment autocorrelation")->capture_default_str();
    c_exp->add_option("--omega3", exp.omega3, "third-segment innovation scale")
        ->capture_default_str();
    c_exp->add_option("--n", exp.n, "series length for --row experiments")->capture_default_str();
    c_exp->add_option("--reps", exp.reps, "Monte Carlo replications")->capture_default_str();
    c_exp->add_option("--lrv", exp.lrv, "long-run variance estimator")->capture_default_str();
    c_exp->add_option("--levels", exp.levels, "significance levels")
        ->delimiter(',')
        ->capture_default_str();
    c_exp->add_option("--table-m", exp.table_m, "auto-table bridge resolution")
        ->capture_default_str();
    c_exp->add_option("--table-reps", exp.table_reps, "auto-table replications")
        ->capture_default_str();
    c_exp->add_option("--out", exp.out, "also write the CSV table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (!common.seed_given) {
        if (const char* env = std::getenv("CPUSTAT_SEED")) {
            try {
                common.seed = std::stoull(env);
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: CPUSTAT_SEED='%s' is not an integer\n", env);
                return 2;
            }
        }
    }
#ifdef _OPENMP
    if (common.threads > 0) omp_set_num_threads(common.threads);
#endif

    try {
        if (c_sim->parsed()) return cmd_simulate_null(common, sim);
        if (c_det->parsed()) return cmd_detect(common, det);
        if (c_gen->parsed()) return cmd_gen_data(common, gen);
        if (c_exp->parsed()) return cmd_experiment(common, exp);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const core::NonPositiveVariance& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const core::DegenerateSeries& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const core::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
