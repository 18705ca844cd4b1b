#include "cpustat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cpustat/ustat.hpp"

namespace cpustat::experiments {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ExperimentResult run_replications(std::string label,
                                  const std::vector<datagen::SegmentSpec>& segments,
                                  std::size_t replications, const nulldist::QuantileTable& table,
                                  std::uint64_t seed, lrv::LrvMethod method,
                                  std::vector<double> levels) {
    if (replications == 0) throw core::BadSpec("need at least one replication");
    if (levels.empty()) throw core::BadSpec("need at least one level");
    for (double l : levels)
        if (!(l > 0.0) || !(l < 1.0)) throw core::BadSpec("levels must lie in (0,1)");
    for (const auto& seg : segments)
        if (seg.omega < 1e-8)
            throw core::BadSpec("experiment segments need positive innovation scale");

    std::size_t n = 0;
    for (const auto& seg : segments) n += seg.length;

    std::vector<double> ksq(levels.size()), cvq(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        ksq[i] = table.ks_quantile(levels[i]);
        cvq[i] = table.cv_quantile(levels[i]);
    }

    const core::KernelSpec kernel = core::KernelSpec::difference();
    const std::size_t stride = core::PartitionGrid::auto_stride(table.k, n);
    const core::PartitionGrid grid(table.k, n, stride);

    const auto started = std::chrono::steady_clock::now();
    std::vector<double> t1n(replications), t2n(replications);
    const std::int64_t reps = static_cast<std::int64_t>(replications);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < reps; ++r) {
        rng::NormalStream g(rng::stream_seed(seed, static_cast<std::uint64_t>(r)));
        const auto [series, changes] = datagen::simulate_piecewise(segments, g);
        const double theta = ustat::centering_theta(series, kernel);
        const ustat::ZField field = ustat::z_field_serial(series, kernel, grid, theta);
        const double t1 = ustat::ks_statistic(field);
        const double t2 = ustat::cv_statistic(field);
        const lrv::LrvEstimate est =
            lrv::estimate(series, kernel, method, std::nullopt, std::nullopt);
        const auto [a, b] = ustat::normalize(t1, t2, est.sigma2);
        t1n[static_cast<std::size_t>(r)] = a;
        t2n[static_cast<std::size_t>(r)] = b;
    }

    ExperimentResult res;
    res.label = std::move(label);
    res.n = n;
    res.replications = replications;
    res.seed = seed;
    res.lrv_method = lrv::method_name(method);
    res.levels = std::move(levels);
    res.ks_rate.resize(res.levels.size());
    res.cv_rate.resize(res.levels.size());
    for (std::size_t i = 0; i < res.levels.size(); ++i) {
        std::size_t ks_hits = 0, cv_hits = 0;
        for (std::size_t r = 0; r < replications; ++r) {
            ks_hits += t1n[r] > ksq[i] ? 1 : 0;
            cv_hits += t2n[r] > cvq[i] ? 1 : 0;
        }
        res.ks_rate[i] = static_cast<double>(ks_hits) / static_cast<double>(replications);
        res.cv_rate[i] = static_cast<double>(cv_hits) / static_cast<double>(replications);
    }
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t r = 0; r < replications; ++r) {
        s1 += t1n[r];
        s2 += t2n[r];
    }
    res.mean_t1 = s1 / static_cast<double>(replications);
    res.mean_t2 = s2 / static_cast<double>(replications);
    res.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

}  // namespace

ExperimentResult empirical_level(double mu, double rho, double omega, std::size_t n,
                                 std::size_t replications, const nulldist::QuantileTable& table,
                                 std::uint64_t seed, lrv::LrvMethod method,
                                 std::vector<double> levels) {
    if (!(std::abs(rho) < 1.0)) throw core::BadSpec("|rho| must be < 1");
    char label[96];
    std::snprintf(label, sizeof(label), "null(%.2f,%.2f,%.2f)", mu, rho, omega);
    const std::vector<datagen::SegmentSpec> segments{{mu, rho, omega, n, 25}};
    return run_replications(label, segments, replications, table, seed, method,
                            std::move(levels));
}

ExperimentResult empirical_power(const datagen::ScenarioSpec& scenario, std::size_t replications,
                                 const nulldist::QuantileTable& table, std::uint64_t seed,
                                 lrv::LrvMethod method, std::vector<double> levels) {
    const auto segments = datagen::build_scenario(scenario);
    return run_replications(scenario.label(), segments, replications, table, seed, method,
                            std::move(levels));
}

namespace {

double binomial_se(double rate, std::size_t reps) {
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

}  // namespace

std::string emit_table(const std::vector<ExperimentResult>& results, TableFormat format) {
    if (results.empty()) throw core::BadSpec("nothing to tabulate");
    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << "label,n,replications,seed,lrv,level,ks_rate,ks_se,cv_rate,cv_se,mean_t1,mean_t2\n";
        for (const auto& r : results)
            for (std::size_t i = 0; i < r.levels.size(); ++i)
                out << '"' << r.label << "\"," << r.n << ',' << r.replications << ',' << r.seed
                    << ','
                    << r.lrv_method << ',' << fmt17(r.levels[i]) << ',' << fmt17(r.ks_rate[i])
                    << ',' << fmt17(binomial_se(r.ks_rate[i], r.replications)) << ','
                    << fmt17(r.cv_rate[i]) << ','
                    << fmt17(binomial_se(r.cv_rate[i], r.replications)) << ','
                    << fmt17(r.mean_t1) << ',' << fmt17(r.mean_t2) << '\n';
        return out.str();
    }
    out << "| label | n | reps | lrv | level | KS rate (se) | CV rate (se) |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& r : results)
        for (std::size_t i = 0; i < r.levels.size(); ++i) {
            char ks[64], cv[64], lv[32];
            std::snprintf(lv, sizeof(lv), "%.2f", r.levels[i]);
            std::snprintf(ks, sizeof(ks), "%.3f (%.3f)", r.ks_rate[i],
                          binomial_se(r.ks_rate[i], r.replications));
            std::snprintf(cv, sizeof(cv), "%.3f (%.3f)", r.cv_rate[i],
                          binomial_se(r.cv_rate[i], r.replications));
            out << "| " << r.label << " | " << r.n << " | " << r.replications << " | "
                << r.lrv_method << " | " << lv << " | " << ks << " | " << cv << " |\n";
        }
    return out.str();
}

std::vector<ExperimentResult> parse_table_csv(const std::string& text) {
    std::vector<ExperimentResult> results;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("label,", 0) == 0) continue;
        }
        // the label is quoted because scenario labels contain commas
        std::string label;
        std::string rest;
        if (!line.empty() && line.front() == '"') {
            const std::size_t close = line.find('"', 1);
            if (close == std::string::npos || close + 1 >= line.size() || line[close + 1] != ',')
                throw core::Error("malformed experiment row: " + line);
            label = line.substr(1, close - 1);
            rest = line.substr(close + 2);
        } else {
            const std::size_t comma = line.find(',');
            if (comma == std::string::npos) throw core::Error("malformed experiment row: " + line);
            label = line.substr(0, comma);
            rest = line.substr(comma + 1);
        }
        std::vector<std::string> fields;
        std::istringstream ls(rest);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() != 11) throw core::Error("malformed experiment row: " + line);
        const std::size_t n = std::stoull(fields[0]);
        const std::size_t reps = std::stoull(fields[1]);
        const std::uint64_t seed = std::stoull(fields[2]);
        const std::string& lrv = fields[3];

        ExperimentResult* dst = nullptr;
        if (!results.empty()) {
            ExperimentResult& back = results.back();
            if (back.label == label && back.n == n && back.replications == reps &&
                back.seed == seed && back.lrv_method == lrv)
                dst = &back;
        }
        if (!dst) {
            results.emplace_back();
            dst = &results.back();
            dst->label = label;
            dst->n = n;
            dst->replications = reps;
            dst->seed = seed;
            dst->lrv_method = lrv;
        }
        dst->levels.push_back(std::stod(fields[4]));
        dst->ks_rate.push_back(std::stod(fields[5]));
        dst->cv_rate.push_back(std::stod(fields[7]));
        dst->mean_t1 = std::stod(fields[9]);
        dst->mean_t2 = std::stod(fields[10]);
    }
    return results;
}

}  // namespace cpustat::experiments
