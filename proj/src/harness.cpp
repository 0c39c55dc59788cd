#include "current_lab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "current_lab/error.hpp"
#include "current_lab/exact.hpp"
#include "current_lab/gff.hpp"
#include "current_lab/io.hpp"
#include "current_lab/loopsoup.hpp"
#include "current_lab/parallel.hpp"
#include "current_lab/stats.hpp"
#include "current_lab/vrjp.hpp"

namespace current_lab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Stream ids, one per purpose, so suites never share random numbers.
enum Stream : std::uint64_t {
    coupled_fk = 1,
    chain_fk = 2,
    gff_draws = 3,
    soup_draws = 4,
    recon_soup = 5,
    recon_direct = 6,
    vrjp_first = 7,
    vrjp_second = 8,
};

constexpr std::size_t sign_sweep_max_edges = 12;
constexpr std::size_t sample_dump_rows = 1000;

std::string join_digits(std::span<const std::uint8_t> v) {
    std::string s;
    for (auto d : v) s.push_back(static_cast<char>('0' + d));
    return s;
}

std::string join_current(std::span<const std::uint32_t> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s.push_back(' ');
        s += std::to_string(v[i]);
    }
    return s;
}

std::size_t edge_index(std::span<const std::uint8_t> bits) {
    return encode_configuration(Space{SpaceKind::Edge, bits.size()}, bits);
}

class SuiteRun {
public:
    SuiteRun(const Network& net, const ExperimentConfig& cfg, const WorkerPool& pool, std::string suite, fs::path out)
        : net(net), cfg(cfg), pool(pool), suite(std::move(suite)), out(std::move(out)) {
        if (!this->out.empty()) fs::create_directories(this->out);
    }

    const Network& net;
    const ExperimentConfig& cfg;
    const WorkerPool& pool;
    std::string suite;
    fs::path out;
    std::vector<CheckRecord> checks;
    std::vector<std::string> skipped;
    json timings = json::object();

    SeedSpec stream(Stream s) const { return SeedSpec{cfg.seed, s}; }

    void exact(const std::string& name, double error, double tol, json detail = json::object()) {
        CheckRecord r;
        r.suite = suite;
        r.name = name;
        r.statistic = error;
        r.tolerance = tol;
        r.pass = error <= tol;
        r.detail = std::move(detail);
        checks.push_back(std::move(r));
    }

    void statistical(const std::string& name, std::vector<double> z, json detail = json::object()) {
        if (z.empty()) {
            skip(name + " (no cell with enough samples)");
            return;
        }
        CheckRecord r;
        r.suite = suite;
        r.name = name;
        r.statistical = true;
        r.z = std::move(z);
        r.detail = std::move(detail);
        checks.push_back(std::move(r));
    }

    void skip(const std::string& what) { skipped.push_back(suite + "/" + what); }

    template <class F>
    void csv(const std::string& name, F&& fill) const {
        if (out.empty()) return;
        std::ofstream f(out / name);
        if (!f) throw ValidationError((out / name).string() + ": cannot write file");
        fill(f);
    }

    template <class F>
    void timed(const std::string& name, F&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    /// Bonferroni over every z-score of the suite's statistical checks.
    void finalize() {
        std::size_t m = 0;
        for (const auto& c : checks)
            if (c.statistical) m += c.z.size();
        const double t = bonferroni_threshold(cfg.tolerances.sigma_level, m);
        for (auto& c : checks) {
            if (!c.statistical) continue;
            c.tolerance = t;
            double worst = 0.0;
            bool nan = false;
            for (double v : c.z) {
                if (std::isnan(v)) nan = true;
                worst = std::max(worst, std::fabs(v));
            }
            c.statistic = worst;
            c.pass = !nan && worst <= t;
            c.detail["comparisons_in_suite"] = m;
        }
    }
};

std::vector<double> cell_z(const MultinomialReport& r) { return r.z; }

// ---------------------------------------------------------------- coupling

void verify_coupling(SuiteRun& run) {
    const Network& net = run.net;
    const auto& tol = run.cfg.tolerances;
    const std::size_t m = net.edge_count();
    const auto p = bernoulli_probabilities(net);

    run.timed("exact_identities", [&] {
        const auto trace = exact_measure(net, ModelKind::CurrentTrace);
        const auto fk = exact_measure(net, ModelKind::FK);
        const auto bern = FiniteDistribution::bernoulli(p);
        const auto sup = superpose_max(trace, bern);
        run.exact("coupling_lemma", tv_distance(sup, fk), tol.tv_exact);

        const auto z = partition_functions(net);
        const double scaled = std::ldexp(z.current, static_cast<int>(net.vertex_count()));
        run.exact("partition_identity", std::fabs(z.ising - scaled) / z.ising, tol.tv_exact,
                  {{"z_ising", z.ising}, {"z_current", z.current}, {"z_fk", z.fk}});

        const auto ising = exact_measure(net, ModelKind::Ising);
        run.exact("cluster_coloring", tv_distance(color_clusters_exact(net), ising), tol.tv_exact);

        run.csv("coupling_tables.csv", [&](std::ostream& o) {
            o << "configuration,trace,bernoulli,superposed,fk\n";
            for (std::size_t i = 0; i < fk.size(); ++i)
                o << configuration_string(fk.space(), i) << ',' << format_double(trace.probability(i)) << ','
                  << format_double(bern.probability(i)) << ',' << format_double(sup.probability(i)) << ','
                  << format_double(fk.probability(i)) << '\n';
        });
    });

    if (m <= sign_sweep_max_edges) {
        run.timed("sign_count", [&] {
            const Space space{SpaceKind::Edge, m};
            std::size_t mismatches = 0;
            std::ostringstream rows;
            rows << "configuration,open_edges,clusters,brute_force,closed_form\n";
            for (std::size_t i = 0; i < space.size(); ++i) {
                const EdgeConfig open = decode_configuration(space, i);
                const std::size_t o = std::count(open.begin(), open.end(), 1);
                const std::size_t k = components(net, open).count;
                const std::uint64_t closed = std::uint64_t{1} << (o + k - net.vertex_count());
                std::uint64_t brute = 0;
                try {
                    brute = sign_assignment_count(net, open);
                } catch (const InvariantError&) {
                    brute = 0;
                }
                if (brute != closed) ++mismatches;
                rows << join_digits(open) << ',' << o << ',' << k << ',' << brute << ',' << closed << '\n';
            }
            run.exact("sign_count", static_cast<double>(mismatches), 0.0, {{"configurations", space.size()}});
            run.csv("sign_counts.csv", [&](std::ostream& f) { f << rows.str(); });
        });
    } else {
        run.skip("sign_count (more than 12 edges)");
    }

    run.timed("sampled_fk", [&] {
        const auto fk = exact_measure(net, ModelKind::FK);
        const CoupledFkSampler sampler(net);
        const SeedSpec base = run.stream(Stream::coupled_fk);
        const auto draws = run.pool.map<CoupledSample>(run.cfg.replicas, [&](std::size_t i) {
            Rng rng = make_rng(base.substream(i));
            return sampler.draw(rng);
        });
        std::vector<std::uint64_t> counts(fk.size(), 0);
        for (const auto& d : draws) ++counts[edge_index(d.superposed)];
        const auto report = multinomial_test(counts, fk.probabilities(), tol.sigma_level, 1);
        run.statistical("sampled_fk", cell_z(report), {{"samples", report.samples}, {"empirical_tv", report.empirical_tv}});

        run.csv("fk_counts.csv", [&](std::ostream& o) {
            o << "configuration,observed,expected\n";
            for (std::size_t i = 0; i < counts.size(); ++i)
                o << configuration_string(fk.space(), i) << ',' << counts[i] << ','
                  << format_double(fk.probability(i) * static_cast<double>(run.cfg.replicas)) << '\n';
        });
        run.csv("fk_samples.csv", [&](std::ostream& o) {
            o << "stream,draw,current,bernoulli,superposed\n";
            for (std::size_t i = 0; i < draws.size(); ++i)
                o << Stream::coupled_fk << ',' << i << ',' << join_current(draws[i].current) << ','
                  << join_digits(draws[i].bernoulli) << ',' << join_digits(draws[i].superposed) << '\n';
        });
    });

    run.timed("chain_fk", [&] {
        const auto fk = exact_measure(net, ModelKind::FK);
        const std::size_t chains = std::max<std::size_t>(100, run.cfg.replicas / 10);
        const SeedSpec base = run.stream(Stream::chain_fk);
        const auto idx = run.pool.map<std::size_t>(chains, [&](std::size_t i) {
            MarkovChainSampler chain(net, ModelKind::FK, run.cfg.chain, base.substream(i));
            return edge_index(std::get<EdgeConfig>(chain.next()));
        });
        std::vector<std::uint64_t> counts(fk.size(), 0);
        for (auto i : idx) ++counts[i];
        const auto report = multinomial_test(counts, fk.probabilities(), tol.sigma_level, 1);
        const ChainParams& cp = run.cfg.chain;
        run.statistical("markov_chain_fk", cell_z(report),
                        {{"samples", report.samples},
                         {"empirical_tv", report.empirical_tv},
                         {"burn_in_sweeps", cp.burn_in(net)},
                         {"thinning_sweeps", cp.thinning(net)}});
    });
}

// ---------------------------------------------------------- reconstruction

void two_sample_moments(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                        std::vector<double>& z, std::ostream& rows) {
    const std::size_t n = a.front().size();
    auto compare = [&](const std::string& label, auto&& f) {
        RunningMoments ma, mb;
        for (const auto& h : a) ma.add(f(h));
        for (const auto& h : b) mb.add(f(h));
        const double se = std::sqrt(ma.variance() / double(ma.count()) + mb.variance() / double(mb.count()));
        const double zz = se > 0.0 ? (ma.mean() - mb.mean()) / se : (ma.mean() == mb.mean() ? 0.0 : INFINITY);
        z.push_back(zz);
        rows << label << ',' << format_double(ma.mean()) << ',' << format_double(mb.mean()) << ','
             << format_double(zz) << '\n';
    };
    for (std::size_t x = 0; x < n; ++x)
        compare("mean_" + std::to_string(x), [x](const std::vector<double>& h) { return h[x]; });
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x; y < n; ++y)
            compare("second_" + std::to_string(x) + "_" + std::to_string(y),
                    [x, y](const std::vector<double>& h) { return h[x] * h[y]; });
}

void reconstruct_check(SuiteRun& run) {
    const Network& net = run.net;
    const auto& tol = run.cfg.tolerances;
    run.timed("trace_reconstruction", [&] {
        const auto p = bernoulli_probabilities(net);
        const auto fk = exact_measure(net, ModelKind::FK);
        const auto trace = exact_measure(net, ModelKind::CurrentTrace);
        const auto rec = reconstruct_trace_law(fk, p);
        run.exact("trace_reconstruction", tv_distance(rec, trace), tol.tv_recon);
        run.exact("superposition_roundtrip", tv_distance(superpose_max(rec, p), fk), tol.tv_recon);
        run.csv("reconstruction.csv", [&](std::ostream& o) {
            o << "configuration,reconstructed,trace\n";
            for (std::size_t i = 0; i < rec.size(); ++i)
                o << configuration_string(rec.space(), i) << ',' << format_double(rec.probability(i)) << ','
                  << format_double(trace.probability(i)) << '\n';
        });
    });

    if (!net.pinning() || !(net.pinning()->conductance > 0.0)) {
        run.skip("field_reconstruction (network has no pinning)");
        return;
    }
    if (run.cfg.alpha != 0.5) {
        run.skip("field_reconstruction (needs alpha = 0.5)");
        return;
    }
    run.timed("field_reconstruction", [&] {
        const LoopSoupSampler soup(net, run.cfg.alpha, run.cfg.cutoff, run.cfg.truncation_tolerance);
        const GffSampler direct(net);
        const SeedSpec soup_base = run.stream(Stream::recon_soup);
        const SeedSpec direct_base = run.stream(Stream::recon_direct);
        const std::size_t n = run.cfg.replicas;
        const auto rebuilt = run.pool.map<std::vector<double>>(n, [&](std::size_t i) {
            Rng rng = make_rng(soup_base.substream(i));
            const auto f = fields(soup.draw(rng));
            const auto u = magnitudes_from_occupation(f.occupation);
            const auto bridges = sample_bridges(net, u, rng);
            return reconstruct_field(u, cable_clusters(net, f.crossings, bridges), rng).h;
        });
        const auto sampled = run.pool.map<std::vector<double>>(n, [&](std::size_t i) {
            Rng rng = make_rng(direct_base.substream(i));
            return direct.draw(rng).h;
        });
        std::vector<double> z;
        std::ostringstream rows;
        rows << "moment,reconstructed,direct,z\n";
        two_sample_moments(rebuilt, sampled, z, rows);
        run.statistical("field_reconstruction", z, {{"samples", n}});
        run.csv("field_reconstruction.csv", [&](std::ostream& o) { o << rows.str(); });
        run.csv("reconstructed_fields.csv", [&](std::ostream& o) {
            o << "draw,vertex,h,u,sign\n";
            for (std::size_t i = 0; i < std::min(n, sample_dump_rows); ++i) {
                const auto f = FieldSample::from_values(rebuilt[i]);
                for (std::size_t x = 0; x < f.h.size(); ++x)
                    o << i << ',' << x << ',' << format_double(f.h[x]) << ',' << format_double(f.magnitude[x])
                      << ',' << int(f.sign[x]) << '\n';
            }
        });
    });
}

// --------------------------------------------------------------------- gff

constexpr double sign_cell_edges[] = {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, INFINITY};
constexpr std::size_t sign_cells = std::size(sign_cell_edges) - 1;

std::size_t cell_of(double b) {
    for (std::size_t c = 0; c + 1 < std::size(sign_cell_edges); ++c)
        if (b < sign_cell_edges[c + 1]) return c;
    return sign_cells - 1;
}

void gff_check(SuiteRun& run) {
    const Network& net = run.net;
    const std::size_t n = net.vertex_count();
    const std::size_t reps = run.cfg.replicas;
    const GffSampler sampler(net);
    const Eigen::MatrixXd& g = sampler.green();

    run.exact("green_inverse", (precision_matrix(net) * g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(),
              1e-10);
    run.csv("green.csv", [&](std::ostream& o) { write_matrix_csv(o, g, net); });

    const SeedSpec base = run.stream(Stream::gff_draws);
    std::vector<FieldSample> draws;
    run.timed("sampling", [&] {
        draws = run.pool.map<FieldSample>(reps, [&](std::size_t i) {
            Rng rng = make_rng(base.substream(i));
            return sampler.draw(rng);
        });
    });
    const double N = static_cast<double>(reps);

    run.timed("moments", [&] {
        std::vector<double> zc, zm;
        std::ostringstream rows;
        rows << "x,y,empirical,green,z\n";
        for (std::size_t x = 0; x < n; ++x) {
            RunningMoments mean;
            for (const auto& d : draws) mean.add(d.h[x]);
            zm.push_back(mean.mean() / std::sqrt(g(x, x) / N));
            for (std::size_t y = x; y < n; ++y) {
                CompensatedSum s;
                for (const auto& d : draws) s.add(static_cast<long double>(d.h[x]) * d.h[y]);
                const double emp = static_cast<double>(s.value()) / N;
                const double se = std::sqrt((g(x, x) * g(y, y) + g(x, y) * g(x, y)) / N);
                const double z = (emp - g(x, y)) / se;
                zc.push_back(z);
                rows << x << ',' << y << ',' << format_double(emp) << ',' << format_double(g(x, y)) << ','
                     << format_double(z) << '\n';
            }
        }
        run.statistical("covariance", zc, {{"samples", reps}});
        run.statistical("sign_symmetry", zm, {{"samples", reps}});
        run.csv("covariance.csv", [&](std::ostream& o) { o << rows.str(); });
    });

    run.csv("field_samples.csv", [&](std::ostream& o) {
        o << "draw,vertex,h,u,sign\n";
        for (std::size_t i = 0; i < std::min(reps, sample_dump_rows); ++i)
            for (std::size_t x = 0; x < n; ++x)
                o << i << ',' << x << ',' << format_double(draws[i].h[x]) << ','
                  << format_double(draws[i].magnitude[x]) << ',' << int(draws[i].sign[x]) << '\n';
    });

    if (n > VrjpOptions{}.max_vertices) {
        run.skip("conditional_sign (more than 12 vertices)");
        return;
    }
    // Given u = |h|, sign agreement across each edge is calibrated against the
    // exact two-point function of the Ising model with weights beta_e u_x u_y,
    // grouped into cells of beta_e u_x u_y.
    run.timed("conditional_sign", [&] {
        std::vector<std::size_t> edges;
        for (std::size_t e = 0; e < net.edge_count(); ++e)
            if (!net.edge(e).is_loop() && net.beta(e) > 0.0) edges.push_back(e);
        if (edges.empty()) {
            run.skip("conditional_sign (no edges)");
            return;
        }
        struct Row {
            std::vector<double> predicted;
            std::vector<double> coupling;
        };
        const auto rows = run.pool.map<Row>(reps, [&](std::size_t i) {
            const auto& u = draws[i].magnitude;
            std::vector<double> w(net.edge_count());
            for (std::size_t e = 0; e < w.size(); ++e) w[e] = net.beta(e) * u[net.edge(e).u] * u[net.edge(e).v];
            Row r;
            std::map<std::size_t, std::vector<double>> corr;
            for (std::size_t e : edges) {
                const Edge& ed = net.edge(e);
                auto it = corr.find(ed.u);
                if (it == corr.end()) it = corr.emplace(ed.u, correlations_with(net, ed.u, w)).first;
                r.predicted.push_back(0.5 * (1.0 + it->second[ed.v]));
                r.coupling.push_back(w[e]);
            }
            return r;
        });
        std::vector<double> z;
        std::ostringstream csv;
        csv << "edge,cell_low,cell_high,samples,agree,expected,representative,z\n";
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const Edge& ed = net.edge(edges[k]);
            std::vector<std::uint64_t> count(sign_cells, 0), agree(sign_cells, 0);
            std::vector<double> expected(sign_cells, 0.0), var(sign_cells, 0.0), coupling(sign_cells, 0.0);
            for (std::size_t i = 0; i < reps; ++i) {
                const std::size_t c = cell_of(rows[i].coupling[k]);
                const double p = rows[i].predicted[k];
                ++count[c];
                agree[c] += draws[i].sign[ed.u] == draws[i].sign[ed.v];
                expected[c] += p;
                var[c] += p * (1.0 - p);
                coupling[c] += rows[i].coupling[k];
            }
            for (std::size_t c = 0; c < sign_cells; ++c) {
                if (count[c] < 30 || var[c] < 2.0) continue;
                const double zz = (static_cast<double>(agree[c]) - expected[c]) / std::sqrt(var[c]);
                z.push_back(zz);
                const double rep = 0.5 * (1.0 + std::tanh(coupling[c] / static_cast<double>(count[c])));
                csv << edges[k] << ',' << format_double(sign_cell_edges[c]) << ','
                    << format_double(sign_cell_edges[c + 1]) << ',' << count[c] << ',' << agree[c] << ','
                    << format_double(expected[c]) << ',' << format_double(rep) << ',' << format_double(zz) << '\n';
            }
        }
        run.statistical("conditional_sign", z, {{"samples", reps}, {"cells", z.size()}});
        run.csv("conditional_sign.csv", [&](std::ostream& o) { o << csv.str(); });
    });
}

// ---------------------------------------------------------------- loopsoup

constexpr std::size_t crossing_calibration_max_edges = 8;

void loopsoup_check(SuiteRun& run) {
    const Network& net = run.net;
    const std::size_t n = net.vertex_count();
    const std::size_t reps = run.cfg.replicas;
    const double alpha = run.cfg.alpha;
    const LoopSoupSampler sampler(net, alpha, run.cfg.cutoff, run.cfg.truncation_tolerance);
    const Eigen::MatrixXd g = green_matrix(net);
    const double N = static_cast<double>(reps);

    const SeedSpec base = run.stream(Stream::soup_draws);
    std::vector<SoupFields> draws;
    run.timed("sampling", [&] {
        draws = run.pool.map<SoupFields>(reps, [&](std::size_t i) {
            Rng rng = make_rng(base.substream(i));
            return fields(sampler.draw(rng));
        });
    });
    if (!run.out.empty()) {
        Rng rng = make_rng(base.substream(0));
        std::ofstream f(run.out / "ensemble_first.jsonl");
        write_ensemble_jsonl(f, sampler.draw(rng));
    }

    std::size_t sourceless = 0;
    for (const auto& d : draws) sourceless += incidence_parity_check(net, std::span<const std::uint32_t>(d.crossings));
    run.exact("crossing_parity", static_cast<double>(reps - sourceless), 0.0, {{"samples", reps}});

    // Occupation at a vertex is Gamma(alpha, G_xx): mean alpha G, variance alpha G^2,
    // and the sample variance has variance (2 alpha^2 + 6 alpha) G^4 / N.
    std::vector<double> zm, zv;
    double min_band = INFINITY;
    std::ostringstream rows;
    rows << "vertex,mean,expected_mean,z_mean,variance,expected_variance,z_variance\n";
    for (std::size_t x = 0; x < n; ++x) {
        RunningMoments m;
        for (const auto& d : draws) m.add(d.occupation[x]);
        const double gxx = g(x, x);
        const double se_mean = std::sqrt(alpha * gxx * gxx / N);
        const double se_var = std::sqrt((2.0 * alpha * alpha + 6.0 * alpha) / N) * gxx * gxx;
        const double z1 = (m.mean() - alpha * gxx) / se_mean;
        const double z2 = (m.variance() - alpha * gxx * gxx) / se_var;
        zm.push_back(z1);
        zv.push_back(z2);
        min_band = std::min(min_band, run.cfg.tolerances.sigma_level * se_mean);
        rows << x << ',' << format_double(m.mean()) << ',' << format_double(alpha * gxx) << ',' << format_double(z1)
             << ',' << format_double(m.variance()) << ',' << format_double(alpha * gxx * gxx) << ','
             << format_double(z2) << '\n';
    }
    run.statistical("occupation_mean", zm, {{"samples", reps}, {"alpha", alpha}});
    run.statistical("occupation_variance", zv, {{"samples", reps}, {"alpha", alpha}});
    run.csv("occupation_moments.csv", [&](std::ostream& o) { o << rows.str(); });

    const auto& cert = sampler.certificate();
    run.exact("truncation_certificate", cert.occupation_bound / min_band, 0.1,
              {{"spectral_radius", cert.spectral_radius},
               {"mass_bound", cert.mass_bound},
               {"occupation_bound", cert.occupation_bound},
               {"statistical_band", min_band},
               {"cutoff", run.cfg.cutoff}});

    if (net.edge_count() > crossing_calibration_max_edges) {
        run.skip("crossing_trace (more than 8 edges)");
        return;
    }
    if (alpha != 0.5) {
        run.skip("crossing_trace (needs alpha = 0.5)");
        return;
    }
    // Given the occupation, the crossing trace is calibrated against the exact
    // trace marginals of the current with weights beta_e u_x u_y, u = sqrt(2 occupation).
    run.timed("crossing_trace", [&] {
        std::vector<std::size_t> edges;
        for (std::size_t e = 0; e < net.edge_count(); ++e)
            if (!net.edge(e).is_loop() && net.beta(e) > 0.0) edges.push_back(e);
        struct Row {
            std::vector<double> predicted, naive, coupling;
        };
        const auto trace_beta = exact_measure(net, ModelKind::CurrentTrace);
        const auto rows_ = run.pool.map<Row>(reps, [&](std::size_t i) {
            const auto u = magnitudes_from_occupation(draws[i].occupation);
            std::vector<double> w(net.edge_count());
            for (std::size_t e = 0; e < w.size(); ++e) w[e] = net.beta(e) * u[net.edge(e).u] * u[net.edge(e).v];
            const auto law = exact_measure(net.with_weights(w), ModelKind::CurrentTrace);
            Row r;
            for (std::size_t e : edges) {
                r.predicted.push_back(law.marginal(e, 1));
                r.naive.push_back(trace_beta.marginal(e, 1));
                r.coupling.push_back(w[e]);
            }
            return r;
        });
        std::vector<double> z;
        std::ostringstream csv;
        csv << "edge,cell_low,cell_high,samples,crossed,expected,expected_unconditional,z\n";
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const std::size_t e = edges[k];
            std::vector<std::uint64_t> count(sign_cells, 0), hit(sign_cells, 0);
            std::vector<double> expected(sign_cells, 0.0), var(sign_cells, 0.0), naive(sign_cells, 0.0);
            for (std::size_t i = 0; i < reps; ++i) {
                const std::size_t c = cell_of(rows_[i].coupling[k]);
                const double p = rows_[i].predicted[k];
                ++count[c];
                hit[c] += draws[i].crossings[e] > 0;
                expected[c] += p;
                var[c] += p * (1.0 - p);
                naive[c] += rows_[i].naive[k];
            }
            for (std::size_t c = 0; c < sign_cells; ++c) {
                if (count[c] < 30 || var[c] < 2.0) continue;
                const double zz = (static_cast<double>(hit[c]) - expected[c]) / std::sqrt(var[c]);
                z.push_back(zz);
                csv << e << ',' << format_double(sign_cell_edges[c]) << ',' << format_double(sign_cell_edges[c + 1])
                    << ',' << count[c] << ',' << hit[c] << ',' << format_double(expected[c]) << ','
                    << format_double(naive[c]) << ',' << format_double(zz) << '\n';
            }
        }
        run.statistical("crossing_trace", z, {{"samples", reps}, {"cells", z.size()}});
        run.csv("crossing_trace.csv", [&](std::ostream& o) { o << csv.str(); });
    });
}

// -------------------------------------------------------------------- vrjp

struct CurrentAtoms {
    std::vector<CurrentConfig> atoms;
    std::map<CurrentConfig, std::size_t> index;
    std::vector<double> probability;  // last entry: everything not enumerated
};

// Sourceless currents with every entry <= cap, enough to leave < 1e-9 mass out.
std::optional<CurrentAtoms> enumerate_currents(const Network& net, double z_current) {
    const std::size_t m = net.edge_count();
    for (std::size_t cap = 2;; cap += 2) {
        const double combos = std::pow(double(cap + 1), double(m));
        if (combos > 2e5) return std::nullopt;
        CurrentAtoms a;
        CurrentConfig c(m, 0);
        CompensatedSum mass;
        for (;;) {
            if (incidence_parity_check(net, std::span<const std::uint32_t>(c))) {
                double logw = 0.0;
                for (std::size_t e = 0; e < m; ++e)
                    if (c[e]) logw += double(c[e]) * std::log(net.beta(e)) - std::lgamma(double(c[e]) + 1.0);
                const double p = std::exp(logw) / z_current;
                a.index.emplace(c, a.atoms.size());
                a.atoms.push_back(c);
                a.probability.push_back(p);
                mass.add(p);
            }
            std::size_t e = 0;
            while (e < m && c[e] == cap) c[e++] = 0;
            if (e == m) break;
            ++c[e];
        }
        const double rest = 1.0 - static_cast<double>(mass.value());
        if (rest < 1e-9 || m == 0) {
            a.probability.push_back(std::max(rest, 0.0));
            return a;
        }
    }
}

void vrjp_check(SuiteRun& run) {
    const Network& net = run.net;
    const std::size_t n = net.vertex_count();
    const std::size_t reps = run.cfg.replicas;
    const auto& tol = run.cfg.tolerances;
    VrjpOptions options;
    if (n > options.max_vertices) {
        std::ostringstream msg;
        msg << "jump process: " << n << " vertices exceed the exact two-point limit of " << options.max_vertices;
        throw CapacityError(msg.str());
    }
    std::vector<std::size_t> first = run.cfg.order;
    if (first.empty()) {
        first.resize(n);
        std::iota(first.begin(), first.end(), std::size_t{0});
    }
    validate_order(net, first);
    std::vector<std::size_t> second(first.rbegin(), first.rend());
    if (n >= 3) std::rotate(second.begin(), second.begin() + 1, second.end());

    struct Outcome {
        CurrentConfig current;
        bool sourceless = true;
    };
    auto simulate = [&](const std::vector<std::size_t>& order, Stream s) {
        const SeedSpec base = run.stream(s);
        return run.pool.map<Outcome>(reps, [&](std::size_t i) {
            Rng rng = make_rng(base.substream(i));
            VrjpState state = VrjpState::initial(net, order);
            while (!state.finished()) run_pass(net, state, rng, options);
            Outcome o;
            o.sourceless = incidence_parity_check(net, std::span<const std::uint32_t>(state.crossings));
            o.current = std::move(state.crossings);
            return o;
        });
    };
    std::vector<Outcome> a, b;
    run.timed("first_order", [&] { a = simulate(first, Stream::vrjp_first); });
    run.timed("second_order", [&] { b = simulate(second, Stream::vrjp_second); });

    std::size_t sourceless = 0;
    for (const auto& o : a) sourceless += o.sourceless;
    for (const auto& o : b) sourceless += o.sourceless;
    run.exact("sourceless", double(2 * reps - sourceless), 0.0, {{"runs", 2 * reps}});

    {
        Rng rng = make_rng(run.stream(Stream::vrjp_first).substream(0));
        const VrjpRun traced = run_vrjp_traced(net, first, rng, options);
        double worst = 0.0;
        for (std::size_t pass = 0; pass < traced.limit_weights.size(); ++pass)
            for (std::size_t e : net.incident(first[pass])) worst = std::max(worst, traced.limit_weights[pass][e]);
        run.exact("limit_weights", worst, 1e-12);
        if (!run.out.empty()) {
            std::ofstream f(run.out / "vrjp_trace_first.jsonl");
            write_trace_jsonl(f, traced);
        }
    }

    const auto pf = partition_functions(net);
    const double N = double(reps);
    {
        std::size_t empty = 0;
        for (const auto& o : a)
            empty += std::all_of(o.current.begin(), o.current.end(), [](std::uint32_t v) { return v == 0; });
        const double p0 = 1.0 / pf.current;
        const double z = (double(empty) - N * p0) / std::sqrt(N * p0 * (1.0 - p0));
        run.statistical("empty_current", {p0 < 1.0 ? z : (empty == reps ? 0.0 : INFINITY)},
                        {{"observed", double(empty) / N}, {"expected", p0}});
    }

    if (auto atoms = enumerate_currents(net, pf.current)) {
        std::vector<std::uint64_t> counts(atoms->probability.size(), 0);
        for (const auto& o : a) {
            auto it = atoms->index.find(o.current);
            ++counts[it == atoms->index.end() ? counts.size() - 1 : it->second];
        }
        const auto report = multinomial_test(counts, atoms->probability, tol.sigma_level, 1);
        run.statistical("current_law", cell_z(report), {{"samples", reps}, {"empirical_tv", report.empirical_tv}});
        run.csv("current_law.csv", [&](std::ostream& o) {
            o << "current,observed,expected\n";
            for (std::size_t i = 0; i < atoms->atoms.size(); ++i) {
                if (counts[i] == 0 && atoms->probability[i] * N < 1e-3) continue;
                o << join_current(atoms->atoms[i]) << ',' << counts[i] << ','
                  << format_double(atoms->probability[i] * N) << '\n';
            }
            o << "other," << counts.back() << ',' << format_double(atoms->probability.back() * N) << '\n';
        });
    } else {
        run.skip("current_law (too many currents to enumerate)");
    }

    const auto trace = exact_measure(net, ModelKind::CurrentTrace);
    std::vector<std::uint64_t> ca(trace.size(), 0), cb(trace.size(), 0);
    for (const auto& o : a) ++ca[edge_index(trace_of(o.current))];
    for (const auto& o : b) ++cb[edge_index(trace_of(o.current))];
    const auto ra = multinomial_test(ca, trace.probabilities(), tol.sigma_level, 1);
    run.statistical("trace_law", cell_z(ra), {{"samples", reps}, {"empirical_tv", ra.empirical_tv}});
    if (first != second) {
        const auto rb = two_sample_test(ca, cb, tol.sigma_level, 1);
        json order_a = first, order_b = second;
        run.statistical("order_invariance", cell_z(rb), {{"first_order", order_a}, {"second_order", order_b}});
    } else {
        run.skip("order_invariance (single vertex)");
    }
    run.csv("vrjp_trace_counts.csv", [&](std::ostream& o) {
        o << "configuration,first_order,second_order,expected\n";
        for (std::size_t i = 0; i < trace.size(); ++i)
            o << configuration_string(trace.space(), i) << ',' << ca[i] << ',' << cb[i] << ','
              << format_double(trace.probability(i) * N) << '\n';
    });
    run.csv("vrjp_currents.csv", [&](std::ostream& o) {
        o << "stream,draw,current\n";
        for (std::size_t i = 0; i < std::min(reps, sample_dump_rows); ++i)
            o << Stream::vrjp_first << ',' << i << ',' << join_current(a[i].current) << '\n';
    });
}

using SuiteFn = void (*)(SuiteRun&);

SuiteFn suite_function(Suite s) {
    switch (s) {
        case Suite::VerifyCoupling: return verify_coupling;
        case Suite::GffCheck: return gff_check;
        case Suite::LoopsoupCheck: return loopsoup_check;
        case Suite::VrjpCheck: return vrjp_check;
        case Suite::ReconstructCheck: return reconstruct_check;
        case Suite::Full: break;
    }
    throw ContractError("no single suite for 'full'");
}

json check_to_json(const CheckRecord& c) {
    json j = {{"suite", c.suite},
              {"name", c.name},
              {"kind", c.statistical ? "statistical" : "exact"},
              {"statistic", c.statistic},
              {"tolerance", c.tolerance},
              {"verdict", c.pass ? "pass" : "fail"}};
    if (c.statistical) {
        j["comparisons"] = c.z.size();
        j["z"] = c.z;
    }
    j["detail"] = c.detail;
    return j;
}

}  // namespace

std::string to_string(Suite suite) {
    switch (suite) {
        case Suite::VerifyCoupling: return "verify-coupling";
        case Suite::GffCheck: return "gff-check";
        case Suite::LoopsoupCheck: return "loopsoup-check";
        case Suite::VrjpCheck: return "vrjp-check";
        case Suite::ReconstructCheck: return "reconstruct-check";
        case Suite::Full: return "full";
    }
    return "?";
}

Suite parse_suite(const std::string& name) {
    for (Suite s : {Suite::VerifyCoupling, Suite::GffCheck, Suite::LoopsoupCheck, Suite::VrjpCheck,
                    Suite::ReconstructCheck, Suite::Full})
        if (to_string(s) == name) return s;
    throw ValidationError("unknown suite '" + name +
                          "' (expected verify-coupling, gff-check, loopsoup-check, vrjp-check, reconstruct-check "
                          "or full)");
}

void ExperimentConfig::validate() const {
    if (replicas < 100) throw ValidationError("replicas must be at least 100");
    if (!(tolerances.tv_exact > 0.0)) throw ValidationError("tolerances.tv_exact must be positive");
    if (!(tolerances.tv_recon > 0.0)) throw ValidationError("tolerances.tv_recon must be positive");
    if (!(tolerances.sigma_level > 0.0)) throw ValidationError("tolerances.sigma_level must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be a positive number");
    if (cutoff < 2) throw ValidationError("cutoff must be at least 2");
    if (!(truncation_tolerance > 0.0)) throw ValidationError("truncation_tolerance must be positive");
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    static const std::vector<std::string> known = {"network", "suite",  "replicas",
                                                   "seed",    "tolerances", "alpha",
                                                   "cutoff",  "truncation_tolerance", "order",
                                                   "chain",   "out",    "threads"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ValidationError("config: unknown field '" + key + "'");

    ExperimentConfig c;
    auto field = [&](const char* key, auto& target) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(target);
        } catch (const json::exception&) {
            throw ValidationError(std::string("config: field '") + key + "' has the wrong type");
        }
    };
    std::string network, suite, out;
    field("network", network);
    c.network_path = network;
    if (j.contains("suite")) {
        field("suite", suite);
        c.suite = parse_suite(suite);
    }
    field("replicas", c.replicas);
    field("seed", c.seed);
    field("alpha", c.alpha);
    field("cutoff", c.cutoff);
    field("truncation_tolerance", c.truncation_tolerance);
    field("order", c.order);
    field("out", out);
    c.out_dir = out;
    field("threads", c.threads);
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) throw ValidationError("config: field 'tolerances' must be an object");
        for (const auto& [key, value] : t.items()) {
            double* slot = key == "tv_exact"      ? &c.tolerances.tv_exact
                           : key == "tv_recon"    ? &c.tolerances.tv_recon
                           : key == "sigma_level" ? &c.tolerances.sigma_level
                                                  : nullptr;
            if (!slot) throw ValidationError("config: unknown field 'tolerances." + key + "'");
            if (!value.is_number()) throw ValidationError("config: field 'tolerances." + key + "' must be a number");
            *slot = value.get<double>();
        }
    }
    if (j.contains("chain")) {
        const json& ch = j["chain"];
        if (!ch.is_object()) throw ValidationError("config: field 'chain' must be an object");
        for (const auto& [key, value] : ch.items()) {
            if (value.is_null() && (key == "burn_in_sweeps" || key == "thinning_sweeps")) continue;  // default
            if (!value.is_number_unsigned())
                throw ValidationError("config: field 'chain." + key + "' must be a nonnegative integer");
            if (key == "burn_in_sweeps")
                c.chain.burn_in_sweeps = value.get<std::size_t>();
            else if (key == "thinning_sweeps")
                c.chain.thinning_sweeps = value.get<std::size_t>();
            else
                throw ValidationError("config: unknown field 'chain." + key + "'");
        }
    }
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json chain = json::object();
    chain["burn_in_sweeps"] = c.chain.burn_in_sweeps ? json(*c.chain.burn_in_sweeps) : json(nullptr);
    chain["thinning_sweeps"] = c.chain.thinning_sweeps ? json(*c.chain.thinning_sweeps) : json(nullptr);
    return {{"network", c.network_path.string()},
            {"suite", to_string(c.suite)},
            {"replicas", c.replicas},
            {"seed", c.seed},
            {"tolerances",
             {{"tv_exact", c.tolerances.tv_exact},
              {"tv_recon", c.tolerances.tv_recon},
              {"sigma_level", c.tolerances.sigma_level}}},
            {"alpha", c.alpha},
            {"cutoff", c.cutoff},
            {"truncation_tolerance", c.truncation_tolerance},
            {"order", c.order},
            {"chain", chain},
            {"out", c.out_dir.string()},
            {"threads", c.threads}};
}

bool ExperimentReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

json ExperimentReport::to_json() const {
    json checks_json = json::array();
    for (const auto& c : checks) checks_json.push_back(check_to_json(c));
    return {{"verdict", pass() ? "pass" : "fail"},
            {"config", config_to_json(config)},
            {"environment", {{"seed", config.seed}, {"threads", threads}, {"version", version}}},
            {"checks", checks_json},
            {"skipped", skipped},
            {"timings", timings}};
}

ExperimentReport run_suite(const Network& net, const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    const WorkerPool pool(config.threads == 0 ? default_thread_count() : config.threads);
    report.threads = pool.threads();

    std::vector<Suite> suites;
    if (config.suite == Suite::Full)
        suites = {Suite::VerifyCoupling, Suite::ReconstructCheck, Suite::GffCheck, Suite::LoopsoupCheck,
                  Suite::VrjpCheck};
    else
        suites = {config.suite};

    for (Suite s : suites) {
        const std::string name = to_string(s);
        const bool nested = config.suite == Suite::Full;
        if (nested) {
            const bool pinned = net.pinning() && net.pinning()->conductance > 0.0;
            if ((s == Suite::GffCheck || s == Suite::LoopsoupCheck) && !pinned) {
                report.skipped.push_back(name + " (network has no pinning)");
                continue;
            }
            if (s == Suite::VrjpCheck && net.vertex_count() > VrjpOptions{}.max_vertices) {
                report.skipped.push_back(name + " (more than 12 vertices)");
                continue;
            }
        }
        fs::path out = config.out_dir;
        if (!out.empty() && nested) out /= name;
        SuiteRun run(net, config, pool, name, out);
        const auto t0 = std::chrono::steady_clock::now();
        suite_function(s)(run);
        run.finalize();
        run.timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.timings[name] = run.timings;
        for (auto& c : run.checks) report.checks.push_back(std::move(c));
        for (auto& k : run.skipped) report.skipped.push_back(std::move(k));
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const Network net = load_network(config.network_path);
    ExperimentReport report = run_suite(net, config);
    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        write_json_file(config.out_dir / "report.json", report.to_json());
    }
    return report;
}

int exit_status(const ExperimentReport& report) { return report.pass() ? 0 : 1; }

}  // namespace current_lab
