#include "sshq/experiment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sshq/free_fermion.hpp"
#include "sshq/noise.hpp"
#include "sshq/parallel.hpp"
#include "sshq/shot_io.hpp"

namespace sshq {

namespace {

struct UnitStats {
    double sub_unbiased = 0.0;
    double sub_plugin = 0.0;
    double full = 0.0;
    std::optional<ShotTable> table;
};

Circuit full_circuit(const ExperimentConfig& cfg, InitialState initial, double t) {
    Circuit c = prepare_initial(initial, cfg.L);
    c.append(evolution_circuit(t, cfg.L, cfg.boundary, cfg.evolution));
    return c;
}

std::vector<int> all_qubits(int L) {
    std::vector<int> q(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) q[static_cast<std::size_t>(i)] = i;
    return q;
}

bool is_contiguous(std::span<const int> sorted) {
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] != sorted[i - 1] + 1) return false;
    }
    return true;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    const auto n = static_cast<double>(v.size());
    return std::sqrt(s / (n - 1.0) / n);
}

/// Fills the entropy point from raw/full purities and the noise model.
void finish_entropy_point(const ExperimentConfig& cfg, EntropyPoint& pt, double raw_purity, double raw_sigma, int n_sub) {
    pt.raw = renyi2(raw_purity);
    if (!pt.raw) pt.flags.push_back("nonpositive_purity");
    if (pt.raw && raw_sigma > 0.0) pt.sigma = raw_sigma / (raw_purity * std::numbers::ln2);

    const auto est = estimate_p_tot_from_full_purity(pt.full_purity, cfg.L);
    pt.p_tot_estimated = est.p_tot;
    if (!(cfg.mitigate && cfg.p_layer > 0.0)) {
        pt.mitigated = pt.raw;
        return;
    }
    if (cfg.p_tot_source == PTotSource::Estimated && est.clamped) pt.flags.push_back("p_tot_clamped");
    const double p = cfg.p_tot_source == PTotSource::True ? pt.p_tot_true : pt.p_tot_estimated;
    if (p >= 1.0) {
        pt.flags.push_back("p_tot_saturated");
        return;
    }
    const auto m = mitigate_purity(raw_purity, p, n_sub);
    if (m.clamped) pt.flags.push_back("mitigation_clamped");
    pt.mitigated = renyi2(m.value);
}

void apply_shift(const ExperimentConfig& cfg, QuenchRun& run) {
    if (cfg.shift == ShiftChoice::None || run.entropy.empty()) return;
    TimeSeries series;
    for (const auto& pt : run.entropy) {
        series.t.push_back(pt.t);
        series.value.push_back(pt.mitigated);
    }
    try {
        const auto aligned = shift_align(series, cfg.shift == ShiftChoice::ZeroAtT0 ? ShiftMode::ZeroAtT0 : ShiftMode::ValleyToZero);
        run.shift_offset = aligned.offset;
        for (std::size_t i = 0; i < run.entropy.size(); ++i) run.entropy[i].mitigated = aligned.series.value[i];
    } catch (const InputError&) {
        for (auto& pt : run.entropy) pt.flags.push_back("shift_failed");
    }
}

void run_entropy_sampled(const ExperimentConfig& cfg, const RunOptions& opts, const std::vector<QuantumState>& states, QuenchRun& run) {
    const std::size_t n_t = cfg.times.size();
    const auto n_u = static_cast<std::size_t>(cfg.n_unitaries);
    const auto subset = cfg.resolved_subsystem();
    const auto full = all_qubits(cfg.L);
    const bool unbiased_ok = cfg.n_shots >= 2;
    std::vector<UnitStats> grid(n_t * n_u);
    parallel_for(grid.size(), opts.threads, [&](std::size_t item) {
        const std::size_t ti = item / n_u;
        const std::size_t u = item % n_u;
        const auto& pt = run.entropy[ti];
        MeasurementOptions mo;
        mo.p_tot = pt.p_tot_true;
        mo.readout_flip = cfg.readout_flip;
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(SeedStream::RandomizedMeasurement), ti, u));
        ShotTable table = measure_randomized(states[ti], static_cast<int>(u) + 1, cfg.n_shots, rng, mo);
        UnitStats& s = grid[item];
        s.sub_plugin = purity_statistic(table.counts, subset, EstimatorVariant::PlugIn);
        s.sub_unbiased = unbiased_ok ? purity_statistic(table.counts, subset, EstimatorVariant::Unbiased) : std::nan("");
        s.full = purity_statistic(table.counts, full, cfg.estimator);
        if (cfg.save_shots) s.table = std::move(table);
    });
    if (cfg.save_shots) run.shots.assign(n_t, {});
    for (std::size_t ti = 0; ti < n_t; ++ti) {
        std::vector<double> unb, plug, fullv;
        for (std::size_t u = 0; u < n_u; ++u) {
            auto& s = grid[ti * n_u + u];
            unb.push_back(s.sub_unbiased);
            plug.push_back(s.sub_plugin);
            fullv.push_back(s.full);
            if (cfg.save_shots) run.shots[ti].push_back(std::move(*s.table));
        }
        auto& pt = run.entropy[ti];
        pt.purity_unbiased = mean_of(unb);
        pt.purity_plugin = mean_of(plug);
        pt.sigma_unbiased = std_error_of(unb);
        pt.sigma_plugin = std_error_of(plug);
        pt.full_purity = mean_of(fullv);
        const bool use_unbiased = cfg.estimator == EstimatorVariant::Unbiased;
        finish_entropy_point(cfg, pt, use_unbiased ? pt.purity_unbiased : pt.purity_plugin,
                             use_unbiased ? pt.sigma_unbiased : pt.sigma_plugin, static_cast<int>(subset.size()));
    }
}

constexpr int kMaxEnumeratedFullPurity = 8;

void run_entropy_exact(const ExperimentConfig& cfg, const RunOptions& opts, const std::vector<QuantumState>& states, QuenchRun& run) {
    const auto subset = cfg.resolved_subsystem();
    const auto full = all_qubits(cfg.L);
    parallel_for(states.size(), opts.threads, [&](std::size_t ti) {
        auto& pt = run.entropy[ti];
        const double purity = design_averaged_purity(states[ti], subset, pt.p_tot_true, cfg.readout_flip);
        pt.purity_unbiased = pt.purity_plugin = purity;
        if (cfg.L <= kMaxEnumeratedFullPurity) {
            pt.full_purity = design_averaged_purity(states[ti], full, pt.p_tot_true, cfg.readout_flip);
        } else {
            pt.full_purity = depolarized_purity(1.0, pt.p_tot_true, cfg.L);
            pt.flags.push_back("full_purity_analytic");
        }
        finish_entropy_point(cfg, pt, purity, 0.0, static_cast<int>(subset.size()));
    });
}

void run_twist(const ExperimentConfig& cfg, const RunOptions& opts, const std::vector<QuantumState>& states, QuenchRun& run) {
    const std::size_t n_t = cfg.times.size();
    run.twist.resize(n_t);
    if (cfg.save_shots && !opts.exact_probabilities) run.twist_shots.assign(n_t, Counts{});
    parallel_for(n_t, opts.threads, [&](std::size_t ti) {
        auto& tp = run.twist[ti];
        tp.t = cfg.times[ti];
        tp.n_layers = full_circuit(cfg, run.initial, tp.t).layer_count();
        tp.p_tot_true = effective_p_tot(cfg.p_layer, tp.n_layers);
        const Distribution exact = probabilities(states[ti]);
        tp.spin_exact = twist_order_parameter(exact, cfg.q_spin);
        tp.particle_exact = particle_twist_amplitude(exact, cfg.q_particle);
        Distribution noisy = apply_depolarizing(exact, tp.p_tot_true);
        if (opts.exact_probabilities) {
            noisy = apply_readout_flip(noisy, cfg.readout_flip);
            tp.spin_raw = twist_expectation(noisy, cfg.q_spin, TwistKind::Spin, TwistSource::Raw);
            tp.particle_raw = twist_expectation(noisy, cfg.q_particle, TwistKind::Particle, TwistSource::Raw);
            try {
                const Distribution post = postselect_half_filling(noisy);
                tp.spin_post = twist_expectation(post, cfg.q_spin, TwistKind::Spin, TwistSource::Postselected);
                tp.particle_post = twist_expectation(post, cfg.q_particle, TwistKind::Particle, TwistSource::Postselected);
            } catch (const InvariantError&) {
                tp.post_empty = true;
            }
            return;
        }
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(SeedStream::Twist), ti, 0));
        Counts counts = sample_shots(noisy, cfg.resolved_twist_shots(), rng);
        counts = apply_readout_flip(counts, cfg.readout_flip, rng);
        tp.spin_raw = twist_order_parameter(counts, cfg.q_spin);
        tp.particle_raw = particle_twist_amplitude(counts, cfg.q_particle);
        const auto post = postselect_half_filling(counts);
        tp.rejected = post.rejected;
        tp.post_empty = post.empty;
        if (!post.empty) {
            tp.spin_post = twist_order_parameter(post.counts, cfg.q_spin, TwistSource::Postselected);
            tp.particle_post = particle_twist_amplitude(post.counts, cfg.q_particle, TwistSource::Postselected);
        }
        if (cfg.save_shots) run.twist_shots[ti] = std::move(counts);
    });
}

std::string fmt_value(double v) { return fmt::format("{:.12g}", v); }
std::string fmt_value(const std::optional<double>& v) { return v ? fmt_value(*v) : std::string("nan"); }

std::string join_flags(const std::vector<std::string>& flags) {
    if (flags.empty()) return "ok";
    std::string out;
    for (std::size_t i = 0; i < flags.size(); ++i) out += (i ? ";" : "") + flags[i];
    return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

} // namespace

double oracle_entropy(InitialState initial, double t, int L, Boundary boundary, std::span<const int> subset, EvolutionMode mode) {
    std::vector<int> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    if (is_contiguous(sorted)) return ff::block_renyi_entropy(ff::chain_correlation_matrix(initial, t, L, boundary), sorted);
    Circuit c = prepare_initial(initial, L);
    c.append(evolution_circuit(t, L, boundary, mode));
    return -std::log2(subsystem_purity(run_circuit(c, QuantumState(L)), std::span<const int>(sorted)));
}

std::filesystem::path run_directory(const ExperimentConfig& config, const std::filesystem::path& out_dir, InitialState initial) {
    return config.initials.size() > 1 ? out_dir / to_string(initial) : out_dir;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    ExperimentResult result;
    const auto subset = cfg.resolved_subsystem();
    const std::size_t n_t = cfg.times.size();
    for (auto initial : cfg.initials) {
        QuenchRun run;
        run.initial = initial;
        std::vector<QuantumState> states(n_t, QuantumState(cfg.L));
        run.entropy.resize(n_t);
        parallel_for(n_t, opts.threads, [&](std::size_t ti) {
            const double t = cfg.times[ti];
            const Circuit c = full_circuit(cfg, initial, t);
            states[ti] = run_circuit(c, QuantumState(cfg.L));
            auto& pt = run.entropy[ti];
            pt.t = t;
            pt.n_layers = c.layer_count() + 1; // plus the random-rotation layer
            pt.p_tot_true = effective_p_tot(cfg.p_layer, pt.n_layers);
            pt.oracle = cfg.outputs.entropy ? oracle_entropy(initial, t, cfg.L, cfg.boundary, subset, cfg.evolution) : 0.0;
        });
        if (cfg.outputs.entropy) {
            if (opts.exact_probabilities) {
                run_entropy_exact(cfg, opts, states, run);
            } else {
                run_entropy_sampled(cfg, opts, states, run);
            }
            apply_shift(cfg, run);
        } else {
            run.entropy.clear();
        }
        if (cfg.outputs.twist || cfg.outputs.berry) run_twist(cfg, opts, states, run);
        result.runs.push_back(std::move(run));
    }
    return result;
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result, const std::filesystem::path& out_dir, const RunOptions& opts) {
    for (const auto& run : result.runs) {
        const auto dir = run_directory(cfg, out_dir, run.initial);
        std::filesystem::create_directories(dir);
        ExperimentConfig single = cfg;
        single.initials = {run.initial};
        {
            auto out = open_output(dir / "manifest.txt");
            fmt::print(out, "# {}\n# mode = {}\n# shift_offset = {}\n", kArtifactVersion,
                       opts.exact_probabilities ? "exact_probabilities" : "sampled", fmt_value(run.shift_offset));
            out << single.to_text();
        }
        if (cfg.outputs.entropy) {
            auto out = open_output(dir / "entropy.csv");
            out << "t,raw,mitigated,oracle,sigma,flags\n";
            for (const auto& pt : run.entropy) {
                fmt::print(out, "{},{},{},{},{},{}\n", fmt_value(pt.t), fmt_value(pt.raw), fmt_value(pt.mitigated), fmt_value(pt.oracle),
                           fmt_value(pt.sigma), join_flags(pt.flags));
            }
            auto est = open_output(dir / "estimators.csv");
            est << "t,purity_unbiased,purity_plugin,sigma_unbiased,sigma_plugin,s_unbiased,s_plugin\n";
            for (const auto& pt : run.entropy) {
                fmt::print(est, "{},{},{},{},{},{},{}\n", fmt_value(pt.t), fmt_value(pt.purity_unbiased), fmt_value(pt.purity_plugin),
                           fmt_value(pt.sigma_unbiased), fmt_value(pt.sigma_plugin), fmt_value(renyi2(pt.purity_unbiased)),
                           fmt_value(renyi2(pt.purity_plugin)));
            }
            auto noise = open_output(dir / "noise.csv");
            noise << "t,n_layers,p_tot_true,p_tot_estimated,full_purity\n";
            for (const auto& pt : run.entropy) {
                fmt::print(noise, "{},{},{},{},{}\n", fmt_value(pt.t), pt.n_layers, fmt_value(pt.p_tot_true), fmt_value(pt.p_tot_estimated),
                           fmt_value(pt.full_purity));
            }
        }
        auto complex_cols = [](const TwistResult& z, bool present) {
            return present ? fmt::format("{},{}", fmt_value(z.z.real()), fmt_value(z.z.imag())) : std::string("nan,nan");
        };
        if (cfg.outputs.twist) {
            for (const auto& [name, spin] : {std::pair{"twist.csv", true}, std::pair{"particle_twist.csv", false}}) {
                auto out = open_output(dir / name);
                out << "t,re_raw,im_raw,re_post,im_post,re_exact,im_exact\n";
                for (const auto& tp : run.twist) {
                    const auto& raw = spin ? tp.spin_raw : tp.particle_raw;
                    const auto& post = spin ? tp.spin_post : tp.particle_post;
                    const auto& exact = spin ? tp.spin_exact : tp.particle_exact;
                    fmt::print(out, "{},{},{},{}\n", fmt_value(tp.t), complex_cols(raw, true), complex_cols(post, !tp.post_empty),
                               complex_cols(exact, true));
                }
            }
        }
        if (cfg.outputs.berry) {
            auto out = open_output(dir / "berry.csv");
            out << "t,gamma_raw,gamma_post,gamma_exact,flags\n";
            for (const auto& tp : run.twist) {
                std::vector<std::string> flags;
                const auto raw = tp.particle_raw.berry();
                const auto exact = tp.particle_exact.berry();
                std::optional<double> post;
                if (tp.post_empty) {
                    flags.push_back("post_empty");
                } else {
                    const auto b = tp.particle_post.berry();
                    post = b.gamma;
                    if (!b.reliable) flags.push_back("post_unreliable");
                }
                if (!raw.reliable) flags.push_back("raw_unreliable");
                if (!exact.reliable) flags.push_back("exact_unreliable");
                fmt::print(out, "{},{},{},{},{}\n", fmt_value(tp.t), fmt_value(raw.gamma), fmt_value(post), fmt_value(exact.gamma), join_flags(flags));
            }
        }
        if (cfg.dump_circuit) {
            std::filesystem::create_directories(dir / "circuits");
            for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
                auto out = open_output(dir / "circuits" / fmt::format("t_{:03}.txt", ti));
                fmt::print(out, "# t = {}\n", fmt_value(cfg.times[ti]));
                dump_circuit(full_circuit(cfg, run.initial, cfg.times[ti]), out);
            }
        }
        if (cfg.save_shots) {
            if (!run.shots.empty()) {
                std::filesystem::create_directories(dir / "shots");
                for (std::size_t ti = 0; ti < run.shots.size(); ++ti) {
                    ShotFileHeader h{cfg.L, cfg.n_unitaries, cfg.n_shots, cfg.seed, cfg.times[ti]};
                    write_shot_tables(dir / "shots" / fmt::format("t_{:03}.txt", ti), h, run.shots[ti]);
                }
            }
            if (!run.twist_shots.empty()) {
                std::filesystem::create_directories(dir / "twist_shots");
                for (std::size_t ti = 0; ti < run.twist_shots.size(); ++ti) {
                    ShotFileHeader h{cfg.L, 0, cfg.resolved_twist_shots(), cfg.seed, cfg.times[ti]};
                    ShotTable table{0, run.twist_shots[ti], {}};
                    write_shot_tables(dir / "twist_shots" / fmt::format("t_{:03}.txt", ti), h, std::span<const ShotTable>(&table, 1));
                }
            }
        }
    }
}

} // namespace sshq
