#include "synthctl/simulation.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "cv_folds.hpp"
#include "synthctl/csv.hpp"
#include "synthctl/errors.hpp"
#include "synthctl/inference.hpp"
#include "synthctl/tuning.hpp"

namespace synthctl {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t k1, std::uint64_t k2,
                          std::uint64_t k3) {
    std::uint64_t h = mix64(root + kGolden);
    h = mix64(h + k1 + kGolden);
    h = mix64(h + k2 + kGolden);
    h = mix64(h + k3 + kGolden);
    return h;
}

SimulatedSample generate_sample(const SimulationConfig& config,
                                std::uint64_t param_seed, std::uint64_t shock_seed) {
    if (config.n_controls < 1 || config.t0 < 1 || config.t_post < 1 ||
        config.k < 1 || config.f < 1)
        throw ValidationError("simulation counts must be positive");
    if (config.r != 1 && config.r != 2)
        throw ValidationError("nonlinearity degree r must be 1 or 2");

    const int n = config.n_controls + 1;
    const int t_total = config.t0 + config.t_post;

    std::mt19937_64 param_rng(param_seed);
    std::mt19937_64 shock_rng(shock_seed);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * std::sqrt(3.0));
    std::normal_distribution<double> coef(10.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    // Draw order is prefix-stable in the unit count: time coefficients
    // first, then each unit's predictors as a block. Two samples that share
    // seeds and the time window then agree unit for unit, so donor pools of
    // different sizes extend the same universe (a paired design across J).
    SampleParams params;
    params.beta.resize(t_total, config.k);
    for (int t = 0; t < t_total; ++t)
        for (int c = 0; c < config.k; ++c) params.beta(t, c) = coef(param_rng);
    params.lambda.resize(t_total, config.f);
    for (int t = 0; t < t_total; ++t)
        for (int c = 0; c < config.f; ++c) params.lambda(t, c) = coef(param_rng);
    params.X.resize(n, config.k);
    params.mu.resize(n, config.f);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < config.k; ++c) params.X(i, c) = unif(param_rng);
        for (int c = 0; c < config.f; ++c) params.mu(i, c) = unif(param_rng);
    }

    Eigen::MatrixXd latent = params.X * params.beta.transpose() +
                             params.mu * params.lambda.transpose();  // N x T
    if (config.shock_scale != 0.0) {
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < t_total; ++t)
                latent(i, t) += config.shock_scale * noise(shock_rng);
    }

    const double lo = latent.minCoeff();
    const double hi = latent.maxCoeff();
    if (!(hi > lo)) throw ValidationError("degenerate latent sample (constant outcomes)");
    Eigen::MatrixXd untreated = (latent.array() - lo) / (hi - lo);
    if (config.r == 2) untreated = untreated.array().square();

    Eigen::VectorXd effects(config.t_post);
    for (int s = 0; s < config.t_post; ++s)
        effects(s) = config.effect_step * (s + 1);

    Eigen::MatrixXd outcomes = untreated;
    for (int s = 0; s < config.t_post; ++s) outcomes(0, config.t0 + s) += effects(s);

    std::vector<std::string> unit_ids(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) unit_ids[static_cast<size_t>(i)] = "u" + std::to_string(i + 1);
    std::vector<std::string> time_labels(static_cast<size_t>(t_total));
    for (int t = 0; t < t_total; ++t)
        time_labels[static_cast<size_t>(t)] = "t" + std::to_string(t + 1);
    std::vector<std::string> predictor_labels(static_cast<size_t>(config.k));
    for (int c = 0; c < config.k; ++c)
        predictor_labels[static_cast<size_t>(c)] = "x" + std::to_string(c + 1);

    SimulatedSample sample;
    sample.panel = make_panel(std::move(unit_ids), std::move(time_labels),
                              std::move(outcomes), params.X, std::move(predictor_labels),
                              "u1", config.t0);
    sample.true_effects = std::move(effects);
    sample.latent = std::move(latent);
    sample.params = std::move(params);
    return sample;
}

std::vector<StudySetting> paper_settings() {
    std::vector<StudySetting> settings;
    for (int r : {1, 2})
        for (int t0 : {15, 30})
            for (int j : {25, 50})
                settings.push_back({j, t0, r});
    return settings;
}

namespace {

struct MethodDrawStats {
    Eigen::MatrixXd errors;   // draws x t_post, NaN where the fit failed
    Eigen::MatrixXi covered;  // draws x t_post, -1 where failed
    TuningRecord tuning;
};

struct TaskResult {
    std::vector<MethodDrawStats> per_method;
    std::vector<ReplicationRecord> ledger;
};

void run_tasks(int n_tasks, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n_tasks <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                while (true) {
                    const int i = next.fetch_add(1);
                    if (i >= n_tasks) break;
                    fn(i);
                }
            } catch (...) {
                errors[static_cast<size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

StudyResult run_study(const StudyConfig& config, const std::vector<Method>& methods) {
    if (config.settings.empty()) throw ValidationError("study needs at least one setting");
    if (methods.empty()) throw ValidationError("study needs at least one method");
    if (config.n_param_sets < 1 || config.n_shock_draws < 1)
        throw ValidationError("study replication counts must be positive");

    const int n_settings = static_cast<int>(config.settings.size());
    const int n_methods = static_cast<int>(methods.size());
    const int n_tasks = n_settings * config.n_param_sets;
    const double z = normal_quantile(0.5 * (1.0 + config.ci_level));
    const SolverOptions opts;

    std::vector<TaskResult> results(static_cast<size_t>(n_tasks));

    auto task = [&](int task_index) {
        const int si = task_index / config.n_param_sets;
        const int pset = task_index % config.n_param_sets;
        const StudySetting& setting = config.settings[static_cast<size_t>(si)];

        SimulationConfig sim;
        sim.n_controls = setting.n_controls;
        sim.t0 = setting.t0;
        sim.r = setting.r;
        sim.t_post = config.t_post;
        sim.k = config.k;
        sim.f = config.f;
        sim.shock_scale = config.shock_scale;

        // Streams are keyed by (T0, r, pset) rather than the setting index,
        // so settings that differ only in the donor count share their
        // parameter universes and shock paths; J comparisons are then paired
        // instead of independent.
        const std::uint64_t window_key =
            static_cast<std::uint64_t>(setting.t0) * 8 + static_cast<std::uint64_t>(setting.r);
        const std::uint64_t param_seed = derive_seed(config.seed, 0xA11CE, window_key, pset);
        auto shock_seed = [&](int draw) {
            return derive_seed(config.seed, 0xB0B, window_key,
                               static_cast<std::uint64_t>(pset) * 1024 +
                                   static_cast<std::uint64_t>(draw));
        };

        TaskResult& out = results[static_cast<size_t>(task_index)];
        out.per_method.resize(static_cast<size_t>(n_methods));
        for (auto& ms : out.per_method) {
            ms.errors = Eigen::MatrixXd::Constant(config.n_shock_draws, config.t_post,
                                                  std::numeric_limits<double>::quiet_NaN());
            ms.covered = Eigen::MatrixXi::Constant(config.n_shock_draws, config.t_post, -1);
        }

        // Tuning is selected once per parameter set, on the first shock draw,
        // and held fixed across the remaining draws.
        SimulatedSample first = generate_sample(sim, param_seed, shock_seed(0));
        const ColumnSpec spec = ColumnSpec::all_pretreatment(first.panel);
        std::vector<bool> method_usable(static_cast<size_t>(n_methods), true);
        for (int mi = 0; mi < n_methods; ++mi) {
            TuningRecord rec;
            rec.setting_index = si;
            rec.param_set = pset;
            rec.method = methods[static_cast<size_t>(mi)];
            try {
                auto [tp, surface] =
                    select_tuning(first.panel, spec, methods[static_cast<size_t>(mi)],
                                  config.cv_scheme, config.tuning_grid_step, false, opts);
                rec.a_star = tp.a_star;
                rec.b_star = tp.b_star;
                rec.converged = surface.converged;
            } catch (const SolverError&) {
                // The parameter set stays in the ledger as failed draws for
                // this method; the rest of the study continues.
                rec.converged = false;
                method_usable[static_cast<size_t>(mi)] = false;
            }
            out.per_method[static_cast<size_t>(mi)].tuning = rec;
        }

        for (int draw = 0; draw < config.n_shock_draws; ++draw) {
            ReplicationRecord led;
            led.setting_index = si;
            led.param_set = pset;
            led.shock_draw = draw;
            led.param_seed = param_seed;
            led.shock_seed = shock_seed(draw);

            SimulatedSample sample =
                draw == 0 ? std::move(first) : generate_sample(sim, param_seed, shock_seed(draw));
            MatchingMatrix m = build_matching(sample.panel, spec, false);
            Eigen::VectorXd eigs = gram_eigenvalues(m.z0);
            std::vector<detail::DonorFold> folds =
                detail::build_donor_folds(sample.panel, spec, false);

            for (int mi = 0; mi < n_methods; ++mi) {
                const Method method = methods[static_cast<size_t>(mi)];
                MethodDrawStats& ms = out.per_method[static_cast<size_t>(mi)];
                if (!method_usable[static_cast<size_t>(mi)]) {
                    led.ok = false;
                    if (led.note.empty())
                        led.note = std::string(method_name(method)) + ": tuning selection failed";
                    continue;
                }
                const double a_star = ms.tuning.a_star;
                const double b_star = ms.tuning.b_star;
                try {
                    TuningParams tp = scale_from_eigenvalues(
                        eigs, static_cast<int>(m.z0.cols()), a_star, b_star);
                    WeightVector wv = fit_weights(sample.panel, m, method, tp, opts);
                    EffectEstimate e = estimate_effect(sample.panel, wv);
                    Eigen::MatrixXd sq =
                        detail::donor_sq_error_matrix(folds, method, a_star, b_star, opts);
                    Eigen::VectorXd variance = sq.colwise().mean().transpose();
                    for (int s = 0; s < config.t_post; ++s) {
                        const double tau_hat = e.gap(sim.t0 + s);
                        const double err = tau_hat - sample.true_effects(s);
                        ms.errors(draw, s) = err;
                        const double half = z * std::sqrt(variance(sim.t0 + s));
                        ms.covered(draw, s) = std::abs(err) <= half ? 1 : 0;
                    }
                } catch (const SolverError& ex) {
                    led.ok = false;
                    if (!led.note.empty()) led.note += "; ";
                    led.note += std::string(method_name(method)) + ": " + ex.what();
                }
            }
            out.ledger.push_back(std::move(led));
        }
    };

    run_tasks(n_tasks, config.threads, task);

    StudyResult study;
    for (int si = 0; si < n_settings; ++si) {
        for (int mi = 0; mi < n_methods; ++mi) {
            StudyCell cell;
            cell.setting = config.settings[static_cast<size_t>(si)];
            cell.method = methods[static_cast<size_t>(mi)];

            double bias_sum = 0.0;
            int bias_count = 0;
            double sd_sum = 0.0;
            int sd_count = 0;
            long covered = 0, cover_total = 0;
            int failures = 0;

            for (int pset = 0; pset < config.n_param_sets; ++pset) {
                const auto& ms = results[static_cast<size_t>(si * config.n_param_sets + pset)]
                                     .per_method[static_cast<size_t>(mi)];
                for (int s = 0; s < config.t_post; ++s) {
                    double sum = 0.0, sum_abs = 0.0;
                    int n_ok = 0;
                    for (int draw = 0; draw < config.n_shock_draws; ++draw) {
                        const double err = ms.errors(draw, s);
                        if (std::isnan(err)) continue;
                        sum += err;
                        sum_abs += std::abs(err);
                        ++n_ok;
                        if (ms.covered(draw, s) >= 0) {
                            covered += ms.covered(draw, s);
                            ++cover_total;
                        }
                    }
                    if (n_ok == 0) continue;
                    const double mean = sum / n_ok;
                    bias_sum += config.bias_absolute_of_mean ? std::abs(mean) : sum_abs / n_ok;
                    ++bias_count;
                    if (n_ok >= 2) {
                        double ss = 0.0;
                        for (int draw = 0; draw < config.n_shock_draws; ++draw) {
                            const double err = ms.errors(draw, s);
                            if (std::isnan(err)) continue;
                            ss += (err - mean) * (err - mean);
                        }
                        sd_sum += std::sqrt(ss / (n_ok - 1));
                        ++sd_count;
                    }
                }
                for (int draw = 0; draw < config.n_shock_draws; ++draw)
                    if (std::isnan(ms.errors(draw, 0))) ++failures;
            }

            cell.bias = bias_count > 0 ? 100.0 * bias_sum / bias_count : 0.0;
            cell.sd = sd_count > 0 ? 100.0 * sd_sum / sd_count : 0.0;
            cell.coverage = cover_total > 0
                ? static_cast<double>(covered) / static_cast<double>(cover_total)
                : 0.0;
            cell.n_failures = failures;
            study.cells.push_back(cell);
        }
    }

    for (const auto& task_result : results) {
        for (const auto& ms : task_result.per_method) study.tuning.push_back(ms.tuning);
        study.ledger.insert(study.ledger.end(), task_result.ledger.begin(),
                            task_result.ledger.end());
    }
    return study;
}

std::string study_csv(const StudyResult& result) {
    std::ostringstream out;
    out << "J,T0,r,method,bias,sd,coverage\n";
    for (const auto& cell : result.cells) {
        out << cell.setting.n_controls << ',' << cell.setting.t0 << ',' << cell.setting.r
            << ',' << method_name(cell.method) << ',' << format_double(cell.bias) << ','
            << format_double(cell.sd) << ',' << format_double(cell.coverage) << '\n';
    }
    return out.str();
}

}  // namespace synthctl
