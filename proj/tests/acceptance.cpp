// End-to-end acceptance suite. Each check prints one PASS/FAIL line; the
// process exits nonzero if any check fails. Checks with a runtime budget
// enforce it with a wall clock.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "core/delay_sweep.hpp"
#include "core/pipeline.hpp"
#include "core/synth.hpp"
#include "core/textio.hpp"
#include "test_util.hpp"

using namespace exotorq;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

bool g_all_ok = true;

void report(int n, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s%s%s%s\n", ok ? "PASS" : "FAIL", n, name.c_str(),
                detail.empty() ? "" : " (", detail.c_str(), detail.empty() ? "" : ")");
    std::fflush(stdout);
    if (!ok) g_all_ok = false;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// --- 1: the power decomposition identity ------------------------------------

void criterion_1() {
    const auto t0 = Clock::now();
    Rng rng(2024);
    double worst_identity = 0.0, worst_mean = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + std::size_t(rng.below(400));
        std::vector<double> p(n);
        for (double& v : p) v = 2.0 * rng.gaussian();
        const PowerSummary s = power_summary(p);
        worst_identity =
            std::max(worst_identity, std::abs(s.mp_w_per_kg - (s.mpp_w_per_kg + s.mnp_w_per_kg)));
        double acc = 0.0;
        for (double v : p) acc += v;
        worst_mean = std::max(worst_mean, std::abs(s.mp_w_per_kg - acc / double(n)));
    }
    const double took = seconds_since(t0);
    const bool ok = worst_identity <= 1e-12 && worst_mean <= 1e-12 && took < 1.0;
    report(1, "mean power equals positive plus negative power on 1000 random series", ok,
           "max identity gap " + fmt(worst_identity) + ", max gap to plain mean " +
               fmt(worst_mean) + ", " + fmt(took) + " s");
}

// --- 2: the power decomposition against hand oracles ------------------------

void criterion_2() {
    const PowerSummary hand = power_summary(std::vector<double>{1.0, -2.0, 3.0});
    const bool hand_ok = std::abs(hand.mpp_w_per_kg - 4.0 / 3.0) < 1e-15 &&
                         std::abs(hand.mnp_w_per_kg - (-2.0 / 3.0)) < 1e-15 &&
                         std::abs(hand.mp_w_per_kg - 2.0 / 3.0) < 1e-15;

    // Torque sin(t) times velocity cos(t) sampled at 100 Hz over one period.
    const double two_pi = 2.0 * M_PI;
    const std::size_t n = std::size_t(two_pi * 100.0); // 628 samples
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = double(i) / 100.0;
        p[i] = std::sin(t) * std::cos(t);
    }
    const PowerSummary s = power_summary(p);
    const double target = 1.0 / two_pi;
    const double err_p = std::abs(s.mpp_w_per_kg - target);
    const double err_n = std::abs(s.mnp_w_per_kg + target);
    const bool sin_ok = err_p < 0.002 && err_n < 0.002;

    report(2, "hand case gives (4/3, -2/3, 2/3) and the sinusoid converges to +-1/(2pi)",
           hand_ok && sin_ok, "sinusoid errors " + fmt(err_p) + " / " + fmt(err_n));
}

// --- 3: analytic gradient vs central finite differences ---------------------

void criterion_3() {
    const auto t0 = Clock::now();
    const double h = 1e-5;
    const double w_reg = 0.01;
    double worst = 0.0;
    bool ok = true;

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        TorqueModel m = init_model(kPolicyLayerDims, rng);
        std::vector<TrainSample> batch(2);
        for (auto& s : batch) {
            for (double& x : s.input) x = rng.gaussian();
            for (double& t : s.target) t = std::tanh(rng.gaussian());
        }
        const Gradients g = grad(m, batch, w_reg);

        // Per-tensor comparison: Frobenius norm of the difference against the
        // larger of the two gradient norms.
        const auto check_tensor = [&](auto& param, const auto& analytic) {
            double diff2 = 0.0, fd2 = 0.0, an2 = 0.0;
            for (Eigen::Index c = 0; c < param.cols(); ++c) {
                for (Eigen::Index r = 0; r < param.rows(); ++r) {
                    const double saved = param(r, c);
                    param(r, c) = saved + h;
                    const double up = loss(m, batch, w_reg);
                    param(r, c) = saved - h;
                    const double down = loss(m, batch, w_reg);
                    param(r, c) = saved;
                    const double fd = (up - down) / (2.0 * h);
                    const double an = analytic(r, c);
                    diff2 += (fd - an) * (fd - an);
                    fd2 += fd * fd;
                    an2 += an * an;
                }
            }
            const double rel =
                std::sqrt(diff2) / std::max({std::sqrt(fd2), std::sqrt(an2), 1e-8});
            worst = std::max(worst, rel);
            if (rel >= 1e-4) ok = false;
        };
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            check_tensor(m.weights[l], g.d_weights[l]);
            check_tensor(m.biases[l], g.d_biases[l]);
        }
    }
    const double took = seconds_since(t0);
    if (took >= 30.0) ok = false;
    report(3, "analytic gradients match central differences on the full policy network", ok,
           "worst per-tensor relative error " + fmt(worst) + " over 10 seeds, " + fmt(took) +
               " s");
}

// --- 4: training convergence on the noise-free synthetic task ---------------

SynthSpec convergence_spec(const Condition& c) {
    SynthSpec spec = default_synth_spec();
    spec.condition = c;
    spec.body_mass_kg = 55.0; // keeps every target inside the clip range
    return spec;
}

std::vector<TrainSample> samples_of(const Trial& t, double tau_max) {
    std::vector<TrainSample> out;
    const auto windows = build_windows(t, kDefaultDelayFeatureS);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        TrainSample s;
        s.input = windows[w];
        for (std::size_t j = 0; j < kJointCount; ++j) {
            s.target[j] = normalize_clip_torque(
                (*t.gt_moments_nm_per_kg)[j][w + 3] * *t.body_mass_kg, tau_max);
        }
        out.push_back(s);
    }
    return out;
}

void criterion_4() {
    const auto t0 = Clock::now();
    std::vector<TrainSample> samples;
    for (double speed : {1.0, 1.25}) {
        const Trial t = generate(convergence_spec(Condition::level(speed)));
        const auto part = samples_of(t, kDefaultTauMaxNm);
        samples.insert(samples.end(), part.begin(), part.end());
    }

    TrainConfig tc;
    tc.epochs = 200;
    tc.batch_size = 64;
    tc.w_reg = 0.0; // the task is noise-free and realizable
    tc.seed = 3;
    const TrainResult tr = train(samples, tc);
    const double ratio = tr.loss_history.back() / tr.initial_loss;

    // Held-out condition between the two training amplitudes.
    const Trial held = generate(convergence_spec(Condition::level(1.15)));
    const auto pred = predict_torque_nm_per_kg(tr.model, held, kDefaultDelayFeatureS);
    double worst_r = 1.0;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        std::vector<double> gt((*held.gt_moments_nm_per_kg)[j].begin() + 3,
                               (*held.gt_moments_nm_per_kg)[j].end());
        worst_r = std::min(worst_r, cross_correlation(pred[j].values, gt));
    }
    const double took = seconds_since(t0);
    const bool ok = ratio < 0.01 && worst_r > 0.95 && took < 120.0;
    report(4, "training converges on the synthetic task and transfers to held-out strides", ok,
           "final/initial loss " + fmt(ratio) + ", held-out r " + fmt(worst_r) + ", " +
               fmt(took) + " s");
}

// --- 5: segmentation recovery and affine invariance -------------------------

void criterion_5() {
    UniformSeries s;
    s.rate_hz = 100.0;
    s.values.resize(1000);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        s.values[i] = std::sin(2.0 * M_PI * (double(i) / 100.0) / 1.2);
    }
    const Segmentation seg = segment_cycles(s, SegmentConfig{});
    bool spacing_ok = seg.anchors.size() >= 2;
    for (std::size_t k = 1; k < seg.anchors.size(); ++k) {
        const std::size_t gap = seg.anchors[k] - seg.anchors[k - 1];
        if (gap + 1 < 120 || gap > 121) spacing_ok = false;
    }

    UniformSeries scaled = s;
    for (double& v : scaled.values) v = 2.0 * v + 0.5;
    const Segmentation seg2 = segment_cycles(scaled, SegmentConfig{});
    const bool affine_ok = seg2.anchors == seg.anchors && seg2.cycles == seg.cycles;

    report(5, "a 1.2 s sinusoid segments into anchors every 120 +- 1 samples, affine-invariant",
           spacing_ok && affine_ok,
           std::to_string(seg.anchors.size()) + " anchors, " +
               std::to_string(seg.cycles.size()) + " cycles");
}

// --- 6: the report-table aggregation -----------------------------------------

void criterion_6() {
    const std::vector<double> row = {0.78, 0.92, 0.94, 0.92, 0.91};
    const double avg = environment_average(row);
    const bool ok = std::abs(avg - 0.894) < 1e-12 && fmt_f2(avg) == "0.89";
    report(6, "environment averaging of the hip-torque row reproduces 0.89", ok,
           "mean " + fmt_g17(avg) + " prints as " + fmt_f2(avg));
}

// --- 7: delay mechanics ------------------------------------------------------

SynthSpec resistive_spec(double delta_s) {
    SynthSpec spec = default_synth_spec();
    for (auto& h : spec.harmonics) h.a2 = 0.0;
    spec.torque_map = TorqueMap{};
    for (std::size_t j = 0; j < kJointCount; ++j) {
        spec.torque_map.angle_gain[j][j] = j < 2 ? -0.6 : -0.5;
    }
    spec.torque_map.delay_s = delta_s;
    return spec;
}

void criterion_7() {
    // 100 ms at 100 Hz is exactly ten samples.
    UniformSeries ramp;
    ramp.rate_hz = 100.0;
    for (int i = 0; i < 50; ++i) ramp.values.push_back(0.01 * i);
    const DelayShifted shifted = delay_shift(ramp, 0.1);
    bool shift_ok = shifted.trim_count == 10;
    for (std::size_t i = 10; i < ramp.values.size(); ++i) {
        if (shifted.series.values[i] != ramp.values[i - 10]) shift_ok = false;
    }

    // The model is trained on the delay-free task, then swept over a trial
    // whose oracle has a built-in 100 ms delay.
    const Trial train_trial = generate(resistive_spec(0.0));
    TrainConfig tc;
    tc.epochs = 100;
    tc.batch_size = 64;
    tc.w_reg = 0.0;
    tc.seed = 5;
    const TrainResult tr = train(samples_of(train_trial, kDefaultTauMaxNm), tc);

    const Trial gt_trial = generate(resistive_spec(0.1));
    DelaySweepOptions opts;
    opts.delays_s = {0.0, 0.1};
    const DelaySweepResult sweep = run_delay_sweep(gt_trial, tr.model, opts);
    bool mpp_ok = true;
    double min_gain = 1e9;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        const double gain =
            sweep.levels[1].power[j].mpp_w_per_kg - sweep.levels[0].power[j].mpp_w_per_kg;
        min_gain = std::min(min_gain, gain);
        if (!(gain > 0.0)) mpp_ok = false;
    }

    // The zero-delay level is bit-identical to the standard inference path.
    const auto pred = predict_torque_nm_per_kg(tr.model, gt_trial, kDefaultDelayFeatureS);
    bool baseline_ok = true;
    for (std::size_t j = 0; j < kJointCount; ++j) {
        UniformSeries vel;
        vel.rate_hz = gt_trial.sample_rate_hz;
        vel.start_s = gt_trial.time_s[3];
        vel.values.assign((*gt_trial.velocities_rad_s)[j].begin() + 3,
                          (*gt_trial.velocities_rad_s)[j].end());
        const PowerSummary direct = power_summary(power_series(pred[j], vel, 0));
        if (sweep.levels[0].power[j].mp_w_per_kg != direct.mp_w_per_kg ||
            sweep.levels[0].power[j].mpp_w_per_kg != direct.mpp_w_per_kg ||
            sweep.levels[0].power[j].mnp_w_per_kg != direct.mnp_w_per_kg ||
            sweep.levels[0].power[j].n != direct.n) {
            baseline_ok = false;
        }
        if (sweep.levels[0].power[j].n != (gt_trial.size() - 3)) baseline_ok = false;
        if (sweep.levels[1].power[j].n != (gt_trial.size() - 3 - 10)) baseline_ok = false;
    }

    report(7, "delay mechanics: 10-sample shift, bit-identical baseline, MPP rises at the true delay",
           shift_ok && baseline_ok && mpp_ok, "min MPP gain " + fmt(min_gain) + " W/kg");
}

// --- 8: byte-identical reruns through the CLI --------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EXOTORQ_CLI_PATH) + " " + args + " > /dev/null";
    return std::system(cmd.c_str());
}

void criterion_8() {
    testutil::TempDir tmp;
    const std::string spec_path = tmp.file("spec.json");
    testutil::write_file(spec_path,
                         "{\"condition\": {\"kind\": \"level_ground\", \"speed_mps\": 1.2},"
                         " \"n_strides\": 6, \"noise_sd\": 0.02}\n");
    const std::string trials = tmp.file("trials");
    const std::string run_dir = tmp.file("run");
    const std::string eval_dir = tmp.file("eval");
    const std::string sweep_dir = tmp.file("sweep");
    const std::string model = run_dir + "/model.json";

    const std::vector<std::string> commands = {
        "synth " + spec_path + " --out " + trials + " --seed 11",
        "train --trials-dir " + trials + " --epochs 3 --batch-size 128 --out " + run_dir +
            " --seed 11",
        "evaluate --trials-dir " + trials + " --model " + model + " --out " + eval_dir +
            " --seed 11",
        "delay-sweep --trials-dir " + trials + " --model " + model + " --out " + sweep_dir +
            " --seed 11",
    };

    const auto run_all = [&]() -> bool {
        for (const auto& c : commands) {
            if (run_cli(c) != 0) return false;
        }
        return true;
    };
    const auto collect = [&]() {
        std::vector<std::pair<std::string, std::string>> files;
        for (const auto& dir : {trials, run_dir, eval_dir, sweep_dir}) {
            std::vector<std::string> paths;
            for (const auto& e : fs::recursive_directory_iterator(dir)) {
                if (e.is_regular_file()) paths.push_back(e.path().string());
            }
            std::sort(paths.begin(), paths.end());
            for (const auto& p : paths) files.emplace_back(p, testutil::read_file(p));
        }
        return files;
    };

    if (!run_all()) {
        report(8, "identical config and seed give byte-identical outputs", false,
               "a CLI command failed on the first pass");
        return;
    }
    const auto first = collect();

    for (const auto& dir : {trials, run_dir, eval_dir, sweep_dir}) fs::remove_all(dir);
    if (!run_all()) {
        report(8, "identical config and seed give byte-identical outputs", false,
               "a CLI command failed on the second pass");
        return;
    }
    const auto second = collect();

    bool ok = first.size() == second.size() && !first.empty();
    std::string mismatch;
    if (ok) {
        for (std::size_t i = 0; i < first.size(); ++i) {
            if (first[i] != second[i]) {
                ok = false;
                mismatch = fs::path(first[i].first).filename().string();
                break;
            }
        }
    }
    report(8, "identical config and seed give byte-identical outputs", ok,
           ok ? std::to_string(first.size()) + " files compared across synth, train, "
                "evaluate, delay-sweep"
              : "first mismatch: " + mismatch);
}

// --- 9: round-trips -----------------------------------------------------------

void criterion_9() {
    testutil::TempDir tmp;

    // Model file round-trip.
    Rng rng(17);
    TorqueModel m = init_model(kPolicyLayerDims, rng);
    const std::string model_path = tmp.file("model.json");
    save_model(m, model_path);
    const TorqueModel back = load_model(model_path);
    double worst_fwd = 0.0;
    for (int k = 0; k < 100; ++k) {
        FeatureWindow w;
        for (double& x : w) x = rng.gaussian();
        const auto a = forward(m, w);
        const auto b = forward(back, w);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            worst_fwd = std::max(worst_fwd, std::abs(a[j] - b[j]));
        }
    }

    // Trial CSV round-trip.
    SynthSpec spec = default_synth_spec();
    spec.condition = Condition::ramp(-5.0);
    spec.noise_sd = 0.05;
    spec.body_mass_kg = 68.4;
    spec.n_strides = 4;
    const Trial t = generate(spec);
    const std::string csv_path = tmp.file("trial.csv");
    write_canonical_csv(t, csv_path);
    const Trial rt = load_canonical_csv(csv_path, ColumnMap::canonical());

    double worst_rel = 0.0;
    const auto track = [&](double a, double b) {
        const double denom = std::max({std::abs(a), std::abs(b), 1e-300});
        worst_rel = std::max(worst_rel, std::abs(a - b) / denom);
    };
    bool fields_ok = rt.subject_id == t.subject_id &&
                     rt.condition.key() == t.condition.key() &&
                     rt.sample_rate_hz == t.sample_rate_hz && rt.size() == t.size() &&
                     rt.velocities_rad_s.has_value() && rt.gt_moments_nm_per_kg.has_value() &&
                     rt.body_mass_kg.has_value();
    if (fields_ok) {
        track(*rt.body_mass_kg, *t.body_mass_kg);
        for (std::size_t i = 0; i < t.size(); ++i) track(rt.time_s[i], t.time_s[i]);
        for (std::size_t j = 0; j < kJointCount; ++j) {
            for (std::size_t i = 0; i < t.size(); ++i) {
                track(rt.angles_rad[j][i], t.angles_rad[j][i]);
                track((*rt.velocities_rad_s)[j][i], (*t.velocities_rad_s)[j][i]);
                track((*rt.gt_moments_nm_per_kg)[j][i], (*t.gt_moments_nm_per_kg)[j][i]);
            }
        }
    }

    const bool ok = worst_fwd <= 1e-12 && fields_ok && worst_rel <= 1e-12;
    report(9, "model and trial files round-trip without loss", ok,
           "forward gap " + fmt(worst_fwd) + ", field relative gap " + fmt(worst_rel));
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (!g_all_ok) {
        std::printf("acceptance: FAILURES PRESENT\n");
        return 1;
    }
    std::printf("acceptance: all criteria pass\n");
    return 0;
}
