#include "ncim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ncim/ae_jabid.hpp"
#include "ncim/baselines.hpp"
#include "ncim/channel.hpp"
#include "ncim/codebook.hpp"
#include "ncim/signal.hpp"
#include "ncim/stf_jabid.hpp"

namespace ncim {

namespace {

AmpOptions amp_options(const SimConfig& cfg) { return {cfg.T0, cfg.kappa, cfg.epsilon}; }

AeOptions ae_options(const SimConfig& cfg) {
  AeOptions o;
  o.amp = amp_options(cfg);
  o.activity_threshold = cfg.T_h2;
  o.scheme = NeighborScheme{cfg.Q, cfg.zeta}.clamped(cfg.M);
  return o;
}

Detection stf_per_slab(const CMat& Y, const Codebook& cb, double sigma2, const SimConfig& cfg) {
  const int M = cfg.M;
  const int S = static_cast<int>(Y.cols() / M);
  const int K = cb.num_devices, I = cb.sequences_per_device;
  StfOptions opt{amp_options(cfg), cfg.T_h1};
  Detection det;
  det.num_slabs = S;
  det.estimate.resize(cb.phi.cols(), Y.cols());
  std::vector<int> votes(K, 0);
  std::vector<StfResult> slabs;
  slabs.reserve(S);
  for (int s = 0; s < S; ++s) {
    slabs.push_back(run_stf_jabid(Y.middleCols(static_cast<Index>(s) * M, M), cb, sigma2, M, opt));
    det.estimate.middleCols(static_cast<Index>(s) * M, M) = slabs.back().estimate;
    det.iterations += slabs.back().iterations;
    for (int k : slabs.back().active) ++votes[k];
  }
  det.iterations /= S;
  for (int k = 0; k < K; ++k)
    if (votes[k] > 0 && 2 * votes[k] >= S) det.active.push_back(k);
  select_by_row_power(det, I, M);
  return det;
}

}  // namespace

std::vector<TrialMetrics> run_trial(const SimConfig& cfg, std::uint64_t trial_seed) {
  const ChannelParams params = cfg.channel_params();
  const double snr = cfg.effective_snr_db();
  const Codebook cb = generate_codebook(cfg.K, cfg.I, cfg.L, derive_seed(trial_seed, 1));
  Rng gt_rng(derive_seed(trial_seed, 2));
  Rng path_rng(derive_seed(trial_seed, 3));
  Rng noise_rng(derive_seed(trial_seed, 4));

  const FrameLayout layout{cfg.M, cfg.N_tilde, cfg.J, cfg.first_subcarrier};
  GroundTruth gt = draw_ground_truth(cfg.K, cfg.Ka, cfg.I, layout.num_slabs(), gt_rng);
  const PathSet paths = draw_paths(cfg.K, params, path_rng);

  ReceivedSignal rx;
  if (cfg.tfst) {
    const TfstLayout tfst{cfg.L_F, cfg.first_subcarrier};
    gt.X = tfst_reference_X(gt, paths, params, tfst);
    rx = synthesize_tfst_received(cb, gt, paths, params, tfst, snr, noise_rng);
  } else {
    gt.X = assemble_X(gt, frame_channels(paths, params, layout, cfg.L), cfg.M);
    rx = synthesize_received(cb, gt.X, snr, cfg.M, noise_rng);
  }
  const double sigma2 = std::max(rx.noise_var, 1e-12);

  CMat R, W;
  auto angular = [&]() {
    if (R.size() == 0) {
      R = to_angular(rx.Y, cfg.M);
      W = to_angular(gt.X, cfg.M);
    }
  };

  std::vector<TrialMetrics> out;
  out.reserve(cfg.algorithms.size());
  for (const auto& alg : cfg.algorithms) {
    if (alg == "stf") {
      const auto det = run_stf_jabid(rx.Y, cb, sigma2, cfg.M, StfOptions{amp_options(cfg), cfg.T_h1});
      out.push_back(evaluate(gt, det, gt.X));
    } else if (alg == "stf_slab") {
      out.push_back(evaluate(gt, stf_per_slab(rx.Y, cb, sigma2, cfg), gt.X));
    } else if (alg == "ae") {
      angular();
      out.push_back(evaluate(gt, run_ae_frame(R, cb, sigma2, cfg.M, ae_options(cfg)), W));
    } else if (alg == "bench1") {
      angular();
      out.push_back(evaluate(gt, run_benchmark1(R, cb, sigma2, cfg.M, ae_options(cfg)), W));
    } else if (alg == "somp") {
      out.push_back(evaluate(gt, somp_detect(rx.Y, cb, sigma2, cfg.M), gt.X));
    } else {
      throw std::invalid_argument("unknown algorithm id: " + alg);
    }
  }
  return out;
}

double algorithm_complexity(const SimConfig& cfg, const std::string& algorithm) {
  ComplexityParams p;
  p.K = cfg.K, p.I = cfg.I, p.L = cfg.L, p.M = cfg.M, p.J = cfg.J, p.N_tilde = cfg.N_tilde;
  p.T = cfg.T0, p.Ka = cfg.Ka, p.Q = NeighborScheme{cfg.Q, cfg.zeta}.clamped(cfg.M).radius;
  if (algorithm == "stf") return complexity_count("stf_jabid", p);
  if (algorithm == "stf_slab") {
    ComplexityParams one = p;
    one.J = one.N_tilde = 1;
    return p.J * p.N_tilde * complexity_count("stf_jabid", one);
  }
  if (algorithm == "ae") return complexity_count("ae_jabid", p);
  if (algorithm == "bench1") return complexity_count("benchmark1", p);
  if (algorithm == "somp") return complexity_count("somp", p);
  throw std::invalid_argument("unknown algorithm id: " + algorithm);
}

std::vector<PointSummary> run_point(const SimConfig& cfg, std::uint64_t stream, int threads) {
  require_valid(cfg);
  const int T = cfg.trials;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, T);

  std::vector<std::vector<TrialMetrics>> results(T);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (int t = next++; t < T; t = next++) {
      try {
        results[t] = run_trial(cfg, derive_seed(cfg.master_seed, stream, static_cast<std::uint64_t>(t)));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<PointSummary> out;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    PointSummary s;
    s.algorithm = cfg.algorithms[a];
    s.trials = T;
    for (int t = 0; t < T; ++t) {
      const auto& m = results[t][a];
      s.nmse_mean += m.nmse;
      s.ader_mean += m.ader;
      s.ber_mean += m.ber_total;
      s.iterations_mean += m.iterations;
      if (m.counts.missed + m.counts.false_alarm > 0 || m.counts.bit_errors > 0) ++s.errors_total;
    }
    s.nmse_mean /= T;
    s.ader_mean /= T;
    s.ber_mean /= T;
    s.iterations_mean /= T;
    s.cm = algorithm_complexity(cfg, s.algorithm);
    s.ec = efficiency(std::min(1.0, s.ber_mean), s.cm);
    out.push_back(s);
  }
  return out;
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string experiment_csv(const ExperimentSpec& spec, int threads) {
  validate_axis(spec.sweep);
  if (spec.outer) validate_axis(*spec.outer);
  std::string csv =
      "experiment,algorithm,sweep_param,sweep_value,trials,nmse_db_mean,ader_mean,ber_total_mean,avg_iterations,cm,ec,"
      "master_seed\n";
  const std::vector<double> outer_values = spec.outer ? spec.outer->values : std::vector<double>{0.0};
  for (std::size_t o = 0; o < outer_values.size(); ++o) {
    SimConfig base = spec.base;
    std::string name = spec.name;
    if (spec.outer) {
      apply_parameter(base, spec.outer->param, outer_values[o]);
      name += "@" + spec.outer->param + "=" + fmt(outer_values[o]);
    }
    for (double value : spec.sweep.values) {
      SimConfig cfg = base;
      apply_parameter(cfg, spec.sweep.param, value);
      for (const auto& s : run_point(cfg, o, threads)) {
        csv += name + "," + s.algorithm + "," + spec.sweep.param + "," + fmt(value) + "," + std::to_string(s.trials) + "," +
               fmt(10.0 * std::log10(s.nmse_mean)) + "," + fmt(s.ader_mean) + "," + fmt(s.ber_mean) + "," +
               fmt(s.iterations_mean) + "," + fmt(s.cm) + "," + fmt(s.ec) + "," + std::to_string(cfg.master_seed) + "\n";
      }
    }
  }
  return csv;
}

std::string run_experiment(const ExperimentSpec& spec, const std::string& out_dir, int threads) {
  const std::string csv = experiment_csv(spec, threads);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string path = (std::filesystem::path(out_dir) / (spec.name + ".csv")).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << csv;
  if (!out) throw std::runtime_error("write failed: " + path);
  return path;
}

}  // namespace ncim
