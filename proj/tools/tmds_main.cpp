#include "tmds/evaluation.hpp"
#include "tmds/io.hpp"
#include "tmds/metric.hpp"
#include "tmds/rng.hpp"
#include "tmds/solvers.hpp"
#include "tmds/synthetic.hpp"
#include "tmds/triangle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tmds;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::ofstream open_csv(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

struct MethodRun {
  matrix_t embedding;
  json diagnostics;
};

FilterMode make_filter_mode(const std::string& mode, int per_edge, seed_t seed, index_t n,
                            bool per_edge_given) {
  if (mode == "exact") return FilterMode::Exact();
  if (mode == "sampled") {
    const int k = per_edge_given ? per_edge : default_triangles_per_edge(n);
    return FilterMode::Sampled(k, seed);
  }
  throw CLI::ValidationError("--mode must be exact or sampled");
}

MethodRun run_method(const std::string& method, const matrix_t& distances, index_t dim,
                     const SolverConfig& solver, const FilterMode& filter_mode,
                     scalar_t filter_tol, scalar_t lambda, bool lambda_given) {
  MethodRun run;
  run.diagnostics["method"] = method;
  run.diagnostics["dim"] = dim;

  if (method == "smacof" || method == "sammon") {
    SmacofResult result = method == "smacof"
                              ? smacof(distances, uniform_weights(distances.rows()), dim, solver)
                              : sammon_embed(distances, dim, solver);
    run.diagnostics["iterations"] = result.iterations;
    run.diagnostics["final_stress"] = result.stress_trace.back();
    run.diagnostics["stress_trace"] = result.stress_trace;
    run.embedding = std::move(result.embedding);
  } else if (method == "tmds") {
    TmdsEmbedResult result = tmds_embed(distances, dim, filter_mode, solver, filter_tol);
    if (result.reconnected) {
      std::cout << "note: filtered graph was disconnected; phi raised " << result.phi_selected
                << " -> " << result.phi_used << " to reconnect\n";
    }
    run.diagnostics["iterations"] = result.stress_trace.size() - 1;
    run.diagnostics["final_stress"] = result.stress_trace.back();
    run.diagnostics["stress_trace"] = result.stress_trace;
    run.diagnostics["phi"] = result.phi_selected;
    run.diagnostics["phi_used"] = result.phi_used;
    run.diagnostics["fallback"] = result.fallback;
    run.diagnostics["reconnected"] = result.reconnected;
    run.diagnostics["flagged_count"] = flagged_edges(result.counts, result.phi_used).size();
    run.embedding = std::move(result.embedding);
  } else if (method == "fg12") {
    if (!lambda_given) throw CLI::ValidationError("--method fg12 requires --lambda");
    Fg12Result result = fg12_embed(distances, dim, lambda, solver);
    run.diagnostics["lambda"] = lambda;
    run.diagnostics["nonzero_count"] = result.nonzero_count;
    run.diagnostics["objective_trace"] = result.objective_trace;
    run.diagnostics["final_objective"] = result.objective_trace.back();
    run.embedding = std::move(result.embedding);
  } else {
    throw CLI::ValidationError("--method must be one of tmds|smacof|sammon|fg12");
  }
  return run;
}

scalar_t mean_of(const std::vector<scalar_t>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<scalar_t>(v.size());
}

scalar_t stddev_of(const std::vector<scalar_t>& v) {
  if (v.size() < 2) return 0.0;
  const scalar_t m = mean_of(v);
  scalar_t acc = 0.0;
  for (const scalar_t x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<scalar_t>(v.size() - 1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tmds: robust multidimensional scaling with broken-triangle outlier filtering"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI-style file");

  std::string out_root = ".";
  app.add_option("--out-root", out_root, "root directory prepended to every --out path")
      ->envname("TMDS_OUT_ROOT");

  // ---- generate ------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "write a ground-truth scenario bundle");
  ScenarioMeta meta;
  std::string gen_out;
  std::vector<index_t> deform_pair;
  scalar_t deform_log2 = 0.0;
  generate->add_option("--kind", meta.kind, "hypercube | plus | spiral")
      ->check(CLI::IsMember({"hypercube", "plus", "spiral"}));
  generate->add_option("--n", meta.n, "number of elements")->required();
  generate->add_option("--dim", meta.dim, "generating dimension (hypercube)");
  generate->add_option("--scale", meta.scale, "coordinate scale factor");
  generate->add_option("--jitter", meta.jitter, "gaussian jitter for shapes");
  generate->add_option("--seed", meta.seed, "scenario seed");
  generate->add_option("--outliers", meta.outlier_rate, "outlier rate as a fraction of edges");
  generate->add_option("--outlier-count", meta.outlier_count, "absolute outlier count");
  generate->add_option("--lognormal-sigma", meta.lognormal_sigma, "log-normal distortion sigma");
  auto* deform_opt = generate->add_option("--deform-edge", deform_pair,
                                          "single edge 'i j' to deform")
                         ->expected(2);
  generate->add_option("--log2-factor", deform_log2, "log2 deformation factor");
  generate->add_option("--out", gen_out, "bundle directory")->required();

  // ---- filter ---------------------------------------------------------
  auto* filter = app.add_subcommand("filter", "flag outlier distances via broken triangles");
  std::string flt_input, flt_bundle, flt_mode = "exact", flt_out;
  int flt_per_edge = 0;
  seed_t flt_seed = 0;
  scalar_t flt_tol = kDefaultBreakTol;
  filter->add_option("--input", flt_input, "distance matrix CSV");
  filter->add_option("--bundle", flt_bundle, "scenario bundle directory (uses observed_d.csv)");
  filter->add_option("--mode", flt_mode, "exact | sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  auto* per_edge_opt = filter->add_option("--per-edge", flt_per_edge,
                                          "sampled triangles per edge (default: rule of thumb)");
  filter->add_option("--seed", flt_seed, "sampling seed");
  filter->add_option("--tol", flt_tol, "relative tolerance of the broken test");
  filter->add_option("--out", flt_out, "output directory")->required();

  // ---- embed ----------------------------------------------------------
  auto* embed = app.add_subcommand("embed", "embed a distance matrix");
  std::string emb_input, emb_bundle, emb_method = "tmds", emb_init = "classical",
              emb_mask, emb_out, emb_filter_mode = "exact";
  index_t emb_dim = 2;
  scalar_t emb_lambda = 0.0, emb_filter_tol = kDefaultBreakTol;
  int emb_per_edge = 0;
  SolverConfig emb_cfg;
  embed->add_option("--input", emb_input, "distance matrix CSV");
  embed->add_option("--bundle", emb_bundle, "scenario bundle directory (uses observed_d.csv)");
  embed->add_option("--method", emb_method, "tmds | smacof | sammon | fg12")
      ->check(CLI::IsMember({"tmds", "smacof", "sammon", "fg12"}));
  embed->add_option("--dim", emb_dim, "target dimension");
  auto* lambda_opt = embed->add_option("--lambda", emb_lambda, "fg12 sparsity penalty");
  embed->add_option("--init", emb_init, "classical | random")
      ->check(CLI::IsMember({"classical", "random"}));
  embed->add_option("--seed", emb_cfg.seed, "seed for random init");
  embed->add_option("--max-iters", emb_cfg.max_iters, "majorization iteration cap");
  embed->add_option("--tol", emb_cfg.rel_stress_tol, "relative stress tolerance");
  embed->add_option("--mask", emb_mask, "0/1 keep-mask CSV (smacof only)");
  embed->add_option("--filter-mode", emb_filter_mode, "tmds counting mode: exact | sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  auto* emb_per_edge_opt =
      embed->add_option("--per-edge", emb_per_edge, "sampled triangles per edge");
  embed->add_option("--filter-tol", emb_filter_tol, "broken-test tolerance");
  embed->add_option("--out", emb_out, "output directory")->required();

  // ---- evaluate -------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "score an embedding against a bundle");
  std::string ev_bundle, ev_embedding, ev_mask, ev_reference = "true";
  std::string ev_out;
  evaluate->add_option("--bundle", ev_bundle, "scenario bundle directory")->required();
  evaluate->add_option("--embedding", ev_embedding, "embedding CSV")->required();
  evaluate->add_option("--mask", ev_mask, "0/1 keep-mask CSV (enables the detection report)");
  evaluate->add_option("--reference", ev_reference, "score reference: true | observed")
      ->check(CLI::IsMember({"true", "observed"}));
  evaluate->add_option("--out", ev_out, "output directory")->required();

  // ---- sweep ----------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "reproduce the study curves");
  std::string sw_kind, sw_out;
  std::vector<scalar_t> sw_rates = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35};
  std::vector<scalar_t> sw_log2 = {-3.0, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  std::vector<scalar_t> sw_sigmas = {0.3, 0.6, 1.0};
  std::vector<index_t> sw_dims = {2, 6, 10};
  std::vector<index_t> sw_ns = {150, 300, 600};
  std::vector<std::string> sw_methods = {"smacof", "tmds"};
  index_t sw_n = 100, sw_dim = 2;
  int sw_repeats = 10;
  long long sw_trials = 1000000;
  seed_t sw_seed = 1;
  sweep->add_option("--kind", sw_kind, "rate | deform | sigma | theory | timing")
      ->required()
      ->check(CLI::IsMember({"rate", "deform", "sigma", "theory", "timing"}));
  sweep->add_option("--rates", sw_rates, "outlier rates for --kind rate");
  sweep->add_option("--log2-grid", sw_log2, "log2 factors for --kind deform");
  sweep->add_option("--sigmas", sw_sigmas, "sigmas for --kind sigma");
  sweep->add_option("--dims", sw_dims, "dimensions for --kind theory");
  sweep->add_option("--ns", sw_ns, "sizes for --kind timing");
  sweep->add_option("--methods", sw_methods, "methods for rate/sigma sweeps");
  sweep->add_option("--n", sw_n, "scenario size");
  sweep->add_option("--dim", sw_dim, "scenario dimension");
  sweep->add_option("--repeats", sw_repeats, "seeds per grid point");
  sweep->add_option("--trials", sw_trials, "Monte-Carlo trials for --kind theory");
  sweep->add_option("--seed", sw_seed, "base seed");
  sweep->add_option("--out", sw_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path root(out_root);

    if (generate->parsed()) {
      if (deform_opt->count()) {
        meta.deform_i = deform_pair.at(0);
        meta.deform_j = deform_pair.at(1);
        meta.deform_log2 = deform_log2;
      }
      const Scenario sc = make_scenario(meta);
      const fs::path dir = root / gen_out;
      save_scenario(dir, sc);
      std::cout << dir.string() << "\n";
      return 0;
    }

    if (filter->parsed()) {
      if (flt_input.empty() == flt_bundle.empty()) {
        throw CLI::ValidationError("filter needs exactly one of --input / --bundle");
      }
      const matrix_t d = flt_input.empty()
                             ? load_distance_csv(fs::path(flt_bundle) / "observed_d.csv")
                             : load_distance_csv(flt_input);
      const auto t0 = std::chrono::steady_clock::now();
      const FilterMode mode =
          make_filter_mode(flt_mode, flt_per_edge, flt_seed, d.rows(), per_edge_opt->count() > 0);
      const FilterResult result = tmds_filter(d, mode, flt_tol);
      std::cout << "phase filter: " << seconds_since(t0) << " s\n";

      const fs::path dir = root / flt_out;
      save_mask_csv(dir / "mask.csv", result.keep);
      json diag = filter_diagnostics_json(result);
      diag["mode"] = flt_mode;
      if (mode.kind == FilterMode::Kind::sampled) {
        diag["triangles_per_edge"] = mode.triangles_per_edge;
        diag["seed"] = mode.seed;
      }
      diag["rel_tol"] = flt_tol;
      save_json(dir / "diagnostics.json", diag);
      std::cout << dir.string() << "\n";
      return 0;
    }

    if (embed->parsed()) {
      if (emb_input.empty() == emb_bundle.empty()) {
        throw CLI::ValidationError("embed needs exactly one of --input / --bundle");
      }
      const matrix_t d = emb_input.empty()
                             ? load_distance_csv(fs::path(emb_bundle) / "observed_d.csv")
                             : load_distance_csv(emb_input);
      emb_cfg.init = emb_init == "random" ? InitSpec::Random() : InitSpec::Classical();

      const FilterMode filter_mode = make_filter_mode(
          emb_filter_mode, emb_per_edge, emb_cfg.seed, d.rows(), emb_per_edge_opt->count() > 0);

      const auto t0 = std::chrono::steady_clock::now();
      MethodRun run;
      if (!emb_mask.empty()) {
        if (emb_method != "smacof") {
          throw CLI::ValidationError("--mask applies to --method smacof only");
        }
        SmacofResult result = smacof(d, mask_to_weights(load_mask_csv(emb_mask)), emb_dim, emb_cfg);
        run.diagnostics["method"] = "smacof";
        run.diagnostics["dim"] = emb_dim;
        run.diagnostics["mask"] = emb_mask;
        run.diagnostics["iterations"] = result.iterations;
        run.diagnostics["final_stress"] = result.stress_trace.back();
        run.diagnostics["stress_trace"] = result.stress_trace;
        run.embedding = std::move(result.embedding);
      } else {
        run = run_method(emb_method, d, emb_dim, emb_cfg, filter_mode, emb_filter_tol, emb_lambda,
                         lambda_opt->count() > 0);
      }
      std::cout << "phase embed: " << seconds_since(t0) << " s\n";

      run.diagnostics["init"] = emb_init;
      run.diagnostics["seed"] = emb_cfg.seed;
      const fs::path dir = root / emb_out;
      save_matrix_csv(dir / "embedding.csv", run.embedding);
      save_json(dir / "diagnostics.json", run.diagnostics);
      std::cout << dir.string() << "\n";
      return 0;
    }

    if (evaluate->parsed()) {
      const Scenario sc = load_scenario(ev_bundle);
      const matrix_t x = load_matrix_csv(ev_embedding);
      if (x.rows() != sc.true_d.rows()) {
        throw CLI::ValidationError("embedding size does not match the bundle");
      }
      const fs::path dir = root / ev_out;

      const matrix_t& reference = ev_reference == "true" ? sc.true_d : sc.observed_d;
      const EmbeddingScore score = embedding_score(reference, x);
      save_json(dir / "score.json", {{"score", score.value},
                                     {"used_pairs", score.used_pairs},
                                     {"excluded_pairs", score.excluded_pairs},
                                     {"reference", ev_reference == "true" ? "true_d" : "observed_d"}});

      bool_matrix_t keep = bool_matrix_t::Constant(x.rows(), x.rows(), true);
      if (!ev_mask.empty()) {
        keep = load_mask_csv(ev_mask);
        const DetectionReport report = detection_report(keep, sc.outliers);
        save_json(dir / "detection.json", {{"true_positives", report.true_positives},
                                           {"false_positives", report.false_positives},
                                           {"false_negatives", report.false_negatives},
                                           {"true_negatives", report.true_negatives},
                                           {"precision", report.precision},
                                           {"recall", report.recall}});
      }

      std::ofstream shepard = open_csv(dir / "shepard.csv");
      shepard << "input_distance,embedded_distance,flagged\n";
      for (const auto& row : shepard_data(sc.observed_d, x, keep)) {
        shepard << row.input_distance << ',' << row.embedded_distance << ','
                << (row.flagged ? 1 : 0) << '\n';
      }
      std::cout << dir.string() << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      const fs::path dir = root / sw_out;

      if (sw_kind == "rate" || sw_kind == "sigma") {
        const bool by_rate = sw_kind == "rate";
        std::ofstream csv = open_csv(dir / (sw_kind + "_sweep.csv"));
        csv << (by_rate ? "rate" : "sigma") << ",method,seeds,mean_score,stddev_score\n";
        const auto& grid = by_rate ? sw_rates : sw_sigmas;
        for (const scalar_t value : grid) {
          std::vector<std::vector<scalar_t>> scores(sw_methods.size());
          for (int rep = 0; rep < sw_repeats; ++rep) {
            ScenarioMeta m;
            m.kind = "hypercube";
            m.n = sw_n;
            m.dim = sw_dim;
            m.seed = mix_seed(sw_seed, static_cast<seed_t>(rep));
            if (by_rate) {
              m.outlier_rate = value;
            } else {
              m.lognormal_sigma = value;
            }
            const Scenario sc = make_scenario(m);
            for (std::size_t mi = 0; mi < sw_methods.size(); ++mi) {
              const MethodRun run = run_method(sw_methods[mi], sc.observed_d, sw_dim, {},
                                               FilterMode::Exact(), kDefaultBreakTol, 2.0, true);
              scores[mi].push_back(embedding_score(sc.true_d, run.embedding).value);
            }
          }
          for (std::size_t mi = 0; mi < sw_methods.size(); ++mi) {
            csv << value << ',' << sw_methods[mi] << ',' << sw_repeats << ','
                << mean_of(scores[mi]) << ',' << stddev_of(scores[mi]) << '\n';
          }
        }
      } else if (sw_kind == "deform") {
        std::ofstream csv = open_csv(dir / "deform_sweep.csv");
        csv << "log2_factor,seeds,detection_probability\n";
        for (const scalar_t f : sw_log2) {
          int detected = 0;
          for (int rep = 0; rep < sw_repeats; ++rep) {
            const seed_t seed = mix_seed(sw_seed, static_cast<seed_t>(rep));
            const matrix_t pts = sample_hypercube(sw_n, sw_dim, mix_seed(seed, 1));
            rng_t edge_gen(mix_seed(seed, 4));
            const index_t i = static_cast<index_t>(uniform_below(edge_gen, sw_n));
            index_t j = i;
            while (j == i) j = static_cast<index_t>(uniform_below(edge_gen, sw_n));
            const matrix_t d = deform_edge(pairwise_distances(pts), i, j, f);
            const FilterResult result = tmds_filter(d, FilterMode::Exact());
            if (!result.keep(i, j)) ++detected;
          }
          csv << f << ',' << sw_repeats << ','
              << static_cast<scalar_t>(detected) / static_cast<scalar_t>(sw_repeats) << '\n';
        }
      } else if (sw_kind == "theory") {
        std::ofstream csv = open_csv(dir / "theory_table.csv");
        csv << "dim,break_theory,break_mc,mc_halfwidth,abs_diff,"
               "mean_dist_mc,mean_dist_target,var_dist_mc,var_dist_target,cov_mc,cov_target\n";
        for (const index_t dim : sw_dims) {
          const scalar_t theory = break_probability_theory(dim);
          const McEstimate mc =
              break_probability_mc(dim, sw_trials, mix_seed(sw_seed, static_cast<seed_t>(dim)));

          rng_t gen(mix_seed(sw_seed, static_cast<seed_t>(dim), 2));
          scalar_t sum = 0.0, sum2 = 0.0;
          for (long long t = 0; t < sw_trials; ++t) {
            scalar_t acc = 0.0;
            for (index_t k = 0; k < dim; ++k) {
              const scalar_t diff = unit_uniform(gen) - unit_uniform(gen);
              acc += diff * diff;
            }
            const scalar_t dist = std::sqrt(acc);
            sum += dist;
            sum2 += dist * dist;
          }
          const scalar_t tn = static_cast<scalar_t>(sw_trials);
          const scalar_t mean = sum / tn;
          const scalar_t var = sum2 / tn - mean * mean;
          const scalar_t cov =
              distance_covariance_mc(dim, sw_trials, mix_seed(sw_seed, static_cast<seed_t>(dim), 3));
          csv << dim << ',' << theory << ',' << mc.value << ',' << mc.halfwidth << ','
              << std::abs(mc.value - theory) << ',' << mean << ','
              << std::sqrt(static_cast<scalar_t>(dim) / 6.0) << ',' << var << ',' << 7.0 / 120.0
              << ',' << cov << ',' << 0.008 << '\n';
        }
      } else {  // timing
        std::ofstream csv = open_csv(dir / "timing.csv");
        csv << "n,smacof_seconds,filter_seconds,tmds_total_seconds,overhead_ratio\n";
        for (const index_t n : sw_ns) {
          ScenarioMeta m;
          m.kind = "hypercube";
          m.n = n;
          m.dim = sw_dim;
          m.seed = mix_seed(sw_seed, static_cast<seed_t>(n));
          m.outlier_rate = 0.10;
          const Scenario sc = make_scenario(m);

          auto t0 = std::chrono::steady_clock::now();
          smacof(sc.observed_d, uniform_weights(n), sw_dim, {});
          const double smacof_s = seconds_since(t0);

          t0 = std::chrono::steady_clock::now();
          const FilterResult filtered = tmds_filter(sc.observed_d, FilterMode::Exact());
          const double filter_s = seconds_since(t0);

          t0 = std::chrono::steady_clock::now();
          tmds_embed(sc.observed_d, sw_dim, FilterMode::Exact(), {});
          const double tmds_s = seconds_since(t0);
          (void)filtered;

          csv << n << ',' << smacof_s << ',' << filter_s << ',' << tmds_s << ','
              << tmds_s / smacof_s << '\n';
        }
      }
      std::cout << dir.string() << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
