// pinlab: command-line laboratory for the disordered pinning model.
//
// Subcommands: gen-env, build-law, compute, sample, free-energy, hc,
// verify-thm1, verify-prop, verify-thm2, bench.  Options can come from a
// config file (--config, INI format); command-line flags override it.
// Exit codes: 0 all assertions pass, 1 assertion failure, 2 configuration
// or data error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pinlab/errors.hpp"
#include "pinlab/experiments.hpp"
#include "pinlab/fast_engine.hpp"
#include "pinlab/gibbs_sampler.hpp"
#include "pinlab/partition_engine.hpp"
#include "pinlab/phase_analysis.hpp"
#include "pinlab/reports.hpp"
#include "pinlab/version.hpp"

using namespace pinlab;

namespace {

struct CommonOpts {
  std::string law = "powerlaw:alpha=0.5";
  std::string dist = "gaussian";
  std::string env_file;
  double beta = 0.0;
  double h = 0.5;
  std::vector<uint64_t> seeds = {1};
  int L = 4096;
  int n_max = 128;
  std::string out = "pinlab_out";
};

void add_model_options(CLI::App* cmd, CommonOpts& o) {
  // frees the short -h name, which belongs to the pinning bias here
  cmd->set_help_flag("--help", "print help");
  cmd->add_option("--law", o.law,
                  "gap law: powerlaw:alpha=A | srw | geometric:p=P, or a "
                  "law record file from build-law");
  cmd->add_option("--dist", o.dist,
                  "charge distribution: gaussian | rademacher | uniform[:a]");
  cmd->add_option("--beta", o.beta, "inverse temperature (>= 0)");
  cmd->add_option("--h", o.h, "pinning bias");
  cmd->add_option("--seeds", o.seeds, "environment seeds")->delimiter(',');
  cmd->add_option("--L", o.L, "horizon");
  cmd->add_option("--Nmax", o.n_max, "ladder depth (jump count)");
  cmd->add_option("--out", o.out, "output path base");
}

RenewalLaw resolve_law(const std::string& spec, int n_table) {
  if (std::filesystem::exists(spec)) {
    RenewalLaw law = load_law_record(spec);
    if (law.n_table() < n_table)
      throw ConfigError("law record table too small for the requested horizon");
    return law;
  }
  return parse_law_spec(spec, n_table);
}

Environment resolve_env(const CommonOpts& o, uint64_t seed, int length) {
  if (!o.env_file.empty()) {
    Environment env = load_environment(o.env_file);
    if (env.length() < length)
      throw ConfigError("environment file shorter than the requested horizon");
    return env;
  }
  double hw = 0.0;
  const ChargeDist dist = parse_dist(o.dist, &hw);
  return generate_environment(dist, seed, length, hw);
}

VerificationConfig to_config(const CommonOpts& o) {
  VerificationConfig cfg;
  cfg.law = o.law;
  cfg.dist = o.dist;
  cfg.beta = o.beta;
  cfg.h = o.h;
  cfg.seeds = o.seeds;
  cfg.L = o.L;
  cfg.n_max_jumps = o.n_max;
  return cfg;
}

int finish(const Report& rep, const std::string& out) {
  write_report(rep, out);
  std::printf("%s: %s (report at %s.jsonl)\n",
              rep.records.empty() ? "suite" : "verdict",
              rep.pass ? "PASS" : "FAIL", out.c_str());
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinlab: disordered pinning model laboratory"};
  app.set_version_flag("--version", std::string("pinlab ") + kEngineVersion);
  app.set_config("--config", "", "INI config file; flags override it");
  app.require_subcommand(1);

  // gen-env ------------------------------------------------------------
  auto* gen = app.add_subcommand("gen-env", "generate and persist charges");
  std::string gen_dist = "gaussian", gen_out = "env.bin";
  uint64_t gen_seed = 1;
  int gen_length = 4096;
  gen->add_option("--dist", gen_dist, "charge distribution");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--length", gen_length, "number of charges");
  gen->add_option("--out", gen_out, "output file")->required();

  // build-law ----------------------------------------------------------
  auto* bl = app.add_subcommand("build-law", "build a gap law record");
  std::string bl_law = "powerlaw:alpha=0.5", bl_out = "law.json";
  int bl_table = 4096;
  bl->add_option("--law", bl_law, "law spec");
  bl->add_option("--n-table", bl_table, "tabulation horizon");
  bl->add_option("--out", bl_out, "output file")->required();

  // compute ------------------------------------------------------------
  auto* cp = app.add_subcommand("compute", "build and export DP tables");
  CommonOpts cp_o;
  cp_o.n_max = 64;
  cp_o.out = "tables.txt";
  add_model_options(cp, cp_o);
  cp->add_option("--env", cp_o.env_file, "environment file (overrides --dist/--seeds)");
  std::string cp_engine = "reference";
  cp->add_option("--engine", cp_engine, "reference | fast")
      ->check(CLI::IsMember({"reference", "fast"}));

  // sample ---------------------------------------------------------------
  auto* sm = app.add_subcommand("sample", "exact Gibbs path sampling");
  CommonOpts sm_o;
  sm_o.out = "paths";
  add_model_options(sm, sm_o);
  sm->add_option("--env", sm_o.env_file, "environment file");
  int sm_n = 64, sm_count = 100;
  uint64_t sm_sample_seed = 1;
  sm->add_option("--n", sm_n, "endpoint");
  sm->add_option("--count", sm_count, "number of paths");
  sm->add_option("--sample-seed", sm_sample_seed, "sampler stream seed");

  // free-energy ----------------------------------------------------------
  auto* fe = app.add_subcommand("free-energy", "finite-size free energy");
  CommonOpts fe_o;
  fe_o.out = "free_energy";
  add_model_options(fe, fe_o);

  // hc ---------------------------------------------------------------------
  auto* hc = app.add_subcommand("hc", "critical bias estimators");
  CommonOpts hc_o;
  hc_o.out = "hc";
  add_model_options(hc, hc_o);
  std::string hc_estimator = "both";
  double hc_tol = 5e-3, hc_probe = std::numeric_limits<double>::quiet_NaN();
  int hc_w1 = 20, hc_w2 = -1;
  hc->add_option("--estimator", hc_estimator, "bisect | slope | both")
      ->check(CLI::IsMember({"bisect", "slope", "both"}));
  hc->add_option("--tol", hc_tol, "bisection half-width target");
  hc->add_option("--h-probe", hc_probe, "probe bias for the slope estimator");
  hc->add_option("--window-lo", hc_w1, "slope fit window start");
  hc->add_option("--window-hi", hc_w2, "slope fit window end (-1: auto)");

  // verification suites ----------------------------------------------------
  CommonOpts t1_o, pr_o, t2_o;
  double pr_eps = 0.1, t2_eps = 0.1, t2_c = 4.0, t2_cc = 2.0;
  double pr_hcref = std::numeric_limits<double>::quiet_NaN();
  double t2_hcref = std::numeric_limits<double>::quiet_NaN();
  double t2_decay = 1e-3;
  bool t1_exact = false;
  auto* t1 = app.add_subcommand("verify-thm1", "summability suite");
  t1_o.out = "thm1";
  add_model_options(t1, t1_o);
  t1->add_flag("--exact-levels", t1_exact, "force full ladder depth N = L");
  auto* pr = app.add_subcommand("verify-prop", "event-sum decay suite");
  pr_o.out = "prop";
  add_model_options(pr, pr_o);
  pr->add_option("--epsilon", pr_eps, "margin inside h - hc");
  pr->add_option("--hc-ref", pr_hcref, "critical bias override");
  auto* t2 = app.add_subcommand("verify-thm2", "contact-number suite");
  t2_o.law = "srw";
  t2_o.out = "thm2";
  add_model_options(t2, t2_o);
  t2->add_option("--epsilon", t2_eps, "margin inside h - hc");
  t2->add_option("--c", t2_c, "contact-growth constant under test");
  t2->add_option("--c-control", t2_cc, "below-threshold control constant");
  t2->add_option("--hc-ref", t2_hcref, "critical bias override");
  t2->add_option("--decay-target", t2_decay,
                 "trajectory ceiling at the top horizon (nan disables)");

  // bench --------------------------------------------------------------------
  auto* bn = app.add_subcommand("bench", "engine agreement and scaling");
  BenchmarkConfig bn_cfg;
  std::string bn_out = "bench";
  bool bn_no_timing = false;
  bn->add_option("--law", bn_cfg.law, "law used for timing runs");
  bn->add_option("--cases", bn_cfg.cases, "randomized agreement cases");
  bn->add_option("--case-L-max", bn_cfg.case_L_max, "max case horizon");
  bn->add_option("--L-grid", bn_cfg.timing_grid, "reference timing horizons")
      ->delimiter(',');
  bn->add_option("--fast-L", bn_cfg.fast_L, "fast engine horizon");
  bn->add_option("--reps", bn_cfg.reps, "timing repetitions");
  bn->add_option("--seed", bn_cfg.seed, "case generator seed");
  bn->add_flag("--no-timing-asserts", bn_no_timing,
               "report timings without asserting them");
  bn->add_option("--out", bn_out, "output path base");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      double hw = 0.0;
      const ChargeDist dist = parse_dist(gen_dist, &hw);
      const Environment env = generate_environment(dist, gen_seed, gen_length, hw);
      persist_environment(env, gen_out);
      std::printf("wrote %s (%s, seed %llu, length %d, checksum %s)\n",
                  gen_out.c_str(), dist_name(env.dist).c_str(),
                  static_cast<unsigned long long>(env.seed), env.length(),
                  hex64(env.checksum).c_str());
      return 0;
    }

    if (bl->parsed()) {
      const RenewalLaw law = parse_law_spec(bl_law, bl_table);
      save_law_record(law, bl_out);
      std::printf("wrote %s (%s, n_table %d, checksum %s)\n", bl_out.c_str(),
                  law.spec_string().c_str(), law.n_table(),
                  hex64(law.checksum).c_str());
      return 0;
    }

    if (cp->parsed()) {
      const RenewalLaw law = resolve_law(cp_o.law, cp_o.L);
      const Environment env = resolve_env(cp_o, cp_o.seeds.front(), cp_o.L);
      const ModelParams params{cp_o.beta, cp_o.h};
      LadderTables tables =
          compute_ladder(env, law, params, cp_o.n_max, cp_o.L);
      if (cp_engine == "fast") {
        FastEngineDiagnostics diag;
        tables.log_Z = compute_constrained_fast(env, law, params, cp_o.L, &diag);
        tables.log_Z_free =
            compute_free_given(tables.log_Z, env, law, params, cp_o.L);
        tables.engine = std::string("fast-") + kEngineVersion;
      }
      export_tables(tables, cp_o.out);
      std::printf("wrote %s (engine %s, L %d, Nmax %d)\n", cp_o.out.c_str(),
                  tables.engine.c_str(), cp_o.L, cp_o.n_max);
      return 0;
    }

    if (sm->parsed()) {
      const RenewalLaw law = resolve_law(sm_o.law, sm_n);
      const Environment env = resolve_env(sm_o, sm_o.seeds.front(), sm_n);
      const ModelParams params{sm_o.beta, sm_o.h};
      const Eigen::ArrayXd log_Z = compute_constrained(env, law, params, sm_n);
      Xoshiro256pp rng(sm_sample_seed);
      std::vector<ContactPath> paths;
      paths.reserve(sm_count);
      std::ofstream pf(sm_o.out + ".paths.txt");
      if (!pf) throw DataFormatError("cannot open path output");
      for (int i = 0; i < sm_count; ++i) {
        paths.push_back(sample_path(log_Z, env, law, params, sm_n, rng));
        const auto& pts = paths.back().points;
        for (size_t j = 0; j < pts.size(); ++j)
          pf << pts[j] << (j + 1 < pts.size() ? ' ' : '\n');
      }
      const ContactSummary s = contact_statistics(paths);
      Report rep;
      Json j;
      j["record"] = "sample_summary";
      j["n"] = s.n;
      j["beta"] = sm_o.beta;
      j["h"] = sm_o.h;
      j["env_seed"] = env.seed;
      j["sample_seed"] = sm_sample_seed;
      j["count"] = s.count;
      j["mean_jumps"] = s.mean_jumps;
      j["var_jumps"] = s.var_jumps;
      j["max_jumps"] = s.max_jumps;
      j["event_tail_freq"] = std::vector<double>(
          s.event_tail_freq.data(),
          s.event_tail_freq.data() + s.event_tail_freq.size());
      j["law"] = law_provenance(law);
      j["env"] = env_provenance(env);
      rep.records.push_back(j);
      write_report(rep, sm_o.out);
      std::printf("wrote %s.paths.txt and %s.jsonl (%ld paths)\n",
                  sm_o.out.c_str(), sm_o.out.c_str(), s.count);
      return 0;
    }

    if (fe->parsed()) {
      const RenewalLaw law = resolve_law(fe_o.law, fe_o.L);
      Report rep;
      CsvBuilder csv("seed,n,log_Z,f_hat");
      for (uint64_t seed : fe_o.seeds) {
        const Environment env = resolve_env(fe_o, seed, fe_o.L);
        const ModelParams params{fe_o.beta, fe_o.h};
        const Eigen::ArrayXd log_Z =
            compute_constrained(env, law, params, fe_o.L);
        const Eigen::ArrayXd f = free_energy_sequence(log_Z);
        for (int n = 1; n <= fe_o.L; ++n)
          csv.row({static_cast<double>(seed), static_cast<double>(n),
                   log_Z[n], f[n]});
        Json j;
        j["record"] = "free_energy";
        j["seed"] = seed;
        j["f_hat"] = f[fe_o.L];
        j["horizon"] = fe_o.L;
        j["law"] = law_provenance(law);
        j["env_checksum"] = hex64(env.checksum);
        rep.records.push_back(j);
      }
      rep.csv.emplace_back("sequence", csv.str());
      write_report(rep, fe_o.out);
      std::printf("wrote %s.jsonl\n", fe_o.out.c_str());
      return 0;
    }

    if (hc->parsed()) {
      const RenewalLaw law = resolve_law(hc_o.law, hc_o.L);
      double hw = 0.0;
      const ChargeDist dist = parse_dist(hc_o.dist, &hw);
      Report rep;
      if (hc_estimator != "slope") {
        const HcBisect b = estimate_hc_bisection(law, dist, hc_o.beta,
                                                 hc_o.seeds, hc_o.L, hc_tol, hw);
        Json j;
        j["record"] = "hc_bisect";
        j["hc"] = b.hc;
        j["half_width"] = b.half_width;
        j["ensemble_spread"] = b.ensemble_spread;
        j["f_at_hc"] = b.f_at_hc;
        Json trace = Json::array();
        for (const auto& t : b.trace)
          trace.push_back({{"h", t.h},
                           {"median_f", t.median_f},
                           {"localized", t.localized}});
        j["trace"] = trace;
        rep.records.push_back(j);
      }
      if (hc_estimator != "bisect") {
        const double probe =
            std::isnan(hc_probe)
                ? annealed_curve(dist, hc_o.beta, hw) + 0.5
                : hc_probe;
        const Environment env = resolve_env(hc_o, hc_o.seeds.front(), hc_o.L);
        const LadderTables tables = compute_ladder(
            env, law, ModelParams{hc_o.beta, probe}, hc_o.n_max, hc_o.L);
        const HcSlope s = estimate_hc_slope(tables, hc_w1, hc_w2);
        Json j;
        j["record"] = "hc_slope";
        j["hc"] = s.hc;
        j["h_probe"] = probe;
        j["slope"] = s.slope;
        j["slope_stderr"] = s.slope_stderr;
        j["max_trunc_gap"] = s.max_trunc_gap;
        j["window"] = {s.window_lo, s.window_hi};
        rep.records.push_back(j);
      }
      Json prov;
      prov["record"] = "provenance";
      prov["law"] = law_provenance(law);
      prov["beta"] = hc_o.beta;
      prov["seeds"] = hc_o.seeds;
      prov["engine_version"] = kEngineVersion;
      rep.records.insert(rep.records.begin(), prov);
      write_report(rep, hc_o.out);
      std::printf("wrote %s.jsonl\n", hc_o.out.c_str());
      return 0;
    }

    if (t1->parsed()) {
      VerificationConfig cfg = to_config(t1_o);
      cfg.exact_levels = t1_exact;
      return finish(verify_theorem1(cfg), t1_o.out);
    }
    if (pr->parsed()) {
      VerificationConfig cfg = to_config(pr_o);
      cfg.epsilon = pr_eps;
      cfg.hc_reference = pr_hcref;
      return finish(verify_prop_main(cfg), pr_o.out);
    }
    if (t2->parsed()) {
      VerificationConfig cfg = to_config(t2_o);
      cfg.epsilon = t2_eps;
      cfg.c = t2_c;
      cfg.c_control = t2_cc;
      cfg.hc_reference = t2_hcref;
      cfg.decay_target = t2_decay;
      return finish(verify_theorem2(cfg), t2_o.out);
    }
    if (bn->parsed()) {
      bn_cfg.timing_asserts = !bn_no_timing;
      return finish(run_benchmark(bn_cfg), bn_out);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const TruncationError& e) {
    std::fprintf(stderr, "truncation error: %s\n", e.what());
    return 2;
  } catch (const DataFormatError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  }
  return 0;
}
