#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mwl/mwl.h"

namespace {

// Model and config arguments accept either a file path or inline JSON.
std::string read_text(const std::string& arg) {
  if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) return arg;
  std::ifstream f(arg);
  if (!f) {
    std::fprintf(stderr, "cannot open %s\n", arg.c_str());
    std::exit(MWL_E_IO_FAILURE);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// A convergence config carries its model under "model"; model commands
// accept either shape so the same file drives every subcommand.
std::string unwrap_model(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_object() && j.contains("model") && j["model"].is_object() &&
      !j.contains("xi"))
    return j["model"].dump();
  return text;
}

void print_json(const char* s) {
  const nlohmann::json j = nlohmann::json::parse(s, nullptr, false);
  if (j.is_discarded())
    std::printf("%s\n", s);
  else
    std::printf("%s\n", j.dump(2).c_str());
}

int report_error(int rc, const char* errbuf) {
  std::fprintf(stderr, "error %d (%s): %s\n", rc, mwl_error_name(rc), errbuf);
  return rc;
}

struct ModelGuard {
  mwl_model* handle = nullptr;
  ~ModelGuard() { mwl_model_free(handle); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integer walks with a membrane and their skew Brownian limit"};
  app.require_subcommand(1);
  char errbuf[512] = {0};

  std::string model_arg, config_arg, dump_path, pairs_arg;
  std::int64_t steps = 1000, paths = 100, flip_steps = 0, sample_paths = 1;
  std::uint64_t seed = 1, stream = 0;
  double eta_eps = 0.0, tol = 0.0;
  double beta = 0.0, sigma = 1.0, t = 1.0, x = 0.0, y = 0.0, u = 0.5;
  std::vector<double> times;

  auto* analyze = app.add_subcommand("analyze", "exact permeability analysis");
  analyze->add_option("model", model_arg, "model JSON file or literal")->required();
  analyze->add_option("--eta-eps", eta_eps, "membrane jump tail mass to drop");
  analyze->add_option("--tol", tol, "kernel band stabilization tolerance");

  auto* irr = app.add_subcommand("irreducible", "membrane chain reachability check");
  irr->add_option("model", model_arg, "model JSON file or literal")->required();

  auto* sim = app.add_subcommand("simulate", "run one walk, print its ledger");
  sim->add_option("model", model_arg, "model JSON file or literal")->required();
  sim->add_option("--steps", steps, "number of steps")->required();
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--stream", stream, "RNG stream");
  sim->add_option("--dump-path", dump_path, "also write step,position CSV here");

  auto* conv = app.add_subcommand("convergence", "scaling study from a config");
  conv->add_option("config", config_arg, "config JSON file or literal")->required();

  auto* diag = app.add_subcommand("diagnose", "decomposition identity diagnostics");
  diag->add_option("model", model_arg, "model JSON file or literal")->required();
  diag->add_option("--steps", steps, "horizon")->required();
  diag->add_option("--paths", paths, "independent walks")->required();
  diag->add_option("--seed", seed, "RNG seed");
  diag->add_option("--stream-base", stream, "first RNG stream");
  diag->add_option("--pairs", pairs_arg,
                   "increment windows as JSON, e.g. [[0,0.5],[0.5,1]]");

  auto* skew = app.add_subcommand("skewbm", "skew Brownian motion");
  skew->require_subcommand(1);
  auto add_common = [&](CLI::App* c, bool with_t) {
    c->add_option("--beta", beta, "permeability in [-1, 1]")->required();
    c->add_option("--sigma", sigma, "diffusion coefficient");
    if (with_t) c->add_option("-t,--time", t, "horizon")->required();
  };
  auto* dens = skew->add_subcommand("density", "transition density p_t(x, y)");
  add_common(dens, true);
  dens->add_option("-x", x, "start")->required();
  dens->add_option("-y", y, "end")->required();
  auto* cdf = skew->add_subcommand("cdf", "P{X(t) <= y | X(0) = x}");
  add_common(cdf, true);
  cdf->add_option("-x", x, "start")->required();
  cdf->add_option("-y", y, "end")->required();
  auto* quant = skew->add_subcommand("quantile", "inverse cdf in y");
  add_common(quant, true);
  quant->add_option("-x", x, "start")->required();
  quant->add_option("-u", u, "level in (0, 1)")->required();
  auto* sample = skew->add_subcommand("sample", "paths on a time grid, CSV out");
  add_common(sample, false);
  sample->add_option("--times", times, "strictly increasing times")
      ->required()
      ->delimiter(',');
  sample->add_option("--paths", sample_paths, "independent paths");
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--stream", stream, "first RNG stream");
  sample->add_option("--flip-steps", flip_steps,
                     "approximate instead: flip the excursions of a walk with "
                     "this many steps (times then live in [0, 1])");

  CLI11_PARSE(app, argc, argv);

  if (*analyze || *irr || *sim || *diag) {
    const std::string model_json = unwrap_model(read_text(model_arg));
    ModelGuard model;
    int rc = MWL_OK;
    model.handle = mwl_model_create(model_json.c_str(), &rc, errbuf, sizeof errbuf);
    if (!model.handle) return report_error(rc, errbuf);

    char* out = nullptr;
    if (*analyze) {
      rc = mwl_analyze(model.handle, eta_eps, tol, &out, errbuf, sizeof errbuf);
    } else if (*irr) {
      int flag = 0;
      rc = mwl_model_irreducible(model.handle, &flag, &out, errbuf, sizeof errbuf);
    } else if (*sim) {
      rc = dump_path.empty()
               ? mwl_simulate(model.handle, steps, seed, stream, &out, errbuf,
                              sizeof errbuf)
               : mwl_simulate_dump_path(model.handle, steps, seed, stream,
                                        dump_path.c_str(), &out, errbuf,
                                        sizeof errbuf);
    } else {
      rc = mwl_run_diagnostics(model_json.c_str(), steps, paths, seed, stream,
                               pairs_arg.empty() ? nullptr : pairs_arg.c_str(),
                               &out, errbuf, sizeof errbuf);
    }
    if (rc != MWL_OK) return report_error(rc, errbuf);
    print_json(out);
    mwl_string_free(out);
    return 0;
  }

  if (*conv) {
    char* out = nullptr;
    const int rc = mwl_run_convergence(read_text(config_arg).c_str(), &out,
                                       errbuf, sizeof errbuf);
    if (rc != MWL_OK) return report_error(rc, errbuf);
    print_json(out);
    mwl_string_free(out);
    return 0;
  }

  if (*dens || *cdf || *quant) {
    double out = 0.0;
    int rc;
    if (*dens)
      rc = mwl_skewbm_density(beta, sigma, t, x, y, &out, errbuf, sizeof errbuf);
    else if (*cdf)
      rc = mwl_skewbm_cdf(beta, sigma, t, x, y, &out, errbuf, sizeof errbuf);
    else
      rc = mwl_skewbm_quantile(beta, sigma, t, x, u, &out, errbuf, sizeof errbuf);
    if (rc != MWL_OK) return report_error(rc, errbuf);
    std::printf("%.17g\n", out);
    return 0;
  }

  // skewbm sample: long CSV, one row per (path, grid point)
  if (sample_paths < 1) {
    std::fprintf(stderr, "--paths must be >= 1\n");
    return MWL_E_INVALID_PARAMETER;
  }
  if (flip_steps > 0)
    std::printf("# sampler,approximate-excursion-flip,resolution,%" PRId64 "\n",
                flip_steps);
  else
    std::printf("# sampler,exact-inverse-cdf\n");
  std::printf("path_id,time,value\n");
  std::vector<double> vals(times.size(), 0.0);
  for (std::int64_t p = 0; p < sample_paths; ++p) {
    const std::uint64_t s = stream + static_cast<std::uint64_t>(p);
    const int rc =
        flip_steps > 0
            ? mwl_skewbm_flip_path(beta, sigma, flip_steps, times.data(),
                                   times.size(), seed, s, vals.data(), errbuf,
                                   sizeof errbuf)
            : mwl_skewbm_sample_path(beta, sigma, times.data(), times.size(),
                                     seed, s, vals.data(), errbuf, sizeof errbuf);
    if (rc != MWL_OK) return report_error(rc, errbuf);
    for (std::size_t i = 0; i < times.size(); ++i)
      std::printf("%" PRId64 ",%.17g,%.17g\n", p, times[i], vals[i]);
  }
  return 0;
}
