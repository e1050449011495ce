#include "mwl/mwl.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "analyzer.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "model.hpp"
#include "skew_bm.hpp"
#include "walk.hpp"

struct mwl_model {
  mwl::WalkModel impl;
};

namespace {

void put_error(const char* msg, char* errbuf, size_t errbuf_len) {
  if (!errbuf || errbuf_len == 0) return;
  std::strncpy(errbuf, msg, errbuf_len - 1);
  errbuf[errbuf_len - 1] = '\0';
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) return nullptr;
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
int guarded(char* errbuf, size_t errbuf_len, F&& f) {
  try {
    f();
    return MWL_OK;
  } catch (const mwl::Error& e) {
    put_error(e.what(), errbuf, errbuf_len);
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    put_error(e.what(), errbuf, errbuf_len);
    return MWL_E_INTERNAL;
  } catch (...) {
    put_error("unknown failure", errbuf, errbuf_len);
    return MWL_E_INTERNAL;
  }
}

nlohmann::json ledger_json(const mwl::SimulationResult& sim) {
  const mwl::ExcursionLedger& l = sim.ledger;
  nlohmann::json j;
  j["n"] = l.n;
  j["start"] = l.start;
  j["m"] = l.m;
  j["center"] = l.center;
  j["final_position"] = sim.path.final_position;
  j["M_plus"] = l.M_plus;
  j["M_minus"] = l.M_minus;
  j["L_plus"] = l.L_plus;
  j["L_minus"] = l.L_minus;
  j["nu"] = l.nu;
  j["occ_plus"] = l.occ_plus;
  j["occ_minus"] = l.occ_minus;
  j["residual_plus"] = l.residual_plus;
  j["residual_minus"] = l.residual_minus;
  j["rho_plus_sum"] = l.rho_plus_sum;
  j["rho_minus_sum"] = l.rho_minus_sum;
  j["cycles"] = l.cycles;
  j["excursions_pos"] = l.excursions_pos;
  j["excursions_neg"] = l.excursions_neg;
  j["l_increments_outside_A"] = l.l_increments_outside_A;
  return j;
}

int require(const void* p, const char* what, char* errbuf, size_t errbuf_len) {
  if (p) return MWL_OK;
  put_error(what, errbuf, errbuf_len);
  return MWL_E_INVALID_PARAMETER;
}

}  // namespace

extern "C" {

const char* mwl_version(void) { return MWL_VERSION_STRING; }

const char* mwl_error_name(int code) {
  if (code < 0 || code > static_cast<int>(mwl::ErrorCode::Internal))
    return "unknown";
  return mwl::error_code_name(static_cast<mwl::ErrorCode>(code));
}

void mwl_string_free(char* s) { std::free(s); }

mwl_model* mwl_model_create(const char* model_json, int* code, char* errbuf,
                            size_t errbuf_len) {
  mwl_model* out = nullptr;
  const int rc =
      model_json
          ? guarded(errbuf, errbuf_len,
                    [&] { out = new mwl_model{mwl::WalkModel::from_json_text(model_json)}; })
          : require(nullptr, "model_json is NULL", errbuf, errbuf_len);
  if (code) *code = rc;
  return out;
}

void mwl_model_free(mwl_model* model) { delete model; }

int mwl_model_irreducible(const mwl_model* model, int* irreducible,
                          char** report_json, char* errbuf, size_t errbuf_len) {
  if (int rc = require(model, "model is NULL", errbuf, errbuf_len)) return rc;
  if (int rc = require(irreducible, "irreducible is NULL", errbuf, errbuf_len))
    return rc;
  return guarded(errbuf, errbuf_len, [&] {
    const mwl::IrreducibilityReport rep = mwl::is_irreducible(model->impl);
    *irreducible = rep.irreducible ? 1 : 0;
    if (report_json) {
      nlohmann::json j;
      j["irreducible"] = rep.irreducible;
      j["reason"] = rep.reason;
      if (!rep.irreducible) {
        j["witness_from"] = rep.witness_from;
        j["witness_to"] = rep.witness_to;
      }
      *report_json = dup_string(j.dump());
    }
  });
}

int mwl_analyze(const mwl_model* model, double eta_eps, double tol,
                char** result_json, char* errbuf, size_t errbuf_len) {
  if (int rc = require(model, "model is NULL", errbuf, errbuf_len)) return rc;
  if (int rc = require(result_json, "result_json is NULL", errbuf, errbuf_len))
    return rc;
  return guarded(errbuf, errbuf_len, [&] {
    mwl::KernelOptions opt;
    if (eta_eps > 0.0) opt.eta_eps = eta_eps;
    if (tol > 0.0) opt.tol = tol;
    *result_json = dup_string(mwl::gamma_exact(model->impl, opt).to_json().dump());
  });
}

int mwl_simulate(const mwl_model* model, int64_t n, uint64_t seed,
                 uint64_t stream, char** ledger_out, char* errbuf,
                 size_t errbuf_len) {
  if (int rc = require(model, "model is NULL", errbuf, errbuf_len)) return rc;
  if (int rc = require(ledger_out, "ledger_json is NULL", errbuf, errbuf_len))
    return rc;
  return guarded(errbuf, errbuf_len, [&] {
    mwl::SimulateOptions opt;
    opt.n = n;
    opt.seed = seed;
    opt.stream = stream;
    *ledger_out = dup_string(ledger_json(mwl::simulate(model->impl, opt)).dump());
  });
}

int mwl_simulate_dump_path(const mwl_model* model, int64_t n, uint64_t seed,
                           uint64_t stream, const char* csv_path,
                           char** ledger_out, char* errbuf,
                           size_t errbuf_len) {
  if (int rc = require(model, "model is NULL", errbuf, errbuf_len)) return rc;
  if (int rc = require(csv_path, "csv_path is NULL", errbuf, errbuf_len))
    return rc;
  if (int rc = require(ledger_out, "ledger_json is NULL", errbuf, errbuf_len))
    return rc;
  return guarded(errbuf, errbuf_len, [&] {
    mwl::SimulateOptions opt;
    opt.n = n;
    opt.seed = seed;
    opt.stream = stream;
    opt.keep_path = true;
    const mwl::SimulationResult sim = mwl::simulate(model->impl, opt);
    std::ofstream f(csv_path);
    if (!f) mwl::fail(mwl::ErrorCode::IOFailure,
                      std::string("cannot open ") + csv_path);
    f << "step,position\n";
    for (std::size_t k = 0; k < sim.path.positions.size(); ++k)
      f << k << ',' << sim.path.positions[k] << '\n';
    if (!f) mwl::fail(mwl::ErrorCode::IOFailure,
                      std::string("cannot write ") + csv_path);
    *ledger_out = dup_string(ledger_json(sim).dump());
  });
}

int mwl_run_convergence(const char* config_json, char** report_json,
                        char* errbuf, size_t errbuf_len) {
  if (int rc = require(config_json, "config_json is NULL", errbuf, errbuf_len))
    return rc;
  if (int rc = require(report_json, "report_json is NULL", errbuf, errbuf_len))
    return rc;
  return guarded(errbuf, errbuf_len, [&] {
    const mwl::ExperimentConfig cfg =
        mwl::ExperimentConfig::from_json_text(config_json);
    *report_json = dup_string(mwl::run_convergence(cfg).report.dump());
  });
}

int mwl_run_diagnostics(const char* model_json, int64_t n, int64_t paths,
                        uint64_t seed, uint64_t stream_base,
                        const char* pairs_json, char** report_json,
                        char* errbuf, size_t errbuf_len) {
  if (int rc = require(model_json, "model_json is NULL", errbuf, errbuf_len))
    return rc;
  if (int rc = require(report_json, "report_json is NULL", errbuf, errbuf_len))
    return rc;
  return guarded(errbuf, errbuf_len, [&] {
    const mwl::WalkModel model = mwl::WalkModel::from_json_text(model_json);
    mwl::SeedSpec seeds;
    seeds.base = seed;
    seeds.stream_base = stream_base;
    std::vector<std::pair<double, double>> pairs{{0.0, 1.0}};
    if (pairs_json) {
      const nlohmann::json pj = nlohmann::json::parse(pairs_json, nullptr, false);
      if (pj.is_discarded() || !pj.is_array() || pj.empty())
        mwl::fail(mwl::ErrorCode::InvalidParameter,
                  "pairs_json must be a nonempty JSON array of [s, t] pairs");
      pairs.clear();
      for (const auto& p : pj) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number())
          mwl::fail(mwl::ErrorCode::InvalidParameter,
                    "each pair must be [s, t] with numeric entries");
        pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
    *report_json = dup_string(
        mwl::proposition1_diagnostics(model, n, paths, seeds, pairs).dump());
  });
}

int mwl_skewbm_density(double beta, double sigma, double t, double x, double y,
                       double* out, char* errbuf, size_t errbuf_len) {
  if (int rc = require(out, "out is NULL", errbuf, errbuf_len)) return rc;
  return guarded(errbuf, errbuf_len,
                 [&] { *out = mwl::SkewBM(beta, sigma).density(t, x, y); });
}

int mwl_skewbm_cdf(double beta, double sigma, double t, double x, double y,
                   double* out, char* errbuf, size_t errbuf_len) {
  if (int rc = require(out, "out is NULL", errbuf, errbuf_len)) return rc;
  return guarded(errbuf, errbuf_len,
                 [&] { *out = mwl::SkewBM(beta, sigma).cdf(t, x, y); });
}

int mwl_skewbm_quantile(double beta, double sigma, double t, double x, double u,
                        double* out, char* errbuf, size_t errbuf_len) {
  if (int rc = require(out, "out is NULL", errbuf, errbuf_len)) return rc;
  return guarded(errbuf, errbuf_len,
                 [&] { *out = mwl::SkewBM(beta, sigma).quantile(t, x, u); });
}

int mwl_skewbm_sample_path(double beta, double sigma, const double* times,
                           size_t n_times, uint64_t seed, uint64_t stream,
                           double* out, char* errbuf, size_t errbuf_len) {
  if (int rc = require(times, "times is NULL", errbuf, errbuf_len)) return rc;
  if (int rc = require(out, "out is NULL", errbuf, errbuf_len)) return rc;
  return guarded(errbuf, errbuf_len, [&] {
    const std::vector<double> grid(times, times + n_times);
    const std::vector<double> path =
        mwl::SkewBM(beta, sigma).sample_path(grid, seed, stream);
    std::memcpy(out, path.data(), path.size() * sizeof(double));
  });
}

int mwl_skewbm_flip_path(double beta, double sigma, int64_t n_steps,
                         const double* times, size_t n_times, uint64_t seed,
                         uint64_t stream, double* out, char* errbuf,
                         size_t errbuf_len) {
  if (int rc = require(times, "times is NULL", errbuf, errbuf_len)) return rc;
  if (int rc = require(out, "out is NULL", errbuf, errbuf_len)) return rc;
  return guarded(errbuf, errbuf_len, [&] {
    const std::vector<double> grid(times, times + n_times);
    const std::vector<double> path =
        mwl::SkewBM(beta, sigma).flip_path(n_steps, grid, seed, stream);
    std::memcpy(out, path.data(), path.size() * sizeof(double));
  });
}

}  // extern "C"
