#include "dlab/dlab.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "dlab/error.hpp"
#include "dlab/plot.hpp"
#include "dlab/runner.hpp"
#include "dlab/serialize.hpp"

struct dlab_space {
  dlab::GraphSpace space;
};

struct dlab_spectrum {
  dlab::GeneratorSpectrum spec;
};

namespace {

thread_local std::string last_error;

dlab_status status_of(dlab::ErrorKind kind) { return static_cast<dlab_status>(static_cast<int>(kind) + 1); }

dlab_status set_error(dlab_status s, const std::string& what) {
  last_error = what;
  return s;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, translating exceptions into status codes and last_error.
template <class Fn>
dlab_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return DLAB_OK;
  } catch (const dlab::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const dlab::Json::exception& e) {
    return set_error(DLAB_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DLAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DLAB_ERR_INTERNAL, e.what());
  }
}

template <class Fn>
dlab_status api(Fn&& fn) {
  try {
    return guarded(std::forward<Fn>(fn));
  } catch (...) {
    return set_error(DLAB_ERR_INTERNAL, "unexpected exception");
  }
}

dlab::Json number(double v) { return std::isfinite(v) ? dlab::Json(v) : dlab::Json(dlab::format_number(v)); }

}  // namespace

extern "C" {

const char* dlab_version(void) { return "0.1.0"; }

const char* dlab_last_error(void) { return last_error.c_str(); }

const char* dlab_status_name(dlab_status status) {
  switch (status) {
    case DLAB_OK: return "ok";
    case DLAB_ERR_ARGUMENT: return "argument";
    case DLAB_ERR_INTERNAL: return "internal";
    default:
      if (status >= DLAB_ERR_SIZE && status <= DLAB_ERR_IO) {
        return dlab::to_string(static_cast<dlab::ErrorKind>(static_cast<int>(status) - 1));
      }
      return "unknown";
  }
}

void dlab_string_free(char* s) { std::free(s); }

dlab_status dlab_space_create(const char* spec, dlab_space** out) {
  if (!spec || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    std::string text(spec);
    auto s = !text.empty() && text.front() == '{' ? dlab::space_spec_from_json(dlab::Json::parse(text))
                                                  : dlab::parse_space_spec(text);
    *out = new dlab_space{dlab::build_space(s)};
  });
}

void dlab_space_free(dlab_space* space) { delete space; }

dlab_status dlab_space_size(const dlab_space* space, size_t* out) {
  if (!space || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  *out = space->space.size();
  last_error.clear();
  return DLAB_OK;
}

dlab_status dlab_space_json(const dlab_space* space, char** out) {
  if (!space || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] { *out = dup(dlab::space_to_json(space->space).dump() + "\n"); });
}

dlab_status dlab_spectrum_create(const dlab_space* space, const char* domain, const char* potential,
                                 dlab_spectrum** out) {
  if (!space || !domain || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    const auto& g = space->space;
    auto mask = dlab::parse_domain(g, domain);
    std::optional<dlab::PotentialField> V;
    if (potential) V = dlab::parse_potential(g, potential);
    *out = new dlab_spectrum{dlab::assemble_generator(g, mask, V ? &*V : nullptr)};
  });
}

void dlab_spectrum_free(dlab_spectrum* spectrum) { delete spectrum; }

dlab_status dlab_spectrum_size(const dlab_spectrum* spectrum, size_t* out) {
  if (!spectrum || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  *out = spectrum->spec.size();
  last_error.clear();
  return DLAB_OK;
}

dlab_status dlab_spectrum_eigenvalue(const dlab_spectrum* spectrum, size_t n, double* out) {
  if (!spectrum || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  if (n >= spectrum->spec.size()) return set_error(DLAB_ERR_ARGUMENT, "eigenvalue index out of range");
  *out = spectrum->spec.eigenvalue(n);
  last_error.clear();
  return DLAB_OK;
}

dlab_status dlab_spectrum_csv(const dlab_spectrum* spectrum, size_t k, char** eigenvalues, char** modes) {
  if (!spectrum || !eigenvalues || !modes) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    std::string e = dlab::eigenvalues_csv(spectrum->spec, k), m = dlab::modes_csv(spectrum->spec, k);
    *eigenvalues = dup(e);
    *modes = dup(m);
  });
}

dlab_status dlab_heat_kernel(const dlab_spectrum* spectrum, double t, size_t x, size_t y, double* out) {
  if (!spectrum || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    dlab::require(x < spectrum->spec.domain().space_size() && y < spectrum->spec.domain().space_size(),
                  dlab::ErrorKind::domain, "vertex out of range");
    *out = dlab::heat_kernel(spectrum->spec, t, x, y);
  });
}

dlab_status dlab_green(const dlab_spectrum* spectrum, size_t x, size_t y, double* out) {
  if (!spectrum || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    dlab::require(x < spectrum->spec.domain().space_size() && y < spectrum->spec.domain().space_size(),
                  dlab::ErrorKind::domain, "vertex out of range");
    *out = dlab::green(spectrum->spec, x, y);
  });
}

dlab_status dlab_heat_csv(const dlab_space* space, const dlab_spectrum* spectrum, const double* times, size_t n_times,
                          size_t x, size_t y, char** out) {
  if (!space || !spectrum || !out || (!times && n_times > 0)) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    const auto& g = space->space;
    dlab::require(spectrum->spec.domain().space_size() == g.size(), dlab::ErrorKind::domain,
                  "spectrum belongs to a different space");
    dlab::require(x < g.size() && y < g.size(), dlab::ErrorKind::domain, "vertex out of range");
    auto whole = dlab::assemble_generator(g, dlab::DomainMask::whole(g));
    // Envelope samples: every requested time plus a log grid, from x to a
    // spread of targets.
    std::vector<dlab::KernelSample> samples;
    std::vector<double> ts(times, times + n_times);
    for (int k = -4; k <= 4; ++k) ts.push_back(std::pow(4.0, k) * std::max(1.0, g.scaling().F(g.diameter_estimate() / 4)));
    const std::size_t stride = std::max<std::size_t>(1, g.size() / 40);
    for (double t : ts) {
      dlab::require(t > 0.0, dlab::ErrorKind::domain, "times must be positive");
      for (dlab::Vertex z = 0; z < g.size(); z += stride) samples.push_back({t, x, z});
      samples.push_back({t, x, y});
    }
    auto env = dlab::fit_envelope(g, whole, samples);
    std::string csv = "t,x,y,p,bound,ratio\n";
    for (std::size_t i = 0; i < n_times; ++i) {
      const double t = times[i];
      const double p = dlab::heat_kernel(spectrum->spec, t, x, y);
      const double b = dlab::envelope_upper(g, env, t, x, y);
      csv += dlab::format_number(t) + "," + std::to_string(x) + "," + std::to_string(y) + "," +
             dlab::format_number(p) + "," + dlab::format_number(b) + "," + dlab::format_number(p / b) + "\n";
    }
    *out = dup(csv);
  });
}

dlab_status dlab_hitting_json(const dlab_space* space, const char* target, size_t start, double deadline,
                              size_t paths, uint64_t seed, char** out) {
  if (!space || !target || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    const auto& g = space->space;
    dlab::require(start < g.size(), dlab::ErrorKind::domain, "start vertex out of range");
    dlab::require(deadline > 0.0, dlab::ErrorKind::domain, "deadline must be positive");
    auto K = dlab::parse_domain(g, target);
    auto exact = dlab::exact_hitting_prob_by_time(g, K, start, deadline);
    dlab::Json j = {{"start", start},
                    {"target", target},
                    {"deadline", deadline},
                    {"exact", exact.value},
                    {"start_in_target", exact.degenerate}};
    if (paths > 0) {
      auto mc = dlab::hitting_mc(g, K, start, deadline, dlab::WalkConfig{seed, paths});
      j["mc"] = mc.probability;
      j["stderr"] = mc.std_error;
      j["paths"] = mc.n_paths;
      j["seed"] = seed;
    } else {
      j["mc"] = nullptr;
      j["stderr"] = nullptr;
    }
    *out = dup(j.dump() + "\n");
  });
}

dlab_status dlab_exit_time_json(const dlab_space* space, const char* domain, size_t start, size_t paths,
                                uint64_t seed, char** out) {
  if (!space || !domain || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    const auto& g = space->space;
    auto omega = dlab::parse_domain(g, domain);
    dlab::require(omega.contains(start), dlab::ErrorKind::domain, "start vertex must lie in the domain");
    const double exact = dlab::exact_mean_exit(g, omega)[start];
    auto median = dlab::median_exit_time(g, omega, start);
    dlab::Json j = {{"start", start},
                    {"domain", domain},
                    {"exact", exact},
                    {"median", median.time},
                    {"median_quantum", median.quantum}};
    if (paths > 0) {
      dlab::StopRule rule;
      rule.domain = &omega;
      auto recs = dlab::simulate_paths(g, start, rule, dlab::WalkConfig{seed, paths});
      std::vector<double> times;
      std::size_t truncated = 0;
      for (const auto& r : recs) {
        if (r.reason == dlab::StopReason::truncated) {
          ++truncated;
        } else {
          times.push_back(r.time);
        }
      }
      auto est = dlab::summarize(times, truncated);
      j["mc"] = est.mean;
      j["stderr"] = est.std_error;
      j["paths"] = paths;
      j["truncated"] = truncated;
      j["seed"] = seed;
    } else {
      j["mc"] = nullptr;
      j["stderr"] = nullptr;
    }
    *out = dup(j.dump() + "\n");
  });
}

dlab_status dlab_norms_json(const dlab_space* space, const char* domain, const char* potential, double p,
                            char** out) {
  if (!space || !domain || !potential || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] {
    const auto& g = space->space;
    auto omega = dlab::parse_domain(g, domain);
    auto V = dlab::parse_potential(g, potential);
    const auto& neg = V.negative_part();
    const auto vs = omega.vertices();
    dlab::Json j = {{"p", p},
                    {"measure", omega.measure(g)},
                    {"theta", number(V.theta(omega))},
                    {"lp", number(V.negative_norm(g, omega, p))},
                    {"lorentz_p1", number(dlab::lorentz_norm(neg, g.measures(), vs, p, dlab::LorentzSecond::one))},
                    {"lorentz_pinf", number(dlab::lorentz_norm(neg, g.measures(), vs, p, dlab::LorentzSecond::weak))}};
    *out = dup(j.dump() + "\n");
  });
}

dlab_status dlab_mittag_leffler(double ell, double x, double* out) {
  if (!out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] { *out = dlab::mittag_leffler(ell, x); });
}

dlab_status dlab_phi(double beta, double s, double* out) {
  if (!out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] { *out = dlab::phi(dlab::ScalingLaw::make(1.0, 1.0, beta), s); });
}

int dlab_verify(const char* kind, const char* config_json, const char* out_dir, char** message) {
  if (message) *message = nullptr;
  if (!config_json || !out_dir) {
    set_error(DLAB_ERR_ARGUMENT, "null argument");
    return dlab::kExitInvalid;
  }
  dlab::RunOutcome r;
  const auto s = api([&] { r = dlab::run_verify(kind ? kind : "", config_json, out_dir); });
  if (s != DLAB_OK) {
    if (message) *message = dup(last_error);
    return dlab::kExitInvalid;
  }
  if (r.exit_code == dlab::kExitInvalid) last_error = r.message;
  if (message) *message = dup(r.message);
  return r.exit_code;
}

dlab_status dlab_plot_svg(const char* plot_json, char** out) {
  if (!plot_json || !out) return set_error(DLAB_ERR_ARGUMENT, "null argument");
  return api([&] { *out = dup(dlab::render_svg(dlab::plot_spec_from_json(dlab::Json::parse(plot_json)))); });
}

}  // extern "C"
