#include "mdnmsaf/mdnmsaf.h"

#include "harness.hpp"
#include "presets.hpp"

#include <cmath>
#include <cstdio>
#include <new>
#include <string>
#include <vector>

struct mdn_config {
  nlohmann::json doc;
  std::string resolved;
};

struct mdn_result {
  std::string csv;
  std::string summary;
  bool diverged = false;
  std::vector<double> values;
};

namespace {

thread_local std::string g_last_error;

mdn_status status_of(mdn::ErrorKind k) {
  switch (k) {
    case mdn::ErrorKind::InvalidArgument: return MDN_ERR_INVALID_ARGUMENT;
    case mdn::ErrorKind::Config: return MDN_ERR_CONFIG;
    case mdn::ErrorKind::Io: return MDN_ERR_IO;
    case mdn::ErrorKind::Unstable: return MDN_ERR_UNSTABLE;
    case mdn::ErrorKind::Capacity: return MDN_ERR_CAPACITY;
  }
  return MDN_ERR_INTERNAL;
}

template <class F>
mdn_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MDN_OK;
  } catch (const mdn::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MDN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MDN_ERR_INTERNAL;
  }
}

mdn_status null_argument(const char* what) {
  g_last_error = std::string(what) + " must not be null";
  return MDN_ERR_INVALID_ARGUMENT;
}

mdn::ExperimentConfig resolve(const mdn_config* cfg) {
  mdn::ExperimentConfig c = mdn::config_from_json(cfg->doc);
  mdn::validate(c);
  return c;
}

std::string line(const char* key, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.6f\n", key, v);
  return buf;
}

std::string hash_line(std::uint64_t h) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "config_hash=%016llx\n", static_cast<unsigned long long>(h));
  return buf;
}

mdn_result* new_result() { return new mdn_result(); }

}  // namespace

extern "C" {

const char* mdn_version(void) { return "1.0.0"; }

const char* mdn_last_error(void) { return g_last_error.c_str(); }

const char* mdn_status_name(mdn_status s) {
  switch (s) {
    case MDN_OK: return "ok";
    case MDN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MDN_ERR_CONFIG: return "config error";
    case MDN_ERR_IO: return "i/o error";
    case MDN_ERR_UNSTABLE: return "unstable";
    case MDN_ERR_CAPACITY: return "capacity exceeded";
    case MDN_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

mdn_status mdn_config_create(mdn_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* c = new mdn_config();
    c->doc = mdn::config_to_json(mdn::ExperimentConfig{});
    *out = c;
  });
}

mdn_status mdn_config_merge_file(mdn_config* cfg, const char* path) {
  if (!cfg) return null_argument("cfg");
  if (!path) return null_argument("path");
  return guarded([&] {
    nlohmann::json doc = mdn::read_json_file(path);
    if (!doc.is_object()) mdn::fail(mdn::ErrorKind::Config, "config file must hold a JSON object");
    nlohmann::json merged = cfg->doc;
    mdn::merge_json(merged, doc);
    (void)mdn::config_from_json(merged);
    cfg->doc = std::move(merged);
  });
}

mdn_status mdn_config_load(const char* path, mdn_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  mdn_config* c = nullptr;
  mdn_status s = mdn_config_create(&c);
  if (s != MDN_OK) return s;
  s = mdn_config_merge_file(c, path);
  if (s != MDN_OK) {
    mdn_config_free(c);
    return s;
  }
  *out = c;
  return MDN_OK;
}

mdn_status mdn_config_parse(const char* json_text, mdn_config** out) {
  if (!out) return null_argument("out");
  if (!json_text) return null_argument("json_text");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
      mdn::fail(mdn::ErrorKind::Config, "config text is not a JSON object");
    auto* c = new mdn_config();
    c->doc = mdn::config_to_json(mdn::ExperimentConfig{});
    mdn::merge_json(c->doc, doc);
    try {
      (void)mdn::config_from_json(c->doc);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

mdn_status mdn_config_set(mdn_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_argument("cfg");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] {
    nlohmann::json doc = cfg->doc;
    mdn::apply_override(doc, std::string(key) + "=" + value);
    (void)mdn::config_from_json(doc);
    cfg->doc = std::move(doc);
  });
}

mdn_status mdn_config_json(mdn_config* cfg, const char** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  return guarded([&] {
    cfg->resolved = mdn::config_to_json(mdn::config_from_json(cfg->doc)).dump(2);
    *out = cfg->resolved.c_str();
  });
}

mdn_status mdn_config_get(mdn_config* cfg, const char* key, const char** out) {
  if (!cfg) return null_argument("cfg");
  if (!key) return null_argument("key");
  if (!out) return null_argument("out");
  return guarded([&] {
    const nlohmann::json full = mdn::config_to_json(mdn::config_from_json(cfg->doc));
    const nlohmann::json* node = &full;
    std::string k = key;
    std::size_t start = 0;
    while (true) {
      const auto dot = k.find('.', start);
      const std::string part = k.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!node->is_object() || !node->contains(part))
        mdn::fail(mdn::ErrorKind::Config, "unknown config key '" + k + "'");
      node = &(*node)[part];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    cfg->resolved = node->is_string() ? node->get<std::string>() : node->dump();
    *out = cfg->resolved.c_str();
  });
}

void mdn_config_free(mdn_config* cfg) { delete cfg; }

mdn_status mdn_run(const mdn_config* cfg, mdn_result** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto c = resolve(cfg);
    const auto curve = mdn::run_monte_carlo(c);
    auto* r = new_result();
    r->csv = mdn::curve_csv(curve);
    r->values = curve.msd_db;
    r->diverged = curve.diverged;
    r->summary = line("steady_state_db", curve.steady_state_db) +
                 "diverged=" + (curve.diverged ? "1" : "0") + "\n" +
                 "trials=" + std::to_string(curve.trials) + "\n" +
                 "iterations=" + std::to_string(c.iterations) + "\n" + hash_line(curve.config_hash);
    *out = r;
  });
}

mdn_status mdn_sweep(const mdn_config* cfg, mdn_result** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto c = resolve(cfg);
    const auto rows = mdn::sweep_steady_state(c);
    auto* r = new_result();
    r->csv = mdn::sweep_csv(rows);
    for (const auto& row : rows) {
      r->values.push_back(row.sim_db);
      r->diverged = r->diverged || row.diverged;
    }
    r->summary = "points=" + std::to_string(rows.size()) + "\n" +
                 "diverged=" + (r->diverged ? "1" : "0") + "\n" + hash_line(mdn::config_hash(c));
    *out = r;
  });
}

mdn_status mdn_compare(const mdn_config* cfg, mdn_result** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto c = resolve(cfg);
    const auto cmp = mdn::comparison_experiment(c);
    auto* r = new_result();
    r->csv = mdn::comparison_csv(cmp);
    for (std::size_t i = 0; i < cmp.curves.size(); ++i) {
      const auto& curve = cmp.curves[i];
      const std::string name = mdn::to_string(cmp.algorithms[i]);
      r->summary += line((name + ".steady_state_db").c_str(), curve.steady_state_db);
      r->summary += name + ".diverged=" + (curve.diverged ? "1" : "0") + "\n";
      r->diverged = r->diverged || curve.diverged;
      r->values.insert(r->values.end(), curve.msd_db.begin(), curve.msd_db.end());
    }
    r->summary += hash_line(mdn::config_hash(c));
    *out = r;
  });
}

mdn_status mdn_theory(const mdn_config* cfg, mdn_result** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto c = resolve(cfg);
    const auto rep = mdn::theory_experiment(c);
    const int stride = c.step.subbands;
    const auto axis = mdn::theory_on_sample_axis(rep.transient_lin, c.iterations, stride);
    auto* r = new_result();
    r->csv = mdn::theory_csv(axis, c.step.mu, c.step.subbands);
    for (double x : axis) r->values.push_back(mdn::to_db(x));
    r->summary = line("mean_step_bound", rep.mean_bound);
    if (rep.ms_bound) {
      r->summary += line("ms_step_bound", rep.ms_bound->value);
      r->summary += line("ms_step_bound_bisection", rep.ms_bound->bisection);
      if (rep.ms_bound->companion_available)
        r->summary += line("ms_step_bound_companion", rep.ms_bound->companion);
      else
        r->summary += "ms_step_bound_companion=unavailable\n";
    }
    if (rep.steady_state_lin) {
      r->summary += line("steady_state_db", mdn::to_db(*rep.steady_state_lin));
    } else {
      r->summary += "steady_state_db=unavailable\n";
      r->diverged = true;
    }
    r->summary += line("moment_relative_se", rep.moments.max_relative_se);
    r->summary += std::string("undersampled=") + (rep.moments.undersampled ? "1" : "0") + "\n";
    if (!rep.note.empty()) r->summary += "note=" + rep.note + "\n";
    r->summary += hash_line(mdn::config_hash(c));
    *out = r;
  });
}

mdn_status mdn_complexity(const mdn_config* cfg, mdn_result** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto c = resolve(cfg);
    const auto rows = mdn::complexity_table(c);
    auto* r = new_result();
    r->csv = mdn::complexity_csv(rows);
    for (const auto& row : rows) {
      r->values.push_back(static_cast<double>(row.multiplications));
      r->values.push_back(static_cast<double>(row.additions));
    }
    *out = r;
  });
}

mdn_status mdn_signals(const mdn_config* cfg, long samples, mdn_result** out) {
  if (!cfg) return null_argument("cfg");
  if (!out) return null_argument("out");
  *out = nullptr;
  if (samples < 1) {
    g_last_error = "samples must be positive";
    return MDN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto c = resolve(cfg);
    auto* r = new_result();
    r->csv = mdn::signals_csv(c, samples);
    *out = r;
  });
}

mdn_status mdn_presets_list(mdn_result** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* r = new_result();
    for (const auto& name : mdn::builtin_preset_names()) r->csv += name + "\n";
    *out = r;
  });
}

const char* mdn_result_csv(const mdn_result* r) { return r ? r->csv.c_str() : ""; }
const char* mdn_result_summary(const mdn_result* r) { return r ? r->summary.c_str() : ""; }
int mdn_result_diverged(const mdn_result* r) { return r && r->diverged ? 1 : 0; }
size_t mdn_result_length(const mdn_result* r) { return r ? r->values.size() : 0; }
const double* mdn_result_values(const mdn_result* r) {
  return r && !r->values.empty() ? r->values.data() : nullptr;
}

mdn_status mdn_result_write_csv(const mdn_result* r, const char* path) {
  if (!r) return null_argument("result");
  if (!path) return null_argument("path");
  return guarded([&] { mdn::write_text(path, r->csv); });
}

void mdn_result_free(mdn_result* r) { delete r; }

}  // extern "C"
