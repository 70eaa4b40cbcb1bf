#include "mdnmsaf/mdnmsaf.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kFailure = 1, kDiverged = 2, kConfig = 3 };

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string topology;
  std::string bank_file;
  std::string output;
};

int report(mdn_status s) {
  std::cerr << "error (" << mdn_status_name(s) << "): " << mdn_last_error() << "\n";
  return s == MDN_ERR_CONFIG ? kConfig : kFailure;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_file, "JSON experiment config");
  cmd->add_option("-s,--set", c.overrides, "Override a config key, e.g. step.mu=0.01")->take_all();
  cmd->add_option("--topology", c.topology, "Preset name or topology JSON file");
  cmd->add_option("--bank-file", c.bank_file, "Analysis filter bank text file");
  cmd->add_option("-o,--output", c.output, "CSV output path (stdout if omitted)");
}

// Defaults, then subcommand defaults, then file, then flags, then --set.
int build_config(const Common& c, const std::vector<std::pair<std::string, std::string>>& preset,
                 const std::vector<std::pair<std::string, std::string>>& flags, mdn_config** out) {
  mdn_config* cfg = nullptr;
  mdn_status s = mdn_config_create(&cfg);
  if (s != MDN_OK) return report(s);
  auto apply = [&](const std::string& key, const std::string& value) {
    return mdn_config_set(cfg, key.c_str(), value.c_str());
  };
  for (const auto& [k, v] : preset)
    if ((s = apply(k, v)) != MDN_OK) break;
  if (s == MDN_OK && !c.config_file.empty()) s = mdn_config_merge_file(cfg, c.config_file.c_str());
  if (s == MDN_OK && !c.topology.empty()) s = mdn_config_set(cfg, "topology", ("\"" + c.topology + "\"").c_str());
  if (s == MDN_OK && !c.bank_file.empty()) s = mdn_config_set(cfg, "bank_file", ("\"" + c.bank_file + "\"").c_str());
  for (const auto& [k, v] : flags)
    if (s == MDN_OK) s = apply(k, v);
  for (const auto& o : c.overrides) {
    if (s != MDN_OK) break;
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error (config error): override '" << o << "' is not key=value\n";
      mdn_config_free(cfg);
      return kConfig;
    }
    s = apply(o.substr(0, eq), o.substr(eq + 1));
  }
  if (s != MDN_OK) {
    mdn_config_free(cfg);
    return report(s);
  }
  *out = cfg;
  return kOk;
}

std::string output_path(mdn_config* cfg, const Common& c) {
  if (!c.output.empty()) return c.output;
  const char* value = nullptr;
  if (mdn_config_get(cfg, "output", &value) != MDN_OK) return {};
  return value;
}

// Writes CSV to the output path (summary on stdout) or to stdout (summary on stderr).
int emit(mdn_result* r, const std::string& path) {
  int code = kOk;
  if (path.empty()) {
    std::fputs(mdn_result_csv(r), stdout);
    std::fputs(mdn_result_summary(r), stderr);
  } else {
    const mdn_status s = mdn_result_write_csv(r, path.c_str());
    if (s != MDN_OK) code = report(s);
    std::fputs(mdn_result_summary(r), stdout);
  }
  if (code == kOk && mdn_result_diverged(r)) code = kDiverged;
  mdn_result_free(r);
  return code;
}

using Runner = mdn_status (*)(const mdn_config*, mdn_result**);

int execute(Runner run, const Common& c, const std::vector<std::pair<std::string, std::string>>& preset,
            const std::vector<std::pair<std::string, std::string>>& flags) {
  mdn_config* cfg = nullptr;
  if (int code = build_config(c, preset, flags, &cfg); code != kOk) return code;
  const std::string path = output_path(cfg, c);
  mdn_result* r = nullptr;
  const mdn_status s = run(cfg, &r);
  mdn_config_free(cfg);
  if (s != MDN_OK) return report(s);
  return emit(r, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitask diffusion robust subband adaptive filtering simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mdn_version()));

  Common run_opt, sweep_opt, cmp_opt, th_opt, cx_opt;
  std::string dump_path;
  long dump_samples = 1000;
  std::string figure = "fig8", input = "white";

  auto* run = app.add_subcommand("run", "Monte-Carlo MSD curve for one configuration");
  add_common(run, run_opt);
  run->add_option("--dump-signals", dump_path, "Write raw u, v, d of trial 0 to this CSV");
  run->add_option("--dump-samples", dump_samples, "Samples written by --dump-signals")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Steady-state MSD over the sweep.mu x sweep.n_d grid");
  add_common(sweep, sweep_opt);

  auto* cmp = app.add_subcommand("compare", "Algorithm comparison on the 15-node preset");
  add_common(cmp, cmp_opt);
  cmp->add_option("--figure", figure, "fig8 (convergence) or fig9 (tracking)")
      ->check(CLI::IsMember({"fig8", "fig9"}));
  cmp->add_option("--input", input, "white, ar1 or ar2")->check(CLI::IsMember({"white", "ar1", "ar2"}));

  auto* th = app.add_subcommand("theory", "Step-size bounds and theoretical MSD curve");
  add_common(th, th_opt);

  auto* cx = app.add_subcommand("complexity", "Per-iteration operation counts");
  add_common(cx, cx_opt);

  auto* presets = app.add_subcommand("presets", "Compiled-in topology presets");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  if (*run) {
    if (!dump_path.empty()) {
      mdn_config* cfg = nullptr;
      if (int code = build_config(run_opt, {}, {}, &cfg); code != kOk) return code;
      mdn_result* r = nullptr;
      mdn_status s = mdn_signals(cfg, dump_samples, &r);
      mdn_config_free(cfg);
      if (s != MDN_OK) return report(s);
      s = mdn_result_write_csv(r, dump_path.c_str());
      mdn_result_free(r);
      if (s != MDN_OK) return report(s);
    }
    return execute(mdn_run, run_opt, {}, {});
  }
  if (*sweep) return execute(mdn_sweep, sweep_opt, {}, {});
  if (*cmp) {
    const std::vector<std::pair<std::string, std::string>> defaults = {{"iterations", "20000"},
                                                                       {"trials", "100"}};
    std::vector<std::pair<std::string, std::string>> flags;
    if (cmp->count("--figure")) flags.emplace_back("compare.figure", "\"" + figure + "\"");
    if (cmp->count("--input")) flags.emplace_back("compare.input", "\"" + input + "\"");
    return execute(mdn_compare, cmp_opt, defaults, flags);
  }
  if (*th) return execute(mdn_theory, th_opt, {}, {});
  if (*cx) {
    const std::vector<std::pair<std::string, std::string>> defaults = {
        {"topology", "\"n15\""}, {"M", "16"}, {"step.n_d", "4"}, {"step.P", "2"}};
    return execute(mdn_complexity, cx_opt, defaults, {});
  }
  if (*presets_list) {
    mdn_result* r = nullptr;
    const mdn_status s = mdn_presets_list(&r);
    if (s != MDN_OK) return report(s);
    std::fputs(mdn_result_csv(r), stdout);
    mdn_result_free(r);
    return kOk;
  }
  return kFailure;
}
