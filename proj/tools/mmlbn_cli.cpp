// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mmlbn/mmlbn.h"

namespace {

struct Options {
  std::string data;
  std::string test;
  int repeats = 10;
  double fraction = 0.1;
  std::string model = "dual";
  std::uint64_t seed = 1;
  std::uint64_t iterations = 0;
  std::uint64_t burn_in = 0;
  double sigma = 3.0;
  double arc_prior = 0.5;
  int max_parents = 10;
  std::size_t top_k = 10;
  std::string out;
  std::string structure;
  bool reject_missing = false;
};

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(mmlbn_status status, const std::string& what) {
  if (status != MMLBN_OK)
    throw CliError(what + ": " + mmlbn_status_name(status) + ": " + mmlbn_last_error());
}

struct Dataset {
  mmlbn_dataset* handle = nullptr;
  Dataset() = default;
  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;
  ~Dataset() { mmlbn_dataset_free(handle); }
};

struct OwnedString {
  char* text = nullptr;
  OwnedString() = default;
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  ~OwnedString() { mmlbn_string_free(text); }
};

mmlbn_policy parse_model(const std::string& s) {
  if (s == "tbn") return MMLBN_POLICY_TBN;
  if (s == "fon") return MMLBN_POLICY_FON;
  if (s == "dual") return MMLBN_POLICY_DUAL;
  throw CliError("unknown model '" + s + "'");
}

void load(const std::string& path, const Options& opt, Dataset& ds) {
  check(mmlbn_dataset_load_csv(path.c_str(),
                               opt.reject_missing ? MMLBN_MISSING_REJECT
                                                  : MMLBN_MISSING_EXTRA_CATEGORY,
                               &ds.handle),
        "loading " + path);
}

mmlbn_sampler_config sampler_config(const Options& opt) {
  mmlbn_sampler_config cfg;
  mmlbn_sampler_config_init(&cfg);
  cfg.policy = parse_model(opt.model);
  cfg.seed = opt.seed;
  if (opt.iterations > 0) cfg.iterations = opt.iterations;
  if (opt.burn_in > 0 || opt.iterations > 0)
    cfg.burn_in = opt.burn_in > 0 ? opt.burn_in : cfg.iterations / 20;
  cfg.sigma = opt.sigma;
  cfg.arc_prior = opt.arc_prior;
  cfg.max_parents = opt.max_parents;
  cfg.top_k = opt.top_k;
  return cfg;
}

// Writes next to the target and renames, so a report file is either complete
// or absent.
void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text << '\n';
    if (!std::cout) throw CliError("writing to stdout failed");
    return;
  }
  const std::string tmp = out + ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CliError("cannot open '" + tmp + "' for writing");
    f << text << '\n';
    f.flush();
    if (!f) throw CliError("writing '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, out, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw CliError("cannot move report into place at '" + out + "'");
  }
}

std::string read_structure(const std::string& arg) {
  if (arg == "empty") return "empty";
  std::ifstream f(arg);
  if (f) {
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
  }
  if (arg.find("->") != std::string::npos) return arg;
  throw CliError("cannot read structure file '" + arg + "'");
}

int run_learn(const Options& opt) {
  Dataset ds;
  load(opt.data, opt, ds);
  const auto cfg = sampler_config(opt);
  mmlbn_report* report = nullptr;
  check(mmlbn_learn(ds.handle, &cfg, &report), "learn");
  OwnedString json;
  const auto status = mmlbn_report_to_json(report, &json.text);
  mmlbn_report_free(report);
  check(status, "serializing report");
  emit(json.text, opt.out);
  return 0;
}

int run_eval(const Options& opt) {
  Dataset ds;
  Dataset test;
  load(opt.data, opt, ds);
  if (!opt.test.empty()) load(opt.test, opt, test);
  const auto cfg = sampler_config(opt);
  OwnedString json;
  check(mmlbn_evaluate_json(ds.handle, test.handle, opt.repeats, opt.fraction, &cfg, &json.text),
        "eval");
  emit(json.text, opt.out);
  return 0;
}

int run_score(const Options& opt) {
  Dataset ds;
  load(opt.data, opt, ds);
  const std::string structure = read_structure(opt.structure);
  OwnedString json;
  check(mmlbn_score_json(ds.handle, structure.c_str(), opt.arc_prior, opt.sigma, &json.text),
        "score");
  emit(json.text, opt.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MML structure learning for discrete Bayesian networks"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&opt](CLI::App* sub) {
    sub->add_option("--data", opt.data, "CSV data file (header row, categorical cells)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--arc-prior", opt.arc_prior, "Prior probability of each arc")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--sigma", opt.sigma, "Prior standard deviation of logit parameters")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "Report path (default: stdout)");
    sub->add_flag("--reject-missing", opt.reject_missing, "Fail on '?' cells instead of treating them as a category");
  };
  auto sampling = [&opt](CLI::App* sub) {
    sub->add_option("--model", opt.model, "Local model policy")
        ->check(CLI::IsMember({"tbn", "fon", "dual"}));
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--iterations", opt.iterations, "Chain length including burn-in (default 200000)");
    sub->add_option("--burn-in", opt.burn_in, "Burn-in steps (default iterations/20)");
    sub->add_option("--max-parents", opt.max_parents, "Parent cap per node")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--top-k", opt.top_k, "Number of classes reported")->check(CLI::PositiveNumber);
  };

  auto* learn = app.add_subcommand("learn", "Sample network structures and report the best classes");
  common(learn);
  sampling(learn);

  auto* eval = app.add_subcommand("eval", "Cross-validate message length and test log loss");
  common(eval);
  sampling(eval);
  eval->add_option("--test", opt.test, "Held-out CSV; disables random splitting")
      ->check(CLI::ExistingFile);
  eval->add_option("--repeats", opt.repeats, "Number of random splits")->check(CLI::PositiveNumber);
  eval->add_option("--fraction", opt.fraction, "Held-out fraction per split")
      ->check(CLI::Range(0.0, 1.0));

  auto* score = app.add_subcommand("score", "Message length of a given structure under each policy");
  common(score);
  score->add_option("--structure", opt.structure,
                    "Structure file with one 'i->j' arc per line, or 'empty'")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (learn->parsed()) return run_learn(opt);
    if (eval->parsed()) return run_eval(opt);
    if (score->parsed()) return run_score(opt);
  } catch (const std::exception& e) {
    std::cerr << "mmlbn: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
