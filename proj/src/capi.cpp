#include "mmlbn/mmlbn.h"

#include <cstring>
#include <memory>
#include <string>

#include "mmlbn/dataset.hpp"
#include "mmlbn/error.hpp"
#include "mmlbn/eval.hpp"
#include "mmlbn/report.hpp"
#include "mmlbn/sampler.hpp"
#include "mmlbn/scoring.hpp"

struct mmlbn_dataset {
  std::shared_ptr<const mmlbn::DiscreteDataset> rep;
};

struct mmlbn_report {
  std::shared_ptr<const mmlbn::DiscreteDataset> data;
  mmlbn::SamplerConfig config;
  mmlbn::PosteriorReport rep;
};

namespace {

thread_local std::string last_error;

mmlbn_status to_status(mmlbn::ErrorCode code) {
  return static_cast<mmlbn_status>(static_cast<int>(code));
}

template <typename F>
mmlbn_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return MMLBN_OK;
  } catch (const mmlbn::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return MMLBN_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return MMLBN_ERR_INTERNAL;
  }
}

mmlbn_status null_argument() {
  last_error = "null argument";
  return MMLBN_ERR_NULL_POINTER;
}

void require(const void* p, const char* what) {
  if (!p) throw mmlbn::Error(mmlbn::ErrorCode::Argument, std::string("null ") + what);
}

mmlbn::ModelPolicy to_policy(mmlbn_policy p) {
  switch (p) {
    case MMLBN_POLICY_TBN: return mmlbn::ModelPolicy::TBN;
    case MMLBN_POLICY_FON: return mmlbn::ModelPolicy::FON;
    case MMLBN_POLICY_DUAL: return mmlbn::ModelPolicy::DUAL;
  }
  throw mmlbn::Error(mmlbn::ErrorCode::Argument, "unknown policy");
}

mmlbn::SamplerConfig to_config(const mmlbn_sampler_config& c) {
  mmlbn::SamplerConfig out;
  out.iterations = c.iterations;
  out.burn_in = c.burn_in;
  out.seed = c.seed;
  out.policy = to_policy(c.policy);
  out.arc_prior = c.arc_prior;
  out.sigma = c.sigma;
  out.max_parents = c.max_parents;
  out.top_k = c.top_k;
  return out;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const mmlbn::ClassRecord& class_at(const mmlbn_report* report, size_t index) {
  require(report, "report");
  if (index >= report->rep.classes.size())
    throw mmlbn::Error(mmlbn::ErrorCode::Argument, "class index out of range");
  return report->rep.classes[index];
}

}  // namespace

extern "C" {

const char* mmlbn_version(void) { return "1.0.0"; }

const char* mmlbn_status_name(mmlbn_status status) {
  switch (status) {
    case MMLBN_OK: return "ok";
    case MMLBN_ERR_NULL_POINTER: return "null-pointer";
    case MMLBN_ERR_INTERNAL: return "internal";
    default:
      if (status >= MMLBN_ERR_IO && status <= MMLBN_ERR_CONVERGENCE)
        return mmlbn::error_code_name(static_cast<mmlbn::ErrorCode>(status));
      return "unknown";
  }
}

const char* mmlbn_last_error(void) { return last_error.c_str(); }

void mmlbn_sampler_config_init(mmlbn_sampler_config* config) {
  if (!config) return;
  const mmlbn::SamplerConfig d;
  config->iterations = d.iterations;
  config->burn_in = d.burn_in;
  config->seed = d.seed;
  config->policy = MMLBN_POLICY_DUAL;
  config->arc_prior = d.arc_prior;
  config->sigma = d.sigma;
  config->max_parents = d.max_parents;
  config->top_k = d.top_k;
}

mmlbn_status mmlbn_dataset_load_csv(const char* path, mmlbn_missing missing, mmlbn_dataset** out) {
  if (!path || !out) return null_argument();
  return guarded([&] {
    auto policy = missing == MMLBN_MISSING_REJECT ? mmlbn::MissingPolicy::Reject
                                                  : mmlbn::MissingPolicy::ExtraCategory;
    auto ds = std::make_shared<const mmlbn::DiscreteDataset>(mmlbn::load_csv(path, policy));
    *out = new mmlbn_dataset{std::move(ds)};
  });
}

mmlbn_status mmlbn_dataset_from_rows(size_t vars, const int* arities, size_t rows,
                                     const int* values, mmlbn_dataset** out) {
  if (!arities || !out || (rows > 0 && !values)) return null_argument();
  return guarded([&] {
    std::vector<int> ar(arities, arities + vars);
    std::vector<std::vector<int>> data(rows);
    for (size_t r = 0; r < rows; ++r) data[r].assign(values + r * vars, values + (r + 1) * vars);
    auto ds = std::make_shared<const mmlbn::DiscreteDataset>(
        mmlbn::DiscreteDataset::from_rows(ar, data));
    *out = new mmlbn_dataset{std::move(ds)};
  });
}

void mmlbn_dataset_free(mmlbn_dataset* ds) { delete ds; }

size_t mmlbn_dataset_num_rows(const mmlbn_dataset* ds) { return ds ? ds->rep->num_rows() : 0; }

size_t mmlbn_dataset_num_vars(const mmlbn_dataset* ds) { return ds ? ds->rep->num_vars() : 0; }

int mmlbn_dataset_arity(const mmlbn_dataset* ds, size_t var) {
  if (!ds || var >= ds->rep->num_vars()) return 0;
  return ds->rep->arity(var);
}

const char* mmlbn_dataset_var_name(const mmlbn_dataset* ds, size_t var) {
  if (!ds || var >= ds->rep->num_vars()) return nullptr;
  return ds->rep->variable(var).name.c_str();
}

mmlbn_status mmlbn_dataset_split(const mmlbn_dataset* ds, double test_fraction, uint64_t seed,
                                 mmlbn_dataset** train, mmlbn_dataset** test) {
  if (!ds || !train || !test) return null_argument();
  return guarded([&] {
    auto [tr, te] = mmlbn::split_train_test(*ds->rep, test_fraction, seed);
    auto tr_handle = std::make_unique<mmlbn_dataset>(
        mmlbn_dataset{std::make_shared<const mmlbn::DiscreteDataset>(std::move(tr))});
    auto te_handle = std::make_unique<mmlbn_dataset>(
        mmlbn_dataset{std::make_shared<const mmlbn::DiscreteDataset>(std::move(te))});
    *train = tr_handle.release();
    *test = te_handle.release();
  });
}

mmlbn_status mmlbn_learn(const mmlbn_dataset* ds, const mmlbn_sampler_config* config,
                         mmlbn_report** out) {
  if (!ds || !config || !out) return null_argument();
  return guarded([&] {
    auto cfg = to_config(*config);
    auto rep = mmlbn::run_sampler(*ds->rep, cfg);
    *out = new mmlbn_report{ds->rep, cfg, std::move(rep)};
  });
}

void mmlbn_report_free(mmlbn_report* report) { delete report; }

size_t mmlbn_report_num_classes(const mmlbn_report* report) {
  return report ? report->rep.classes.size() : 0;
}

uint64_t mmlbn_report_total_samples(const mmlbn_report* report) {
  return report ? report->rep.total_samples : 0;
}

mmlbn_status mmlbn_report_class(const mmlbn_report* report, size_t index, uint64_t* visits,
                                double* best_length, size_t* arc_count) {
  if (!report) return null_argument();
  return guarded([&] {
    const auto& c = class_at(report, index);
    if (visits) *visits = c.visits;
    if (best_length) *best_length = c.best_length;
    if (arc_count) *arc_count = static_cast<size_t>(c.best_network.arc_count());
  });
}

mmlbn_status mmlbn_report_class_arcs(const mmlbn_report* report, size_t index, int* from, int* to,
                                     size_t capacity) {
  if (!report || (capacity > 0 && (!from || !to))) return null_argument();
  return guarded([&] {
    const auto arcs = class_at(report, index).best_network.arcs();
    for (size_t i = 0; i < arcs.size() && i < capacity; ++i) {
      from[i] = arcs[i].from;
      to[i] = arcs[i].to;
    }
  });
}

mmlbn_status mmlbn_report_to_json(const mmlbn_report* report, char** json_out) {
  if (!report || !json_out) return null_argument();
  return guarded([&] {
    *json_out = copy_string(mmlbn::report_to_json(report->rep, *report->data, report->config).dump(2));
  });
}

mmlbn_status mmlbn_evaluate_json(const mmlbn_dataset* data, const mmlbn_dataset* test, int repeats,
                                 double test_fraction, const mmlbn_sampler_config* config,
                                 char** json_out) {
  if (!data || !config || !json_out) return null_argument();
  return guarded([&] {
    auto cfg = to_config(*config);
    mmlbn::EvalSummary summary;
    if (test) {
      if (test->rep->num_vars() != data->rep->num_vars())
        throw mmlbn::Error(mmlbn::ErrorCode::Argument, "test set has a different variable count");
      summary = mmlbn::summarize({mmlbn::evaluate_split(*data->rep, *test->rep, cfg)});
    } else {
      summary = mmlbn::cross_validate(*data->rep, repeats, cfg, test_fraction);
    }
    auto j = mmlbn::summary_to_json(summary, *data->rep, cfg);
    j["fraction"] = test ? nlohmann::json(nullptr) : nlohmann::json(test_fraction);
    *json_out = copy_string(j.dump(2));
  });
}

mmlbn_status mmlbn_score_structure(const mmlbn_dataset* ds, const char* structure,
                                   mmlbn_policy policy, double arc_prior, double sigma,
                                   double* length_out) {
  if (!ds || !structure || !length_out) return null_argument();
  return guarded([&] {
    std::vector<std::string> names;
    for (const auto& v : ds->rep->variables()) names.push_back(v.name);
    const auto dag = mmlbn::parse_structure(static_cast<int>(ds->rep->num_vars()), structure, names);
    *length_out = mmlbn::network_message_length(dag, *ds->rep, to_policy(policy), arc_prior, sigma,
                                                std::make_shared<mmlbn::ScoreCache>());
  });
}

mmlbn_status mmlbn_score_json(const mmlbn_dataset* ds, const char* structure, double arc_prior,
                              double sigma, char** json_out) {
  if (!ds || !structure || !json_out) return null_argument();
  return guarded([&] {
    std::vector<std::string> names;
    for (const auto& v : ds->rep->variables()) names.push_back(v.name);
    const auto dag = mmlbn::parse_structure(static_cast<int>(ds->rep->num_vars()), structure, names);
    *json_out = copy_string(mmlbn::score_to_json(dag, *ds->rep, arc_prior, sigma).dump(2));
  });
}

void mmlbn_string_free(char* s) { std::free(s); }

}  // extern "C"
