#include "ans/ans.h"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <new>
#include <string>

#include "ans/autoencoder.hpp"
#include "ans/dataio.hpp"
#include "ans/error.hpp"
#include "ans/pca.hpp"
#include "ans/plot.hpp"
#include "ans/saliency.hpp"
#include "ans/trainer.hpp"

struct ans_dataset {
  ans::LabeledDataset value;
};
struct ans_normalizer {
  ans::NormalizationRecord value;
};
struct ans_model {
  ans::AutoencoderModel value;
};
struct ans_history {
  ans::TrainHistory value;
};
struct ans_report {
  ans::SaliencyReport value;
};
struct ans_pca {
  ans::PcaModel value;
};
struct ans_matrix {
  ans::Matrix value;
};

namespace {

thread_local std::string g_last_error;

ans_status to_status(ans::ErrorCode code) { return static_cast<ans_status>(code); }

template <typename Fn>
ans_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ANS_OK;
  } catch (const ans::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ANS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ANS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ANS_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) ans::fail(ans::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

ans::TrainConfig to_config(const ans_train_config& c) {
  ans::TrainConfig cfg;
  cfg.hidden_width = c.hidden_width;
  cfg.learning_rate = c.learning_rate;
  cfg.batch_size = c.batch_size;
  cfg.epochs = c.epochs;
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  cfg.validation_fraction = c.validation_fraction;
  cfg.shuffle = c.shuffle != 0;
  return cfg;
}

ans_node_saliency to_c(const ans::NodeSaliency& n) {
  return {n.node, n.sns, n.wce0, n.wce1, n.ned, n.ned0, n.ned1, n.good_classifier ? 1 : 0};
}

const std::vector<int>& labels_of(const ans::LabeledDataset& ds) {
  if (!ds.labels) ans::fail(ans::ErrorCode::kLabel, "dataset has no labels");
  return *ds.labels;
}

const ans::ActivationHistogram& histogram_of(const ans_report* report, std::size_t node) {
  require(report, "report");
  const auto& hs = report->value.histograms;
  if (node < 1 || node > hs.size())
    ans::fail(ans::ErrorCode::kInvalidArgument, "node " + std::to_string(node) + " out of range");
  return hs[node - 1];
}

}  // namespace

extern "C" {

const char* ans_version(void) { return "1.0.0"; }

const char* ans_last_error(void) { return g_last_error.c_str(); }

const char* ans_status_name(ans_status status) {
  switch (status) {
    case ANS_OK: return "ok";
    case ANS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ANS_ERR_DIMENSION: return "dimension mismatch";
    case ANS_ERR_PARSE: return "parse error";
    case ANS_ERR_LABEL: return "label error";
    case ANS_ERR_IO: return "i/o error";
    case ANS_ERR_VERSION: return "format version error";
    case ANS_ERR_TRUNCATED: return "truncated file";
    case ANS_ERR_CORRUPT: return "corrupt file";
    case ANS_ERR_DIVERGENCE: return "training diverged";
    case ANS_ERR_CONVERGENCE: return "no convergence";
    case ANS_ERR_EMPTY: return "empty input";
    case ANS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ans_status ans_dataset_load(const char* path, int has_labels, ans_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    bool labels = has_labels != ANS_LABELS_NO;
    if (has_labels == ANS_LABELS_AUTO) labels = ans::has_label_column(path);
    *out = new ans_dataset{ans::load_matrix(path, labels)};
  });
}

ans_status ans_dataset_save(const ans_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds, "dataset");
    require(path, "path");
    ans::save_matrix(ds->value, path);
  });
}

ans_status ans_dataset_synthetic(size_t n_per_class, size_t d, size_t n_informative,
                                 double separation, uint64_t seed, size_t n_groups,
                                 ans_dataset** out) {
  return guarded([&] {
    require(out, "out");
    ans::SyntheticSpec spec;
    spec.n_per_class = n_per_class;
    spec.d = d;
    spec.n_informative = n_informative;
    spec.separation = separation;
    spec.seed = seed;
    spec.n_groups = n_groups;
    *out = new ans_dataset{ans::generate_synthetic(spec)};
  });
}

ans_status ans_dataset_shape(const ans_dataset* ds, size_t* n, size_t* d) {
  return guarded([&] {
    require(ds, "dataset");
    if (n) *n = ds->value.num_samples();
    if (d) *d = ds->value.num_features();
  });
}

int ans_dataset_has_labels(const ans_dataset* ds) { return ds && ds->value.labels ? 1 : 0; }

int ans_dataset_has_groups(const ans_dataset* ds) { return ds && ds->value.group_tags ? 1 : 0; }

int ans_dataset_in_unit_range(const ans_dataset* ds) {
  if (!ds) return 0;
  auto v = ds->value.values.flat();
  return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; }) ? 1 : 0;
}

ans_status ans_dataset_copy_values(const ans_dataset* ds, double* buf, size_t len) {
  return guarded([&] {
    require(ds, "dataset");
    require(buf, "buffer");
    auto v = ds->value.values.flat();
    if (len < v.size()) ans::fail(ans::ErrorCode::kDimensionMismatch, "buffer too small");
    std::copy(v.begin(), v.end(), buf);
  });
}

ans_status ans_dataset_copy_labels(const ans_dataset* ds, int* buf, size_t len) {
  return guarded([&] {
    require(ds, "dataset");
    require(buf, "buffer");
    const auto& labels = labels_of(ds->value);
    if (len < labels.size()) ans::fail(ans::ErrorCode::kDimensionMismatch, "buffer too small");
    std::copy(labels.begin(), labels.end(), buf);
  });
}

ans_status ans_dataset_feature_id(const ans_dataset* ds, size_t j, const char** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    if (j >= ds->value.feature_ids.size())
      ans::fail(ans::ErrorCode::kInvalidArgument, "feature index out of range");
    *out = ds->value.feature_ids[j].c_str();
  });
}

ans_status ans_dataset_sample_id(const ans_dataset* ds, size_t i, const char** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    if (i >= ds->value.sample_ids.size())
      ans::fail(ans::ErrorCode::kInvalidArgument, "sample index out of range");
    *out = ds->value.sample_ids[i].c_str();
  });
}

ans_status ans_dataset_select_group(const ans_dataset* ds, const char* group, ans_dataset** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(group, "group");
    require(out, "out");
    const std::string wanted = group;
    *out = new ans_dataset{
        ans::select_subset(ds->value, [&](const std::string& tag) { return tag == wanted; })};
  });
}

ans_status ans_dataset_split(const ans_dataset* ds, double fraction, uint64_t seed,
                             ans_dataset** train, ans_dataset** validation) {
  return guarded([&] {
    require(ds, "dataset");
    require(train, "train");
    require(validation, "validation");
    auto [tr, va] = ans::split_train_validation(ds->value, fraction, seed);
    auto* a = new ans_dataset{std::move(tr)};
    *validation = new ans_dataset{std::move(va)};
    *train = a;
  });
}

ans_status ans_dataset_informative(const ans_dataset* ds, size_t* indices, size_t len,
                                   size_t* count) {
  return guarded([&] {
    require(ds, "dataset");
    auto inf = ans::informative_features(ds->value);
    if (count) *count = inf.size();
    if (indices) std::copy_n(inf.begin(), std::min(len, inf.size()), indices);
  });
}

void ans_dataset_free(ans_dataset* ds) { delete ds; }

ans_status ans_normalizer_fit(const ans_dataset* ds, ans_normalizer** record,
                              ans_dataset** normalized) {
  return guarded([&] {
    require(ds, "dataset");
    require(record, "record");
    auto [rec, norm] = ans::fit_normalizer(ds->value);
    ans_dataset* nd = normalized ? new ans_dataset{std::move(norm)} : nullptr;
    *record = new ans_normalizer{std::move(rec)};
    if (normalized) *normalized = nd;
  });
}

ans_status ans_normalizer_apply(const ans_normalizer* record, const ans_dataset* ds,
                                ans_dataset** out) {
  return guarded([&] {
    require(record, "record");
    require(ds, "dataset");
    require(out, "out");
    *out = new ans_dataset{ans::apply_normalizer(record->value, ds->value)};
  });
}

ans_status ans_normalizer_save(const ans_normalizer* record, const char* path) {
  return guarded([&] {
    require(record, "record");
    require(path, "path");
    ans::save_normalizer(record->value, path);
  });
}

ans_status ans_normalizer_load(const char* path, ans_normalizer** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ans_normalizer{ans::load_normalizer(path)};
  });
}

void ans_normalizer_free(ans_normalizer* record) { delete record; }

ans_status ans_model_init(size_t hidden, size_t input, uint64_t seed, ans_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ans_model{ans::init_weights(hidden, input, seed)};
  });
}

ans_status ans_model_load(const char* path, ans_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ans_model{ans::load_model(path)};
  });
}

ans_status ans_model_save(const ans_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    ans::save_model(model->value, path);
  });
}

ans_status ans_model_shape(const ans_model* model, size_t* hidden, size_t* input) {
  return guarded([&] {
    require(model, "model");
    if (hidden) *hidden = model->value.hidden_width();
    if (input) *input = model->value.input_width();
  });
}

ans_status ans_model_copy_weights(const ans_model* model, double* buf, size_t len) {
  return guarded([&] {
    require(model, "model");
    require(buf, "buffer");
    auto w = model->value.weights.flat();
    if (len < w.size()) ans::fail(ans::ErrorCode::kDimensionMismatch, "buffer too small");
    std::copy(w.begin(), w.end(), buf);
  });
}

ans_status ans_model_encode(const ans_model* model, const ans_dataset* ds,
                            ans_matrix** activations) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    require(activations, "out");
    *activations = new ans_matrix{ans::encode(model->value, ds->value.values)};
  });
}

ans_status ans_model_evaluate(const ans_model* model, const ans_dataset* ds, double* mse,
                              double* pearson) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    const auto& x = ds->value.values;
    const ans::Matrix recon = ans::decode(model->value, ans::encode(model->value, x));
    if (mse) *mse = ans::mse_loss(x, recon);
    if (pearson) *pearson = ans::pearson(x, recon);
  });
}

void ans_model_free(ans_model* model) { delete model; }

ans_status ans_matrix_shape(const ans_matrix* mat, size_t* rows, size_t* cols) {
  return guarded([&] {
    require(mat, "matrix");
    if (rows) *rows = mat->value.rows();
    if (cols) *cols = mat->value.cols();
  });
}

const double* ans_matrix_data(const ans_matrix* mat) {
  return mat ? mat->value.flat().data() : nullptr;
}

void ans_matrix_free(ans_matrix* mat) { delete mat; }

void ans_train_config_default(ans_train_config* config) {
  if (!config) return;
  const ans::TrainConfig d;
  *config = {d.hidden_width, d.learning_rate, d.batch_size, d.epochs,
             d.seed,         d.workers,       d.validation_fraction, d.shuffle ? 1 : 0};
}

ans_status ans_train(const ans_dataset* ds, const ans_train_config* config, ans_model** model,
                     ans_history** history) {
  return guarded([&] {
    require(ds, "dataset");
    require(config, "config");
    require(model, "model");
    auto result = ans::train(ds->value, to_config(*config));
    ans_history* h = history ? new ans_history{std::move(result.history)} : nullptr;
    *model = new ans_model{std::move(result.model)};
    if (history) *history = h;
  });
}

size_t ans_history_size(const ans_history* history) {
  return history ? history->value.epochs.size() : 0;
}

ans_status ans_history_epoch(const ans_history* history, size_t index, ans_epoch_record* out) {
  return guarded([&] {
    require(history, "history");
    require(out, "out");
    if (index >= history->value.epochs.size())
      ans::fail(ans::ErrorCode::kInvalidArgument, "epoch index out of range");
    const auto& e = history->value.epochs[index];
    *out = {e.epoch, e.train_mse, e.val_mse, e.val_pearson, e.seconds};
  });
}

ans_status ans_history_write_csv(const ans_history* history, const char* path) {
  return guarded([&] {
    require(history, "history");
    require(path, "path");
    ans::write_history_csv(history->value, path);
  });
}

void ans_history_free(ans_history* history) { delete history; }

ans_status ans_benchmark(const ans_dataset* ds, const ans_train_config* config,
                         const size_t* worker_counts, size_t count, ans_scaling_row* rows_out,
                         const char* csv_path) {
  return guarded([&] {
    require(ds, "dataset");
    require(config, "config");
    require(worker_counts, "worker counts");
    const std::vector<std::size_t> workers(worker_counts, worker_counts + count);
    auto rows = ans::benchmark_scaling(ds->value, to_config(*config), workers);
    if (csv_path) ans::write_benchmark_csv(rows, csv_path);
    if (rows_out) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        rows_out[i] = {rows[i].workers, rows[i].mean_epoch_seconds, rows[i].speedup};
    }
  });
}

ans_status ans_saliency_from_activations(const double* activations, const int* labels, size_t n,
                                         size_t bins, ans_node_saliency* out) {
  return guarded([&] {
    require(activations, "activations");
    require(labels, "labels");
    require(out, "out");
    auto hist = ans::build_histogram({activations, n}, {labels, n}, bins);
    *out = to_c(ans::sns(hist));
  });
}

ans_status ans_rank_nodes(const ans_model* model, const ans_dataset* ds, size_t bins,
                          ans_report** out) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    require(out, "out");
    const auto& labels = labels_of(ds->value);
    const ans::Matrix act = ans::encode(model->value, ds->value.values);
    *out = new ans_report{ans::rank_nodes(act, labels, bins)};
  });
}

size_t ans_report_size(const ans_report* report) {
  return report ? report->value.nodes.size() : 0;
}

ans_status ans_report_node(const ans_report* report, size_t node, ans_node_saliency* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (node < 1 || node > report->value.nodes.size())
      ans::fail(ans::ErrorCode::kInvalidArgument, "node out of range");
    *out = to_c(report->value.nodes[node - 1]);
  });
}

ans_status ans_report_ranked(const ans_report* report, size_t rank, ans_node_saliency* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (rank < 1 || rank > report->value.ranking.size())
      ans::fail(ans::ErrorCode::kInvalidArgument, "rank out of range");
    *out = to_c(report->value.at_rank(rank));
  });
}

ans_status ans_report_write_csv(const ans_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    ans::write_report_csv(report->value, path);
  });
}

ans_status ans_report_write_histogram_csv(const ans_report* report, size_t node,
                                          const char* path) {
  return guarded([&] {
    require(path, "path");
    ans::write_histogram_csv(histogram_of(report, node), path);
  });
}

ans_status ans_report_write_histogram_svg(const ans_report* report, size_t node,
                                          const char* path) {
  return guarded([&] {
    require(path, "path");
    const auto& hist = histogram_of(report, node);
    const auto& sal = report->value.nodes[node - 1];
    char title[96];
    std::snprintf(title, sizeof(title), "Node %zu  SNS = %.4f", node, sal.sns);
    ans::plot::write_file(path, ans::plot::histogram_svg(hist, title));
  });
}

void ans_report_free(ans_report* report) { delete report; }

ans_status ans_weight_profile_top(const ans_model* model, size_t node, size_t top_n,
                                  size_t* features_out) {
  return guarded([&] {
    require(model, "model");
    require(features_out, "out");
    auto profile = ans::node_weight_profile(model->value, node, top_n);
    std::copy(profile.top_features.begin(), profile.top_features.end(), features_out);
  });
}

ans_status ans_weight_profile_write(const ans_model* model, const ans_dataset* ds, size_t node,
                                    size_t top_n, const char* top_csv, const char* hist_csv,
                                    const char* svg_path) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    require(top_csv, "top csv path");
    require(hist_csv, "histogram csv path");
    auto profile = ans::node_weight_profile(model->value, node, top_n);
    ans::write_weight_profile(profile, ds->value.feature_ids, top_csv, hist_csv);
    if (svg_path) {
      ans::plot::write_file(svg_path, ans::plot::weight_histogram_svg(
                                          profile, "Node " + std::to_string(node) + " weights"));
    }
  });
}

ans_status ans_pca_fit(const ans_dataset* ds, size_t components, double tol, size_t max_iter,
                       ans_pca** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = new ans_pca{ans::fit_pca(ds->value.values, components, tol, max_iter)};
  });
}

size_t ans_pca_components(const ans_pca* pca) { return pca ? pca->value.num_components() : 0; }

ans_status ans_pca_eigenvalues(const ans_pca* pca, double* buf, size_t len) {
  return guarded([&] {
    require(pca, "pca");
    require(buf, "buffer");
    const auto& ev = pca->value.eigenvalues;
    if (len < ev.size()) ans::fail(ans::ErrorCode::kDimensionMismatch, "buffer too small");
    std::copy(ev.begin(), ev.end(), buf);
  });
}

ans_status ans_pca_project(const ans_pca* pca, const ans_dataset* ds, ans_matrix** scores) {
  return guarded([&] {
    require(pca, "pca");
    require(ds, "dataset");
    require(scores, "out");
    *scores = new ans_matrix{ans::project(pca->value, ds->value.values)};
  });
}

ans_status ans_pca_write_scores(const ans_pca* pca, const ans_dataset* ds, const char* csv_path,
                                const char* svg_path) {
  return guarded([&] {
    require(pca, "pca");
    require(ds, "dataset");
    require(csv_path, "csv path");
    const auto& data = ds->value;
    const ans::Matrix scores = ans::project(pca->value, data.values);
    ans::write_scores_csv(scores, data, csv_path);
    if (svg_path && scores.cols() >= 2) {
      std::vector<std::string> categories;
      for (std::size_t i = 0; i < data.num_samples(); ++i) {
        std::string c = data.group_tags ? (*data.group_tags)[i] : std::string("all");
        if (data.labels) c += (*data.labels)[i] == 1 ? " / 1" : " / 0";
        categories.push_back(std::move(c));
      }
      ans::plot::write_file(svg_path,
                            ans::plot::scatter_svg(scores, categories, "First two principal components"));
    }
  });
}

void ans_pca_free(ans_pca* pca) { delete pca; }

}  // extern "C"
