/* Plain C consumer of the shared library: checks that the header compiles as
 * C and that status codes and handles behave. Exits non-zero on failure. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ans/ans.h"

static int failures = 0;

#define CHECK(cond)                                             \
  do {                                                          \
    if (!(cond)) {                                              \
      fprintf(stderr, "%s:%d: CHECK(%s) failed: %s\n", __FILE__, \
              __LINE__, #cond, ans_last_error());               \
      ++failures;                                               \
    }                                                           \
  } while (0)

int main(void) {
  ans_dataset* ds = NULL;
  ans_dataset* missing = NULL;
  ans_model* model = NULL;
  ans_history* history = NULL;
  ans_report* report = NULL;
  ans_train_config cfg;
  ans_node_saliency top;
  size_t n = 0, d = 0;

  CHECK(strlen(ans_version()) > 0);
  CHECK(ans_dataset_load("/nonexistent/file.tsv", ANS_LABELS_YES, &missing) == ANS_ERR_IO);
  CHECK(missing == NULL);
  CHECK(strlen(ans_last_error()) > 0);
  CHECK(ans_dataset_shape(NULL, &n, &d) == ANS_ERR_INVALID_ARGUMENT);
  CHECK(strcmp(ans_status_name(ANS_ERR_TRUNCATED), "truncated file") == 0);

  CHECK(ans_dataset_synthetic(30, 8, 2, 4.0, 3, 0, &ds) == ANS_OK);
  CHECK(ans_dataset_shape(ds, &n, &d) == ANS_OK);
  CHECK(n == 60 && d == 8);
  CHECK(ans_dataset_has_labels(ds) == 1);
  CHECK(ans_dataset_in_unit_range(ds) == 1);

  ans_train_config_default(&cfg);
  CHECK(cfg.hidden_width == 64);
  cfg.hidden_width = 4;
  cfg.epochs = 3;
  cfg.batch_size = 10;
  CHECK(ans_train(ds, &cfg, &model, &history) == ANS_OK);
  CHECK(ans_history_size(history) == 3);

  CHECK(ans_rank_nodes(model, ds, 10, &report) == ANS_OK);
  CHECK(ans_report_size(report) == 4);
  CHECK(ans_report_ranked(report, 1, &top) == ANS_OK);
  CHECK(top.node >= 1 && top.node <= 4);
  CHECK(ans_report_ranked(report, 5, &top) == ANS_ERR_INVALID_ARGUMENT);

  cfg.batch_size = 1000;
  {
    ans_model* m2 = NULL;
    ans_history* h2 = NULL;
    CHECK(ans_train(ds, &cfg, &m2, &h2) == ANS_ERR_INVALID_ARGUMENT);
    CHECK(m2 == NULL && h2 == NULL);
  }

  ans_report_free(report);
  ans_history_free(history);
  ans_model_free(model);
  ans_dataset_free(ds);
  ans_dataset_free(NULL);

  if (failures == 0) printf("C API checks passed\n");
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
