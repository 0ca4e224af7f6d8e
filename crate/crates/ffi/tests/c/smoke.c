#include <math.h>
#include <stdio.h>
#include <string.h>

#include "d2dcache.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "check failed line %d: %s\n", __LINE__, #cond); \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  double v = 0.0;
  CHECK(d2d_hyp2f1(4.0, -1.0, &v) == D2D_STATUS_OK);
  CHECK(fabs(v - atan(1.0)) < 1e-12);
  CHECK(d2d_hyp2f1(2.0, -1.0, &v) == D2D_STATUS_INVALID_ARGUMENT);
  CHECK(strcmp(d2d_status_message(D2D_STATUS_OK), "ok") == 0);

  D2dNetwork *net = NULL;
  CHECK(d2d_network_new(2, 2, 1.0, 4.0, &net) == D2D_STATUS_OK);
  CHECK(d2d_coverage(net, 2, 1.0, D2D_WEIGHT_MODE_EXACT, &v) == D2D_STATUS_OK);
  CHECK(fabs(v - (1.0 - atan(1.0))) < 1e-6);

  D2dCoverageTable *table = NULL;
  CHECK(d2d_coverage_table_new(net, 1.0, D2D_WEIGHT_MODE_PAPER, &table) == D2D_STATUS_OK);
  size_t len = 0;
  CHECK(d2d_coverage_table_len(table, &len) == D2D_STATUS_OK && len == 2);
  double probs[3];
  double max_hit = 0.0;
  CHECK(d2d_optimize_placement(table, 3, 0.8, 1, probs, &max_hit) == D2D_STATUS_OK);
  CHECK(probs[0] + probs[1] + probs[2] <= 1.0 + 1e-12);
  CHECK(max_hit > 0.0 && max_hit <= 1.0);

  d2d_coverage_table_free(table);
  d2d_network_free(net);
  printf("c smoke ok %s\n", d2d_version());
  return 0;
}
