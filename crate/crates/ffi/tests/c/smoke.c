/* Exercises the C surface through the generated header. Prints one line
 * per check and returns non-zero on the first failure. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qla.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "check failed at line %d: %s (%s)\n", __LINE__, \
              #cond, qla_last_error());                               \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  double w = 0.0;
  CHECK(qla_srs_threshold_w(1.0, &w) == QLA_STATUS_OK);
  CHECK(fabs(w - 15.37) < 0.01);
  CHECK(qla_sbs_threshold_w(0.01, 0.0, &w) == QLA_STATUS_OK);
  CHECK(fabs(w - 2.1) < 0.042);
  CHECK(qla_watts_to_dbm(0.0, &w) == QLA_STATUS_INVALID_ARGUMENT);
  CHECK(strlen(qla_last_error()) > 0);
  CHECK(fabs(qla_mpn_ratio(-1.0) - 1.259) < 0.001);

  double p = 0.0;
  CHECK(qla_risk_prob_exceeds(5, 4, 1, 50, 0.2, QLA_PRIOR_JEFFREYS, &p) == QLA_STATUS_OK);
  CHECK(fabs(p - 0.995) < 0.005);

  QlaAttenuator *att = NULL;
  CHECK(qla_attenuator_new(QLA_CLASS_FIXED, 30.0, 1, &att) == QLA_STATUS_INVALID_ARGUMENT);
  CHECK(att == NULL);
  CHECK(qla_attenuator_new(QLA_CLASS_MANUAL_VOA, 31.0, 1, &att) == QLA_STATUS_OK);
  QlaExposureKind kind;
  double delta = 1.0;
  CHECK(qla_attenuator_expose(att, 9.0, 600.0, &kind, &delta) == QLA_STATUS_OK);
  CHECK(kind == QLA_EXPOSURE_KIND_NO_CHANGE && delta == 0.0);
  double a = 0.0;
  CHECK(qla_attenuator_attenuation(att, 31.0, &a) == QLA_STATUS_OK && a == 31.0);
  char *json = NULL;
  CHECK(qla_attenuator_to_json(att, &json) == QLA_STATUS_OK);
  CHECK(strstr(json, "\"manual-voa\"") != NULL);
  qla_string_free(json);
  qla_attenuator_free(att);

  QlaCampaign *run = NULL;
  CHECK(qla_campaign_run(QLA_CLASS_MANUAL_VOA, NAN, 7, 0, NULL, &run) == QLA_STATUS_OK);
  QlaOutcome outcome;
  size_t steps = 0;
  CHECK(qla_campaign_outcome(run, &outcome) == QLA_STATUS_OK);
  CHECK(outcome == QLA_OUTCOME_INCONCLUSIVE);
  CHECK(qla_campaign_step_count(run, &steps) == QLA_STATUS_OK && steps == 30);
  qla_campaign_free(run);

  CHECK(qla_campaign_run(QLA_CLASS_FIXED, NAN, 7, 0, "{\"schema\": 9}", &run) == QLA_STATUS_CONFIG_ERROR);
  CHECK(qla_monte_carlo_json(QLA_CLASS_VDMC_VOA, NAN, 200, 1, NULL, &json) == QLA_STATUS_OK);
  CHECK(strstr(json, "\"critical_failure_rate\":0.0") != NULL);
  qla_string_free(json);

  printf("c smoke test ok\n");
  return 0;
}
