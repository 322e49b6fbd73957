// Copyright 2026 The qbm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* Exercises the public header from plain C. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qbm/qbm.h"

static int failures = 0;

#define EXPECT(cond)                                        \
  do {                                                      \
    if (!(cond)) {                                          \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                           \
    }                                                       \
  } while (0)

static const char* kConfig =
    "{\"schema_version\": 1,"
    " \"system\": {\"omega\": 1.0, \"levels\": 2},"
    " \"bath\": {\"kernel\": \"lorentzian\", \"Gamma\": 1.0, \"gamma\": 3.0},"
    " \"grid\": {\"t_end\": 0.2, \"dt\": 0.01},"
    " \"initial_state\": {\"type\": \"tmsv\", \"r\": 0.1},"
    " \"output\": {\"stride\": 5, \"plot_script\": false}}";

int main(int argc, char** argv) {
  const char* out = argc > 1 ? argv[1] : "capi-run";
  EXPECT(qbm_version() != NULL && strlen(qbm_version()) > 0);

  double re = 1.0, im = 1.0;
  EXPECT(qbm_analytic_F(1.0, 5.0, 0.0, 0.0, &re, &im) == QBM_OK);
  EXPECT(re == 0.0 && im == 0.0);
  EXPECT(qbm_analytic_F(1.0, 5.0, 0.0, 40.0, &re, &im) == QBM_OK);
  EXPECT(fabs(re - (5.0 - sqrt(5.0)) / 4.0) < 1e-12);
  EXPECT(qbm_analytic_F(1.0, 4.0, 0.0, 1.0, &re, &im) == QBM_ERR_DOMAIN);
  EXPECT(strlen(qbm_last_error()) > 0);
  EXPECT(qbm_analytic_F(1.0, 5.0, 0.0, 1.0, NULL, &im) == QBM_ERR_INVALID_ARGUMENT);

  qbm_markovianity kind;
  EXPECT(qbm_classify(1.0, 5.0, 0.0, &kind) == QBM_OK && kind == QBM_MARKOVIAN);
  EXPECT(qbm_classify(1.0, 3.0, 0.0, &kind) == QBM_OK && kind == QBM_NON_MARKOVIAN);

  qbm_coefficients* coef = NULL;
  EXPECT(qbm_coefficients_lorentzian(1.0, 5.0, 0.0, 1.0, 0.01, &coef) == QBM_OK);
  EXPECT(qbm_coefficients_size(coef) == 101);
  double t = 0.0;
  EXPECT(qbm_coefficients_get(coef, 100, &t, &re, &im) == QBM_OK);
  EXPECT(fabs(t - 1.0) < 1e-12);
  EXPECT(qbm_coefficients_get(coef, 101, &t, &re, &im) == QBM_ERR_INVALID_ARGUMENT);
  qbm_coefficients_free(coef);

  double sigma[16] = {0};
  for (int i = 0; i < 4; ++i) sigma[5 * i] = 0.5;
  double en = -1.0;
  EXPECT(qbm_log_negativity_cm(sigma, &en) == QBM_OK && en == 0.0);

  qbm_experiment* exp = NULL;
  EXPECT(qbm_experiment_load_string("{\"schema_version\": 1}", &exp) == QBM_ERR_CONFIG);
  EXPECT(exp == NULL);
  EXPECT(qbm_experiment_load_string(kConfig, &exp) == QBM_OK);
  EXPECT(qbm_experiment_set_seed(exp, 5) == QBM_OK);
  EXPECT(qbm_experiment_set_trajectories(exp, 8) == QBM_OK);
  EXPECT(qbm_experiment_set_workers(exp, 1) == QBM_OK);
  char small[4];
  EXPECT(qbm_experiment_config_json(exp, small, sizeof small) == QBM_ERR_INVALID_ARGUMENT);
  char json[4096];
  EXPECT(qbm_experiment_config_json(exp, json, sizeof json) == QBM_OK);
  EXPECT(strstr(json, "\"trajectories\": 8") != NULL || strstr(json, "\"trajectories\":8") != NULL);
  char dir[1024];
  EXPECT(qbm_experiment_run(exp, QBM_MODE_QSD, out, dir, sizeof dir) == QBM_OK);
  EXPECT(strcmp(dir, out) == 0);
  qbm_experiment_free(exp);
  qbm_experiment_free(NULL);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
