#include <math.h>
#include <stdio.h>
#include <string.h>

#include "negcurv.h"

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__,       \
                    __LINE__, #cond);                                    \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    NegcurvProblem *problem = NULL;
    NegcurvConfig *config = NULL;
    NegcurvRun *run = NULL;

    CHECK(negcurv_problem_lookup("no-such-problem", &problem) == NEGCURV_CODE_UNKNOWN_PROBLEM);
    CHECK(problem == NULL);
    CHECK(strstr(negcurv_last_error(), "no-such-problem") != NULL);

    CHECK(negcurv_problem_lookup("rosenbr:2", &problem) == NEGCURV_CODE_OK);
    CHECK(negcurv_problem_dim(problem) == 2);
    double start[2] = {-1.2, 1.0};
    CHECK(negcurv_problem_set_start(problem, start, 2) == NEGCURV_CODE_OK);
    CHECK(negcurv_problem_set_start(problem, start, 1) == NEGCURV_CODE_DIMENSION_MISMATCH);

    CHECK(negcurv_config_new("soan2c", &config) == NEGCURV_CODE_OK);
    CHECK(negcurv_config_set(config, "eps1", 1e-6) == NEGCURV_CODE_OK);
    CHECK(negcurv_config_set(config, "eta1", 2.0) == NEGCURV_CODE_INVALID_CONFIG);
    CHECK(negcurv_config_set(config, "bogus", 1.0) == NEGCURV_CODE_INVALID_ARGUMENT);

    CHECK(negcurv_solve(problem, config, &run) == NEGCURV_CODE_OK);
    NegcurvStatus status = negcurv_run_status(run);
    CHECK(status == NEGCURV_STATUS_FIRST_ORDER || status == NEGCURV_STATUS_SECOND_ORDER);
    CHECK(negcurv_run_grad_norm(run) <= 1e-6);
    double x[2];
    CHECK(negcurv_run_x_final(run, x, 2) == NEGCURV_CODE_OK);
    CHECK(fabs(x[0] - 1.0) < 1e-4 && fabs(x[1] - 1.0) < 1e-4);

    char *json = negcurv_run_to_json(run);
    CHECK(json != NULL && strstr(json, "\"algo\"") != NULL);
    negcurv_string_free(json);

    printf("ok %zu iterations, f = %g\n", negcurv_run_iterations(run), negcurv_run_f_final(run));
    negcurv_run_free(run);
    negcurv_config_free(config);
    negcurv_problem_free(problem);
    return 0;
}
