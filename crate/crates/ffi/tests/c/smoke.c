#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hamloop.h"

static int fail(const char *what) {
    fprintf(stderr, "%s: %s\n", what, hamloop_last_error());
    return 1;
}

int main(void) {
    double th = 0.7;
    double m[4] = {cos(th), -sin(th), sin(th), cos(th)};
    double re, im;
    if (hamloop_rho(m, 2, &re, &im) != HAMLOOP_STATUS_OK) return fail("rho");
    if (fabs(re - cos(th)) > 1e-12 || fabs(im - sin(th)) > 1e-12) return fail("rho value");

    HamloopRational a, b;
    if (hamloop_hirzebruch_closed_form(1, "3", "1", &a, &b) != HAMLOOP_STATUS_OK) return fail("closed form");
    if (a.num != 8 || a.den != 15 || b.num != -4 || b.den != 15) return fail("closed form value");

    if (hamloop_hirzebruch_closed_form(1, "1/2", "1", &a, &b) != HAMLOOP_STATUS_INVALID_ARGUMENT) return fail("bad trapezoid");
    if (strlen(hamloop_last_error()) == 0) return fail("missing message");

    HamloopScenario *s = NULL;
    HamloopReport *r = NULL;
    if (hamloop_scenario_sphere(0.3, &s) != HAMLOOP_STATUS_OK) return fail("sphere");
    if (hamloop_scenario_run(s, &r) != HAMLOOP_STATUS_OK) return fail("run");
    if (!hamloop_report_passed(r)) return fail("sphere checks");
    HamloopCheck c;
    if (hamloop_report_check(r, 0, &c) != HAMLOOP_STATUS_OK || strcmp(c.name, "J_U") != 0) return fail("check");
    printf("%s %zu checks\n", hamloop_version(), hamloop_report_check_count(r));
    hamloop_report_free(r);
    hamloop_scenario_free(s);
    return 0;
}
