/* Propagates the default coherent state through the C ABI and prints its norm. */
#include <stdio.h>
#include <stdlib.h>

#include "zollcut.h"

static int fail(ZcStatus status) {
    const char *msg = zc_last_error_message();
    fprintf(stderr, "zollcut error %d: %s\n", (int)status, msg ? msg : "(none)");
    return 1;
}

int main(void) {
    ZcState *state = NULL;
    ZcState *moved = NULL;
    ZcPropagator *prop = NULL;
    ZcStatus st;

    if ((st = zc_coherent_state_new(100, -0.25, -0.6, 1.0, &state)) != ZC_STATUS_OK) return fail(st);
    if ((st = zc_propagator_new_cut_q(100, 1.0, &prop)) != ZC_STATUS_OK) return fail(st);
    if ((st = zc_propagator_apply(prop, state, 0.5, &moved)) != ZC_STATUS_OK) return fail(st);

    double before = 0.0, after = 0.0;
    zc_state_norm(state, &before);
    zc_state_norm(moved, &after);

    double grid[9];
    if ((st = zc_husimi_fill(moved, 3, 3, -1.0, 1.0, -1.0, 1.0, grid, 9)) != ZC_STATUS_OK) return fail(st);

    ZcSzegoResult sz;
    if ((st = zc_szego_check(ZC_FUNCTION_SQUARE, 100, 1.0, &sz)) != ZC_STATUS_OK) return fail(st);

    printf("version %s\n", zc_version());
    printf("norm %.12f %.12f\n", before, after);
    printf("szego %.5f %.5f %d\n", sz.lhs, sz.rhs, sz.pass ? 1 : 0);

    if (zc_state_norm(NULL, &after) != ZC_STATUS_NULL_POINTER) return 2;
    printf("null %s\n", zc_last_error_message());

    zc_state_free(moved);
    zc_state_free(state);
    zc_propagator_free(prop);
    return 0;
}
