"""Frozen expected values, computed independently of the package and pinned here.

OBSTRUCTION was produced by expanding the degree bookkeeping symbolically in
sympy; it factors as k(P^2 k - P^2 + P k + P - 1) with P = p^n.
"""

# (p, n, e) -> (curve degree, genus, v_inf(dz1) = 2g - 2, beta)
TANGO = {
    (2, 1, 3): (6, 10, 18, "(1)/(1*y^3)"),
    (2, 2, 1): (4, 3, 4, "(1)/(1*y^1)"),
    (3, 1, 2): (6, 10, 18, "(1)/(1*y^2)"),
}

# Non-Tango fixture at p = 2: X^2Y^2 + Y^4 - X^3Y = Z^3X
FIXTURE_24 = {
    "f_chart": "1*x^3*y^1+1*x^2*y^2+1*x^1+1*y^4",
    "gamma": "(1)/(1*x^2*y^2+1*y^4)",
    "depth1_root": "(1)/(1*x^1*y^1+1*y^2)",
    "depth2_residual": "1*x^1",
    "D": {"inf": 1},
}

OBSTRUCTION = {
    (2, 1, 1): 3, (2, 1, 2): 18, (2, 1, 3): 45, (2, 1, 4): 84, (2, 1, 5): 135, (2, 1, 6): 198,
    (2, 1, 7): 273, (2, 1, 8): 360, (2, 2, 1): 7, (2, 2, 2): 54, (2, 2, 3): 141, (2, 2, 4): 268,
    (2, 2, 5): 435, (2, 2, 6): 642, (2, 2, 7): 889, (2, 2, 8): 1176, (3, 1, 1): 5, (3, 1, 2): 34,
    (3, 1, 3): 87, (3, 1, 4): 164, (3, 1, 5): 265, (3, 1, 6): 390, (3, 1, 7): 539, (3, 1, 8): 712,
    (3, 2, 1): 17, (3, 2, 2): 214, (3, 2, 3): 591, (3, 2, 4): 1148, (3, 2, 5): 1885, (3, 2, 6): 2802,
    (3, 2, 7): 3899, (3, 2, 8): 5176, (5, 1, 1): 9, (5, 1, 2): 78, (5, 1, 3): 207, (5, 1, 4): 396,
    (5, 1, 5): 645, (5, 1, 6): 954, (5, 1, 7): 1323, (5, 1, 8): 1752, (5, 2, 1): 49, (5, 2, 2): 1398,
    (5, 2, 3): 4047, (5, 2, 4): 7996, (5, 2, 5): 13245, (5, 2, 6): 19794, (5, 2, 7): 27643,
    (5, 2, 8): 36792,
}

# r -> (p, n, k, curve degree) chosen by the budget-64 search
FUJITA = {
    1: (2, 1, 1, 6), 2: (2, 1, 1, 6), 3: (3, 1, 1, 12), 4: (2, 2, 1, 20),
    5: (5, 1, 1, 30), 6: (7, 1, 1, 56), 7: (7, 1, 1, 56),
}
FUJITA_UNREACHABLE = (8, 9, 10)

# (m, p) -> R^1 phi_* H^{-p^m} as printed
NONVANISHING = {
    (1, 2): "O(1*inf) + O(-5*inf)",
    (1, 3): "Sym^1(E)(x)O(6*inf) + Sym^1(E)(x)O(-21*inf) + O(-12*inf)",
    (2, 2): "Sym^2(E)(x)O(13*inf) + Sym^2(E)(x)O(-55*inf) + Sym^1(E)(x)O(-38*inf) + O(-21*inf)",
}

# psi_* O(-4 S~) on (2, 1, 3, 3): (h, base) per summand
PUSH_NEG_4 = [(-2, {}), (-2, {"inf": 6}), (-3, {"inf": 12})]

# (p, n, e, l) -> K_X as (S~ coefficient, base divisor)
CANONICAL = {
    (2, 1, 3, 3): (0, {"inf": 15}),
    (2, 2, 5, 5): (10, {"inf": 153}),
}
