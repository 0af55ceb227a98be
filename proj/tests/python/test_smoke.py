#!/usr/bin/env python3
"""Smoke checks of the python module: every exposed operation is exercised
once against a frozen expectation, with exact values compared as strings."""

import math
import sys

import formlab as fl

FAILURES = []
TOTAL = [0]


def check(name, cond, detail=""):
    TOTAL[0] += 1
    if cond:
        print("ok   %s" % name)
    else:
        print("FAIL %s %s" % (name, detail))
        FAILURES.append(name)


# --- forms and scalars -----------------------------------------------------

f = fl.Form.parse("diag 1 1 -sqrt(2)")
check("parse.n", f.n == 3)
check("parse.exact", f.exact)
v = f.evaluate([1, 1, 1])
check("evaluate.exact_str", str(v) == "2-sqrt(2)", str(v))
check("evaluate.float", abs(float(v) - (2.0 - math.sqrt(2.0))) < 1e-15)
check("signature", f.signature() == (2, 1))
check("indefinite", f.indefinite)
check("det.exact_str", str(f.det) == "-sqrt(2)", str(f.det))

g = fl.diag(2, 4, -6)
r = fl.rationality(g)
check("rationality.multiple", r["verdict"] == "rational-multiple", r)
check("rationality.scale", str(r["scale"]) == "2", r.get("scale"))
nf = r["normal_form"]
check("rationality.normal",
      [str(nf.entry(i, i)) for i in range(3)] == ["1", "2", "-3"], repr(nf))

r = fl.rationality(f)
check("rationality.irrational", r["verdict"] == "irrational", r)
check("rationality.witness", "witness" in r, r)

s = fl.Scalar("1/2+3/4*sqrt(2)")
check("scalar.arith", str(s * 4 - "sqrt(2)") == "2+2*sqrt(2)", str(s * 4))
check("scalar.cmp", fl.Scalar("2/3") < 0.67)
try:
    fl.Form.parse("diag 1 junk")
    check("parse.error", False)
except fl.ParseError:
    check("parse.error", True)

# --- integral searches -----------------------------------------------------

hit = fl.find_small_value(f, "1e-2", seed=1)
check("small_value.found", hit is not None)
check("small_value.window", abs(hit["value"]) < fl.Scalar("1/100"))
check("small_value.nonzero", hit["value"].sign() != 0)
check("small_value.exact_reeval", f.evaluate(hit["x"]) == hit["value"])
check("small_value.exactness", hit["value"].exact)

band = fl.enumerate_band(f, 1, 2, 8)
check("band.count", band["count"] == 106, band)
check("band.complete", not band["partial"])

profile = fl.band_sign_profile(f, "1e-1", 200)
check("signs.plus", profile["plus"] >= 1, profile)
check("signs.minus", profile["minus"] >= 1, profile)

check("primitive.yes", fl.is_primitive_tuple([[1, 0, 0], [0, 1, 0]]))
check("primitive.no", not fl.is_primitive_tuple([[2, 0], [0, 2]]))
u = fl.complete_to_unimodular([[3, 5]])
check("unimodular.det", u[0][0] * u[1][1] - u[0][1] * u[1][0] == 1, u)
check("unimodular.column", (u[0][0], u[1][0]) == (3, 5), u)

targets = ["1/2", "-1/3"]
tup = fl.primitive_tuple_approx(f, targets, "1e-1")
check("tuple.found", tup is not None)
check("tuple.primitive", fl.is_primitive_tuple(tup))
for x, c in zip(tup, targets):
    check("tuple.window", abs(f.evaluate(x) - c) < fl.Scalar("1/10"))

pd = fl.pair_difference_search(fl.diag(1, "sqrt(2)"), "1e-1", max_evals=200_000_000)
check("pair.found", pd is not None)
check("pair.window", abs(pd["difference"]) < fl.Scalar("1/10"))
check("pair.nonzero", pd["difference"].sign() != 0)

check("padic.isotropic", fl.is_isotropic_padic(fl.diag(1, 1, -1), 3))
check("padic.aniso", not fl.is_isotropic_padic(fl.diag(1, 1, -7), 2))

sint = fl.s_integer_small_value(f, fl.diag(1, 1, -1), 3, 1, "1/2", "2/5")
check("sint.found", sint is not None)
check("sint.real", float(abs(sint["real_abs"])) < 0.5, sint)
check("sint.padic", abs(sint["padic_abs"]) < fl.Scalar("2/5"), sint)

# --- rational approximation ------------------------------------------------

th = fl.QuadraticIrrational(1, 1, 1, 2)  # 1 + sqrt(2)
cf = fl.cf_expand(th, 8)
check("cf.quotients", cf.quotients == [2] * 8, cf.quotients)
check("cf.period", cf.period == 1, cf.period)
pq = fl.convergents(cf)
check("cf.convergent", pq[2] == (12, 5), pq)

scan = fl.counterexample_min(th, 200)
check("cex.minimum", str(scan["minimum"]) == "1", scan)
check("cex.bound", float(scan["bound"]) > 0.8, scan)
check("cex.liouville", float(scan["liouville"]["minimum"]) <= 0.5, scan)

# --- lattice flows ---------------------------------------------------------

z2 = fl.Lattice.identity(2)
check("lattice.shortest", z2.shortest == 1.0)

skew = fl.Lattice([[1.0, 1e6], [0.0, 1.0]])
check("reduce.l1", abs(skew.shortest - 1.0) < 1e-9)
check("reduce.l2", abs(skew.second_minimum - 1.0) < 1e-9)
t = skew.reduction_transform
check("reduce.det", t[0][0] * t[1][1] - t[0][1] * t[1][0] == 1, t)

series = fl.flow_orbit(z2, "geodesic", 5.0, 0.1)
check("geodesic.names", series.names == ["l1", "soft_l1"], series.names)
dev = max(abs(val - math.exp(-tm))
          for tm, val in zip(series.times, series.values[0]))
check("geodesic.contraction", dev < 1e-9, dev)
check("geodesic.kind", not series.unipotent)

orbit = fl.flow_orbit(fl.Lattice([[1.0, 0.0], [0.3, 1.0]]), "horocycle", 200.0, 0.5)
haar = fl.haar_sample(2000, 5)
gap = fl.equidistribution_gap(orbit, haar, "l1")
check("gap.finite", 0.0 <= gap["gap"] < 0.5, gap)
check("gap.bootstrap", 0.0 < gap["bootstrap_err"] < 0.1, gap)

scan = fl.so_orbit_scan(f, 0.0, 0.25, seed=1)
check("scan.withheld", scan["verdict"] == "withheld", scan)
try:
    fl.so_orbit_scan(fl.diag(1, 1, 1), 10.0, 0.25)
    check("scan.definite", False)
except fl.ViolationError:
    check("scan.definite", True)

check("eta.chebyshev", fl.poly_divergence_eta(1, 0, 1) == (1 - math.cos(math.pi / 3)) / 2)

# --- symmetric pairs -------------------------------------------------------

rep = fl.symmetric_pair_report(fl.diag(1, 1, -1), trials=5, seed=1)
check("pair.dims", (rep["dim_g"], rep["dim_k"], rep["dim_p"]) == (8, 3, 5), rep)
check("pair.brackets", rep["brackets_span_k"])
check("pair.killing", rep["killing_orthogonal"])
check("pair.maximal", rep["maximality"]["holds"])

rep = fl.symmetric_pair_report(fl.diag(1, -1))
check("pair.sl2_refused", not rep["maximality"]["checked"], rep)
sl2 = fl.sl2_counterexample()
check("sl2.dims", (sl2["dim_k"], sl2["dim_intermediate"], sl2["dim_g"]) == (1, 2, 3), sl2)
check("sl2.invariant", sl2["intermediate_invariant"])

check("version", isinstance(fl.__version__, str) and fl.__version__, fl.__version__)

print("%d checks, %d failures" % (TOTAL[0], len(FAILURES)))
if FAILURES:
    sys.exit(1)
