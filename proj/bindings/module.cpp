#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formlab/diophantine.hpp"
#include "formlab/flows.hpp"
#include "formlab/form_io.hpp"
#include "formlab/forms.hpp"
#include "formlab/intmat.hpp"
#include "formlab/lie.hpp"
#include "formlab/padic.hpp"
#include "formlab/scalar.hpp"
#include "formlab/search.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace formlab;

namespace {

// Arbitrary-precision integers cross the boundary as decimal strings.
py::int_ to_py_int(const Integer& v) {
    const std::string s = v.str();
    PyObject* obj = PyLong_FromString(s.c_str(), nullptr, 10);
    if (obj == nullptr) throw py::error_already_set();
    return py::reinterpret_steal<py::int_>(obj);
}

Integer integer_from_py(py::handle h) {
    return Integer(py::str(h).cast<std::string>());
}

// Same convention as the CLI: a string without "sqrt" is an exact decimal
// or fraction; anything mentioning sqrt goes through the full entry grammar.
Scalar scalar_from_text(const std::string& text) {
    if (text.find("sqrt") != std::string::npos) return parse_scalar(text);
    return Scalar(rational_from_decimal(text));
}

// int -> exact rational, str -> exact (see above), float -> 53-bit float
// scalar (a Python float carries no more information than that).
Scalar to_scalar(py::handle h) {
    if (py::isinstance<Scalar>(h)) return h.cast<Scalar>();
    if (py::isinstance<py::bool_>(h)) throw py::type_error("expected a number, not a bool");
    if (py::isinstance<py::int_>(h)) return Scalar(Rational(integer_from_py(h)));
    if (py::isinstance<py::float_>(h)) return Scalar::floating(h.cast<double>(), 53);
    if (py::isinstance<py::str>(h)) return scalar_from_text(h.cast<std::string>());
    throw py::type_error("cannot interpret " +
                         py::str(py::type::of(h)).cast<std::string>() + " as a scalar");
}

Rational to_rational(py::handle h) {
    const Scalar s = to_scalar(h);
    if (!s.is_rational()) throw py::type_error("an exact rational is required here");
    return s.rational();
}

std::vector<Scalar> scalar_list(py::sequence seq) {
    std::vector<Scalar> out;
    out.reserve(py::len(seq));
    for (py::handle h : seq) out.push_back(to_scalar(h));
    return out;
}

py::list imat_rows(const IMatrix& m) {
    py::list rows;
    for (const auto& r : m) {
        py::list row;
        for (const auto& v : r) row.append(to_py_int(v));
        rows.append(row);
    }
    return rows;
}

RMatrix rmat_from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    RMatrix b(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw py::value_error("basis must be a square matrix given as rows");
        for (int j = 0; j < n; ++j) b.at(i, j) = rows[i][j];
    }
    return b;
}

py::list rmat_rows(const RMatrix& m) {
    py::list rows;
    for (int i = 0; i < m.n; ++i) {
        py::list row;
        for (int j = 0; j < m.n; ++j) row.append(m.at(i, j));
        rows.append(row);
    }
    return rows;
}

py::dict hit_dict(const SmallValueHit& h) {
    py::dict d;
    d["x"] = h.x;
    d["value"] = py::cast(h.value);
    d["radius"] = h.radius;
    d["evals"] = h.evals;
    return d;
}

py::dict liouville_dict(const LiouvilleEstimate& l) {
    py::dict d;
    d["minimum"] = py::cast(l.minimum);
    d["convergent"] = py::make_tuple(to_py_int(l.argmin.p), to_py_int(l.argmin.q));
    d["classical_limit"] = py::cast(l.classical_limit);
    return d;
}

QuadraticForm form_from_rows(py::sequence rows) {
    const int n = static_cast<int>(py::len(rows));
    SMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        py::sequence row = rows[i].cast<py::sequence>();
        if (static_cast<int>(py::len(row)) != n)
            throw py::value_error("form matrix must be square");
        for (int j = 0; j < n; ++j) m.at(i, j) = to_scalar(row[j]);
    }
    return QuadraticForm(std::move(m));
}

OneParamSubgroup named_flow(int n, const std::string& flow) {
    if (flow == "horocycle") {
        SMatrix y(n, n);
        y.at(0, 1) = Scalar(1);
        return unipotent_subgroup(y);
    }
    if (flow == "geodesic") {
        std::vector<double> d(static_cast<std::size_t>(n), 0.0);
        d.front() = -1.0;
        d.back() = 1.0;
        return diagonal_subgroup(d);
    }
    throw py::value_error("flow must be 'horocycle' or 'geodesic'");
}

Observable named_observable(const std::string& name) {
    if (name == "l1") return length_observable();
    if (name == "soft") return soft_length_observable();
    throw py::value_error("observable must be 'l1' or 'soft'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Values of indefinite quadratic forms at integral and S-integral "
        "points, flows on spaces of unimodular lattices, and exact "
        "symmetric-pair checks for sl_n.";
    m.attr("__version__") = FORMLAB_VERSION;

    auto base_exc = py::register_exception<Error>(m, "Error");
    py::register_exception<ViolationError>(m, "ViolationError", base_exc.ptr());
    py::register_exception<FormParseError>(m, "ParseError", base_exc.ptr());

    py::class_<Scalar>(m, "Scalar",
                       "One number from the exact/approximate tower: rational, "
                       "real quadratic a+b*sqrt(d), or arbitrary-precision float.")
        .def(py::init(&to_scalar), "value"_a)
        .def_property_readonly("exact", &Scalar::is_exact)
        .def("sign", &Scalar::sign)
        .def("__abs__", &Scalar::abs)
        .def("__neg__", [](const Scalar& s) { return -s; })
        .def("__add__", [](const Scalar& a, py::handle b) { return a + to_scalar(b); })
        .def("__radd__", [](const Scalar& a, py::handle b) { return to_scalar(b) + a; })
        .def("__sub__", [](const Scalar& a, py::handle b) { return a - to_scalar(b); })
        .def("__rsub__", [](const Scalar& a, py::handle b) { return to_scalar(b) - a; })
        .def("__mul__", [](const Scalar& a, py::handle b) { return a * to_scalar(b); })
        .def("__rmul__", [](const Scalar& a, py::handle b) { return to_scalar(b) * a; })
        .def("__truediv__", [](const Scalar& a, py::handle b) { return a / to_scalar(b); })
        .def("__eq__",
             [](const Scalar& a, py::handle b) {
                 try {
                     return a == to_scalar(b);
                 } catch (const py::type_error&) {
                     return false;
                 }
             })
        .def("__lt__", [](const Scalar& a, py::handle b) { return a.cmp(to_scalar(b)) < 0; })
        .def("__le__", [](const Scalar& a, py::handle b) { return a.cmp(to_scalar(b)) <= 0; })
        .def("__float__", &Scalar::to_double)
        .def("__str__", &Scalar::str)
        .def("__repr__", [](const Scalar& s) { return "Scalar('" + s.str() + "')"; });

    py::class_<QuadraticForm>(m, "Form",
                              "Non-degenerate symmetric form x^t F x over the scalar tower.")
        .def(py::init(&form_from_rows), "rows"_a)
        .def_static(
            "parse",
            [](const std::string& text) {
                return text.find(':') != std::string::npos ? parse_form_inline(text)
                                                           : parse_form_text(text);
            },
            "text"_a,
            "Accepts the file grammar ('diag 1 1 -sqrt(2)' or an 'n ...' matrix "
            "block) and the inline one ('diag:1,1,-sqrt(2)', 'mat:1,0;0,-1').")
        .def_static(
            "diagonal", [](py::sequence entries) { return QuadraticForm::diagonal(scalar_list(entries)); },
            "entries"_a)
        .def_property_readonly("n", &QuadraticForm::n)
        .def_property_readonly("exact", &QuadraticForm::is_exact)
        .def_property_readonly("det", &QuadraticForm::det)
        .def("entry", &QuadraticForm::at, "i"_a, "j"_a)
        .def("evaluate", [](const QuadraticForm& f, const IntVector& x) { return f.evaluate(x); },
             "x"_a)
        .def("signature",
             [](const QuadraticForm& f) {
                 const Signature s = signature(f);
                 return py::make_tuple(s.positive, s.negative);
             })
        .def_property_readonly("indefinite", [](const QuadraticForm& f) { return is_indefinite(f); })
        .def("transform",
             [](const QuadraticForm& f, const std::vector<IntVector>& cols) { return f.transform(cols); },
             "cols"_a)
        .def("text", [](const QuadraticForm& f) { return emit_form_text(f); })
        .def("__repr__", [](const QuadraticForm& f) { return "Form('" + emit_form_inline(f) + "')"; });

    m.def(
        "rationality",
        [](const QuadraticForm& f, py::handle denominator_bound) {
            const RationalityResult r =
                denominator_bound.is_none()
                    ? rationality_test(f)
                    : rationality_test(f, integer_from_py(denominator_bound));
            py::dict d;
            switch (r.verdict) {
                case RationalityResult::Verdict::RationalMultiple:
                    d["verdict"] = "rational-multiple";
                    break;
                case RationalityResult::Verdict::Irrational:
                    d["verdict"] = "irrational";
                    break;
                default:
                    d["verdict"] = "undecided";
            }
            if (r.c) d["scale"] = py::cast(*r.c);
            if (r.normal_form) d["normal_form"] = py::cast(*r.normal_form);
            if (r.witness[0] >= 0)
                d["witness"] = py::make_tuple(r.witness[0], r.witness[1], r.witness[2], r.witness[3]);
            d["detail"] = r.detail;
            return d;
        },
        "form"_a, "denominator_bound"_a = py::none());

    m.def(
        "find_small_value",
        [](const QuadraticForm& f, py::handle eps, long long max_radius, long long max_evals,
           std::uint64_t seed, bool strict) -> py::object {
            const Scalar e = to_scalar(eps);
            const SearchBudget b{max_radius, max_evals, seed};
            const auto hit = [&] {
                py::gil_scoped_release rel;
                return find_small_value(f, e, b, strict);
            }();
            if (!hit) return py::none();
            return hit_dict(*hit);
        },
        "form"_a, "eps"_a, py::kw_only(), "max_radius"_a = 1024, "max_evals"_a = 50'000'000,
        "seed"_a = 1, "strict"_a = true,
        "Smallest-box primitive witness of 0 < |F(x)| < eps (|F(x)| < eps when "
        "strict=False), or None if the budget ran out.");

    m.def(
        "approx_value",
        [](const QuadraticForm& f, py::handle c, py::handle eps, long long max_radius,
           long long max_evals, std::uint64_t seed) -> py::object {
            const Scalar cs = to_scalar(c);
            const Scalar es = to_scalar(eps);
            const SearchBudget b{max_radius, max_evals, seed};
            const auto hit = [&] {
                py::gil_scoped_release rel;
                return approx_value(f, cs, es, b);
            }();
            if (!hit) return py::none();
            return hit_dict(*hit);
        },
        "form"_a, "c"_a, "eps"_a, py::kw_only(), "max_radius"_a = 1024,
        "max_evals"_a = 50'000'000, "seed"_a = 1);

    m.def(
        "enumerate_band",
        [](const QuadraticForm& f, py::handle lo, py::handle hi, long long radius,
           bool primitive_only, bool euclidean, long long max_evals, std::uint64_t seed,
           std::size_t sample_cap) {
            const BandQuery q{to_scalar(lo), to_scalar(hi), radius, primitive_only, euclidean};
            const SearchBudget b{radius, max_evals, seed};
            const BandResult r = [&] {
                py::gil_scoped_release rel;
                return enumerate_band(f, q, b, sample_cap);
            }();
            py::dict d;
            d["count"] = r.count;
            d["samples"] = r.samples;
            d["partial"] = r.partial;
            d["evals"] = r.evals;
            return d;
        },
        "form"_a, "lo"_a, "hi"_a, "radius"_a, py::kw_only(), "primitive_only"_a = false,
        "euclidean"_a = false, "max_evals"_a = 50'000'000, "seed"_a = 1, "sample_cap"_a = 16,
        "Count |F(x)| in [lo, hi] over the sup-norm box of the given radius.");

    m.def(
        "sign_profile",
        [](py::sequence values, py::handle eps) {
            const auto vs = scalar_list(values);
            const auto [plus, minus] = sign_profile(vs, to_scalar(eps));
            return py::make_tuple(plus, minus);
        },
        "values"_a, "eps"_a, "Counts of values in (0, eps) and (-eps, 0).");

    m.def("is_primitive_tuple", &is_primitive_tuple, "tuple"_a);
    m.def(
        "complete_to_unimodular",
        [](const IntTuple& t) { return imat_rows(complete_to_unimodular(t)); }, "tuple"_a,
        "Rows of a unimodular matrix whose first columns are the given tuple.");

    m.def(
        "primitive_tuple_approx",
        [](const QuadraticForm& f, py::sequence targets, py::handle eps, long long max_radius,
           long long max_evals, std::uint64_t seed) -> py::object {
            const auto ts = scalar_list(targets);
            const Scalar es = to_scalar(eps);
            const SearchBudget b{max_radius, max_evals, seed};
            const auto hit = [&] {
                py::gil_scoped_release rel;
                return primitive_tuple_approx(f, ts, es, b);
            }();
            if (!hit) return py::none();
            return py::cast(*hit);
        },
        "form"_a, "targets"_a, "eps"_a, py::kw_only(), "max_radius"_a = 1024,
        "max_evals"_a = 50'000'000, "seed"_a = 1);

    m.def(
        "pair_difference_search",
        [](const QuadraticForm& e, py::handle eps, long long max_radius, long long max_evals,
           std::uint64_t seed) -> py::object {
            const Scalar es = to_scalar(eps);
            const SearchBudget b{max_radius, max_evals, seed};
            const auto hit = [&] {
                py::gil_scoped_release rel;
                return pair_difference_search(e, es, b);
            }();
            if (!hit) return py::none();
            py::dict d;
            d["x"] = hit->x;
            d["y"] = hit->y;
            d["difference"] = py::cast(hit->difference);
            d["radius"] = hit->radius;
            return d;
        },
        "form"_a, "eps"_a, py::kw_only(), "max_radius"_a = 1024, "max_evals"_a = 50'000'000,
        "seed"_a = 1, "0 < |E(x) - E(y)| < eps at integer points.");

    m.def("is_isotropic_padic", &is_isotropic_padic, "form"_a, "p"_a, "level_cap"_a = 0);

    m.def(
        "s_integer_small_value",
        [](const QuadraticForm& f_real, const QuadraticForm& f_padic, long p, int e,
           py::handle eps_real, py::handle eps_padic, long long max_radius, long long max_evals,
           std::uint64_t seed) -> py::object {
            const PadicModel model = padic_model(f_padic, p);
            const SIntegerContext ctx{p, e, to_scalar(eps_real), to_rational(eps_padic)};
            const SearchBudget b{max_radius, max_evals, seed};
            const auto hit = [&] {
                py::gil_scoped_release rel;
                return s_integer_small_value(f_real, model, ctx, b);
            }();
            if (!hit) return py::none();
            py::dict d;
            py::list x;
            for (const auto& r : hit->x) x.append(py::cast(Scalar(r)));
            d["x"] = x;
            d["numerator"] = hit->numerator;
            d["real_abs"] = py::cast(hit->real_abs);
            d["padic_abs"] = py::cast(Scalar(hit->padic_abs));
            d["radius"] = hit->radius;
            return d;
        },
        "form_real"_a, "form_padic"_a, "p"_a, "e"_a, "eps_real"_a, "eps_padic"_a, py::kw_only(),
        "max_radius"_a = 1024, "max_evals"_a = 50'000'000, "seed"_a = 1,
        "Witness x = v / p^e with 0 < |F_inf(x)| < eps_real and "
        "0 < |F_p(x)|_p < eps_padic.");

    py::class_<QuadraticIrrational>(m, "QuadraticIrrational",
                                    "theta = (a + b*sqrt(d)) / c, normalized, irrational.")
        .def(py::init([](py::handle a, py::handle b, py::handle c, long d) {
                 return make_quadratic_irrational(integer_from_py(a), integer_from_py(b),
                                                  integer_from_py(c), d);
             }),
             "a"_a, "b"_a, "c"_a, "d"_a)
        .def_static("from_scalar",
                    [](py::handle s) { return make_quadratic_irrational(to_scalar(s)); }, "value"_a)
        .def_property_readonly("value", &qi_value)
        .def("__repr__", [](const QuadraticIrrational& t) {
            return "QuadraticIrrational('" + qi_value(t).str() + "')";
        });

    py::class_<ContinuedFraction>(m, "ContinuedFraction")
        .def_property_readonly("quotients",
                               [](const ContinuedFraction& c) {
                                   py::list l;
                                   for (const auto& q : c.quotients) l.append(to_py_int(q));
                                   return l;
                               })
        .def_readonly("preperiod", &ContinuedFraction::preperiod)
        .def_readonly("period", &ContinuedFraction::period);

    m.def("cf_expand", &cf_expand, "theta"_a, "depth"_a);
    m.def(
        "convergents",
        [](const ContinuedFraction& cf) {
            py::list l;
            for (const auto& c : convergents(cf))
                l.append(py::make_tuple(to_py_int(c.p), to_py_int(c.q)));
            return l;
        },
        "cf"_a, "p_k / q_k in lowest terms, one per partial quotient.");

    m.def(
        "liouville_constant_estimate",
        [](const QuadraticIrrational& th, py::handle bound) {
            return liouville_dict(liouville_constant_estimate(th, integer_from_py(bound)));
        },
        "theta"_a, "bound"_a,
        "Exact minimum of q^2 |theta - p/q| over convergents with q <= bound, "
        "and the exact liminf over one period.");

    m.def(
        "counterexample_min",
        [](const QuadraticIrrational& th, long long box) {
            const CounterexampleScan s = [&] {
                py::gil_scoped_release rel;
                return counterexample_min(th, box);
            }();
            py::dict d;
            d["minimum"] = py::cast(s.minimum);
            d["argmin"] = py::make_tuple(s.x, s.y);
            d["bound"] = py::cast(s.bound);
            d["liouville"] = liouville_dict(s.liouville);
            return d;
        },
        "theta"_a, "box"_a,
        "Exact minimum of |y^2 - theta^2 x^2| over 0 < max(|x|,|y|) <= box.");

    py::class_<LatticePoint>(m, "Lattice",
                             "Unimodular lattice with the canonical reduced "
                             "representative of its basis coset (n = 2 or 3).")
        .def(py::init([](const std::vector<std::vector<double>>& rows) {
                 return make_lattice(rmat_from_rows(rows));
             }),
             "basis"_a, "Rows of the basis matrix; the columns generate the lattice.")
        .def_static("identity", [](int n) { return make_lattice(RMatrix::identity(n)); }, "n"_a)
        .def_property_readonly("n", [](const LatticePoint& x) { return x.n; })
        .def_property_readonly("basis", [](const LatticePoint& x) { return rmat_rows(x.basis); })
        .def_property_readonly("reduced_basis",
                               [](const LatticePoint& x) { return rmat_rows(x.reduced_basis); })
        .def_property_readonly("reduction_transform",
                               [](const LatticePoint& x) { return imat_rows(x.reduction_transform); })
        .def_property_readonly("shortest", &shortest_vector_length)
        .def_property_readonly("second_minimum", &second_minimum_length);

    py::class_<OrbitSeries>(m, "OrbitSeries",
                            "Sampled orbit with running trapezoidal time-averages; "
                            "values and running_avg are indexed [observable][step].")
        .def_readonly("times", &OrbitSeries::times)
        .def_readonly("names", &OrbitSeries::names)
        .def_readonly("values", &OrbitSeries::values)
        .def_readonly("running_avg", &OrbitSeries::running_avg)
        .def_readonly("unipotent", &OrbitSeries::unipotent);

    m.def(
        "flow_orbit",
        [](const LatticePoint& x0, const std::string& flow, double T, double dt) {
            const OneParamSubgroup g = named_flow(x0.n, flow);
            py::gil_scoped_release rel;
            return flow_orbit(x0, g, T, dt, {length_observable(), soft_length_observable()});
        },
        "lattice"_a, "flow"_a, "T"_a, "dt"_a,
        "Orbit under the standard horocycle (E_12 unipotent) or geodesic "
        "(diag(-1,..,1)) flow, observing l1 and exp(-1/l1).");

    m.def(
        "haar_sample",
        [](int count, std::uint64_t seed) {
            py::gil_scoped_release rel;
            return haar_sample_sl2(count, seed);
        },
        "count"_a, "seed"_a, "Haar-distributed unimodular planar lattices.");

    m.def(
        "equidistribution_gap",
        [](const OrbitSeries& series, const std::vector<LatticePoint>& haar,
           const std::string& observable) {
            const Observable f = named_observable(observable);
            const GapReport g = [&] {
                py::gil_scoped_release rel;
                return equidistribution_gap(series, haar, f);
            }();
            py::dict d;
            d["time_average"] = g.time_average;
            d["space_average"] = g.space_average;
            d["gap"] = g.gap;
            d["bootstrap_err"] = g.bootstrap_err;
            return d;
        },
        "series"_a, "haar"_a, "observable"_a = "l1");

    m.def(
        "so_orbit_scan",
        [](const QuadraticForm& f, double T, double dt, std::uint64_t seed, py::object basis) {
            const LatticePoint x0 =
                basis.is_none()
                    ? make_lattice(RMatrix::identity(3))
                    : make_lattice(rmat_from_rows(basis.cast<std::vector<std::vector<double>>>()));
            const OrbitScan s = [&] {
                py::gil_scoped_release rel;
                return so_orbit_scan(f, x0, T, dt, seed);
            }();
            py::dict d;
            d["verdict"] = s.verdict;
            d["start_l1"] = s.start_l1;
            d["min_l1"] = s.min_l1;
            d["occupied_bins"] = s.occupied_bins;
            d["reachable_bins"] = s.reachable_bins;
            d["occupancy"] = s.occupancy;
            return d;
        },
        "form"_a, "T"_a, "dt"_a, py::kw_only(), "seed"_a = 0, "basis"_a = py::none(),
        "Closed-vs-dense diagnostic for the orthogonal-group orbit of a "
        "ternary indefinite form.");

    m.def(
        "poly_divergence_eta",
        [](int n, int trials, std::uint64_t seed) {
            py::gil_scoped_release rel;
            return poly_divergence_eta(n, trials, seed);
        },
        "n"_a, "trials"_a, "seed"_a);

    m.def(
        "symmetric_pair_report",
        [](const QuadraticForm& f, int trials, std::uint64_t seed) {
            // construction itself verifies the involution, the eigenspace
            // split, the bracket relations, and k = so(F); it throws on
            // any failure
            const SymmetricPair pair = build_pair(f);
            const bool span_k = verify_step_b(pair);
            const bool killing_ok = verify_orthogonality(pair);
            py::dict d;
            d["n"] = f.n();
            d["dim_g"] = static_cast<long long>(pair.algebra.basis.size());
            d["dim_k"] = static_cast<long long>(pair.k_basis.size());
            d["dim_p"] = static_cast<long long>(pair.p_basis.size());
            d["involution_automorphism"] = true;
            d["eigenspace_relations"] = true;
            d["k_equals_so"] = true;
            d["brackets_span_k"] = span_k;
            d["killing_orthogonal"] = killing_ok;
            if (f.n() >= 3) {
                const bool maximal = [&] {
                    py::gil_scoped_release rel;
                    return maximality_check(pair, trials, seed);
                }();
                py::dict mx;
                mx["checked"] = true;
                mx["trials"] = trials;
                mx["holds"] = maximal;
                d["maximality"] = mx;
            } else {
                py::dict mx;
                mx["checked"] = false;
                mx["reason"] = "fixed subalgebra is not semisimple";
                d["maximality"] = mx;
            }
            return d;
        },
        "form"_a, py::kw_only(), "trials"_a = 20, "seed"_a = 1,
        "Builds g = k + p for the involution attached to the form and "
        "re-verifies every step exactly; randomized maximality evidence "
        "for n >= 3.");

    m.def("sl2_counterexample", []() {
        const Sl2Report r = counterexample_sl2();
        py::dict d;
        d["dim_k"] = r.dim_k;
        d["dim_intermediate"] = r.dim_intermediate;
        d["dim_g"] = r.dim_g;
        d["intermediate_invariant"] = r.intermediate_invariant;
        d["upper_lower_weights"] = r.upper_lower_weights;
        d["nil_lines_abelian"] = r.nil_lines_abelian;
        d["killing_null_on_n"] = r.killing_null_on_n;
        d["k_from_bracket"] = r.k_from_bracket;
        return d;
    });
}
