#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dtapb/dataset_io.hpp"
#include "dtapb/grid_io.hpp"
#include "dtapb/harness.hpp"
#include "dtapb/kendall.hpp"
#include "dtapb/measures.hpp"
#include "dtapb/variant.hpp"

namespace py = pybind11;
using namespace dtapb;

namespace {

Sidedness parse_sided(const std::string& s) {
  if (s == "one") return Sidedness::OneSided;
  if (s == "two") return Sidedness::TwoSided;
  throw Error(ErrorCode::InvalidArgument, "sided must be 'one' or 'two'");
}

StudyTable table_from(py::handle row) {
  if (py::isinstance<py::dict>(row)) {
    const auto d = py::reinterpret_borrow<py::dict>(row);
    return {d["tp"].cast<std::int64_t>(), d["fn"].cast<std::int64_t>(), d["fp"].cast<std::int64_t>(),
            d["tn"].cast<std::int64_t>()};
  }
  const auto seq = py::cast<py::sequence>(row);
  if (seq.size() != 4) throw Error(ErrorCode::InvalidArgument, "a table is (tp, fn, fp, tn)");
  return {seq[0].cast<std::int64_t>(), seq[1].cast<std::int64_t>(), seq[2].cast<std::int64_t>(),
          seq[3].cast<std::int64_t>()};
}

MetaDataset dataset_from(const py::iterable& rows) {
  MetaDataset d;
  for (auto row : rows) {
    if (py::isinstance<StudyTable>(row)) d.studies.push_back(row.cast<StudyTable>());
    else d.studies.push_back(table_from(row));
  }
  return d;
}

TestVariant variant_of(const py::object& v, const std::string& sided) {
  if (py::isinstance<TestVariant>(v)) return v.cast<TestVariant>();
  return parse_variant(v.cast<std::string>(), parse_sided(sided));
}

std::vector<TestVariant> variants_of(const py::object& v, const std::string& sided) {
  if (py::isinstance<py::str>(v) || py::isinstance<TestVariant>(v)) return {variant_of(v, sided)};
  std::vector<TestVariant> out;
  for (auto item : py::cast<py::iterable>(v)) out.push_back(variant_of(py::reinterpret_borrow<py::object>(item), sided));
  return out;
}

py::dict table_dict(const StudyTable& t) {
  py::dict d;
  d["tp"] = t.x;
  d["fn"] = t.w;
  d["fp"] = t.y;
  d["tn"] = t.z;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Funnel-plot asymmetry tests for diagnostic accuracy meta-analysis";

  static py::exception<Error> error(m, "DtapbError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::handle(error.ptr())(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      inst.attr("statistical") = e.is_statistical();
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<StudyTable>(m, "StudyTable")
      .def(py::init([](std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn) {
             return StudyTable{tp, fn, fp, tn};
           }),
           py::arg("tp"), py::arg("fn"), py::arg("fp"), py::arg("tn"))
      .def_readwrite("tp", &StudyTable::x)
      .def_readwrite("fn", &StudyTable::w)
      .def_readwrite("fp", &StudyTable::y)
      .def_readwrite("tn", &StudyTable::z)
      .def_property_readonly("n_diseased", &StudyTable::n1)
      .def_property_readonly("n_healthy", &StudyTable::n2)
      .def_property_readonly("total", &StudyTable::total)
      .def(py::self == py::self)
      .def("__repr__", [](const StudyTable& t) {
        return "StudyTable(tp=" + std::to_string(t.x) + ", fn=" + std::to_string(t.w) +
               ", fp=" + std::to_string(t.y) + ", tn=" + std::to_string(t.z) + ")";
      });

  py::class_<EffectEstimate>(m, "EffectEstimate")
      .def(py::init([](double value, double se, double n, double ess, double m1, double m2) {
             EffectEstimate e;
             e.value = value;
             e.se = se;
             e.n = n;
             e.ess = ess > 0 ? ess : n;
             e.m1 = m1;
             e.m2 = m2;
             return e;
           }),
           py::arg("value"), py::arg("se"), py::arg("n"), py::arg("ess") = 0.0,
           py::arg("m1") = 0.0, py::arg("m2") = 0.0)
      .def_property_readonly("measure", [](const EffectEstimate& e) { return std::string(to_string(e.measure)); })
      .def_readwrite("value", &EffectEstimate::value)
      .def_readwrite("se", &EffectEstimate::se)
      .def_readwrite("n", &EffectEstimate::n)
      .def_readwrite("ess", &EffectEstimate::ess)
      .def_readwrite("m1", &EffectEstimate::m1)
      .def_readwrite("m2", &EffectEstimate::m2)
      .def("__repr__", [](const EffectEstimate& e) {
        return "EffectEstimate(value=" + std::to_string(e.value) + ", se=" + std::to_string(e.se) +
               ", n=" + std::to_string(e.n) + ")";
      });

  m.def(
      "estimate",
      [](std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn, const std::string& measure,
         const std::string& correction) {
        return estimate_study({tp, fn, fp, tn}, parse_measure(measure), parse_correction(correction));
      },
      py::arg("tp"), py::arg("fn"), py::arg("fp"), py::arg("tn"), py::arg("measure") = "lndor",
      py::arg("correction") = "half", "Effect estimate and standard error of one 2x2 table.");

  m.def("effective_sample_size", [](std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn) {
    return effective_sample_size({tp, fn, fp, tn});
  });

  m.def(
      "estimates",
      [](const py::iterable& tables, const std::string& measure, const std::string& correction) {
        const auto set = compute_usable(dataset_from(tables), parse_measure(measure), parse_correction(correction));
        py::list excluded;
        for (const auto& ex : set.excluded) {
          excluded.append(py::make_tuple(ex.index, std::string(to_string(ex.reason)), ex.message));
        }
        return py::make_tuple(set.estimates, set.source_index, excluded);
      },
      py::arg("tables"), py::arg("measure") = "lndor", py::arg("correction") = "half",
      "Usable estimates of a dataset: (estimates, source_index, excluded).");

  py::class_<TestVariant>(m, "TestVariant")
      .def(py::init([](const std::string& name, const std::string& sided) {
             return parse_variant(name, parse_sided(sided));
           }),
           py::arg("name"), py::arg("sided") = "one")
      .def_property_readonly("family", [](const TestVariant& v) { return std::string(to_string(v.family)); })
      .def_property_readonly("measure", [](const TestVariant& v) { return std::string(to_string(v.measure)); })
      .def_property_readonly("sided", [](const TestVariant& v) { return std::string(to_string(v.sidedness)); })
      .def_property_readonly("axis", &TestVariant::axis_name)
      .def_property_readonly("weighting", &TestVariant::weighting_name)
      .def_property_readonly("estimator", &TestVariant::estimator_name)
      .def_property_readonly("name", &TestVariant::short_name)
      .def(py::self == py::self)
      .def("__repr__", [](const TestVariant& v) { return "TestVariant('" + v.short_name() + "')"; });

  m.def("default_battery", &default_battery);

  py::class_<AsymmetryTestResult>(m, "TestResult")
      .def_readonly("test_id", &AsymmetryTestResult::test_id)
      .def_readonly("statistic", &AsymmetryTestResult::statistic)
      .def_readonly("p_value", &AsymmetryTestResult::p_value)
      .def_readonly("alpha", &AsymmetryTestResult::alpha)
      .def_readonly("reject", &AsymmetryTestResult::reject)
      .def_readonly("k0", &AsymmetryTestResult::k0)
      .def_readonly("pooled_effect", &AsymmetryTestResult::pooled_effect)
      .def_readonly("converged", &AsymmetryTestResult::converged)
      .def_readonly("warnings", &AsymmetryTestResult::warnings)
      .def_property_readonly("sided", [](const AsymmetryTestResult& r) { return std::string(to_string(r.sidedness)); })
      .def("__repr__", [](const AsymmetryTestResult& r) {
        return "TestResult(" + r.test_id + ", p=" + std::to_string(r.p_value) +
               (r.reject ? ", reject)" : ")");
      });

  m.def(
      "run_test",
      [](const py::object& variant, const std::vector<EffectEstimate>& estimates, double alpha,
         const std::string& sided) { return run_test(variant_of(variant, sided), estimates, alpha); },
      py::arg("variant"), py::arg("estimates"), py::arg("alpha") = kDefaultAlpha, py::arg("sided") = "one",
      "Runs one asymmetry test. `variant` is a TestVariant or a short name such as 'E(lnDOR,SE)'.");

  m.def(
      "analyze",
      [](const py::iterable& tables, const py::object& variant, double alpha, const std::string& sided,
         const std::string& correction) {
        const auto v = variant_of(variant, sided);
        const auto data = dataset_from(tables);
        validate_dataset(data);
        const auto set = compute_usable(data, v.measure, parse_correction(correction));
        return run_test(v, set.estimates, alpha);
      },
      py::arg("tables"), py::arg("variant") = "E(lnDOR,SE)", py::arg("alpha") = kDefaultAlpha,
      py::arg("sided") = "one", py::arg("correction") = "half",
      "Validates a list of (tp, fn, fp, tn) tables and runs one test on them.");

  py::class_<KendallResult>(m, "KendallResult")
      .def_readonly("tau", &KendallResult::tau)
      .def_readonly("s", &KendallResult::s)
      .def_readonly("var_s", &KendallResult::var_s)
      .def_readonly("p_upper", &KendallResult::p_upper)
      .def_readonly("p_lower", &KendallResult::p_lower)
      .def_readonly("exact", &KendallResult::exact)
      .def_property_readonly("p_two_sided", &KendallResult::p_two_sided);

  m.def(
      "kendall_tau",
      [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau(x, y); },
      py::arg("x"), py::arg("y"));

  py::class_<TrimFillState>(m, "TrimFillState")
      .def_readonly("pooled_effect", &TrimFillState::theta_hat)
      .def_readonly("centered", &TrimFillState::centered)
      .def_readonly("ranks", &TrimFillState::ranks)
      .def_readonly("rightmost_run", &TrimFillState::gamma_plus)
      .def_readonly("l", &TrimFillState::l)
      .def_readonly("k0", &TrimFillState::k0)
      .def_readonly("iterations", &TrimFillState::iterations)
      .def_readonly("converged", &TrimFillState::converged);

  m.def(
      "trim_fill",
      [](const std::vector<EffectEstimate>& estimates, const std::string& axis, const std::string& estimator) {
        TrimFillOptions o;
        if (axis == "se") o.axis = TrimFillAxis::SE;
        else if (axis == "n") o.axis = TrimFillAxis::N;
        else throw Error(ErrorCode::InvalidArgument, "axis must be 'se' or 'n'");
        if (estimator == "r") o.estimator = K0Estimator::R;
        else if (estimator == "l") o.estimator = K0Estimator::L;
        else throw Error(ErrorCode::InvalidArgument, "estimator must be 'r' or 'l'");
        return trim_fill_estimate(estimates, o);
      },
      py::arg("estimates"), py::arg("axis") = "se", py::arg("estimator") = "r");

  py::class_<SimCondition>(m, "SimCondition")
      .def_readonly("id", &SimCondition::id)
      .def_readwrite("k", &SimCondition::k)
      .def_readwrite("pi", &SimCondition::pi)
      .def_readwrite("n_min", &SimCondition::n_min)
      .def_readwrite("n_max", &SimCondition::n_max)
      .def_property_readonly("mu", [](const SimCondition& c) { return c.params.mu; })
      .def_property_readonly("sigma", [](const SimCondition& c) {
        return std::array<double, 3>{c.params.sigma_a2, c.params.sigma_ab, c.params.sigma_b2};
      })
      .def_property_readonly("bias", [](const SimCondition& c) { return c.bias.describe(); })
      .def("__repr__", [](const SimCondition& c) {
        return "SimCondition(id=" + std::to_string(c.id) + ", k=" + std::to_string(c.k) +
               ", bias=" + c.bias.describe() + ")";
      });

  m.def("default_grid", &default_grid, "The full 240-condition design.");
  m.def("grid_from_json", [](const std::string& text) { return parse_grid_json(text); }, py::arg("text"));

  m.def(
      "generate",
      [](const SimCondition& c, std::uint64_t seed, std::uint64_t replicate) {
        return generate_meta_analysis(c, {seed, c.id, replicate}).studies;
      },
      py::arg("condition"), py::arg("seed") = 0, py::arg("replicate") = 0,
      "One simulated meta-analysis as a list of StudyTable.");

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("condition", &SimResult::condition)
      .def_readonly("variant", &SimResult::variant)
      .def_readonly("reps", &SimResult::reps)
      .def_readonly("rejections", &SimResult::rejections)
      .def_readonly("degenerate_reps", &SimResult::degenerate_reps)
      .def_property_readonly("rate", &SimResult::rejection_rate);

  m.def(
      "run_condition",
      [](const SimCondition& c, const py::object& variants, std::int64_t reps, double alpha,
         std::uint64_t seed, int parallelism, const std::string& sided) {
        const auto vs = variants_of(variants, sided);
        RunOptions o;
        o.reps = reps;
        o.alpha = alpha;
        o.master_seed = seed;
        o.parallelism = parallelism;
        py::gil_scoped_release release;
        return run_condition(c, vs, o);
      },
      py::arg("condition"), py::arg("variants"), py::arg("reps") = 1000, py::arg("alpha") = kDefaultAlpha,
      py::arg("seed") = 0, py::arg("parallelism") = 1, py::arg("sided") = "one",
      "Monte Carlo rejection counts for one condition.");

  m.def(
      "wilson_interval",
      [](std::int64_t successes, std::int64_t trials) {
        const auto ci = wilson_interval(successes, trials);
        return py::make_tuple(ci.low, ci.high);
      },
      py::arg("successes"), py::arg("trials"));

  m.def(
      "read_dataset",
      [](const std::string& path) {
        const auto d = load_dataset_csv(path);
        py::list rows;
        for (std::size_t i = 0; i < d.size(); ++i) {
          auto row = table_dict(d.studies[i]);
          row["study_id"] = d.id_of(i);
          rows.append(row);
        }
        return rows;
      },
      py::arg("path"), "Reads a study_id,tp,fn,fp,tn CSV into a list of dicts.");
}
