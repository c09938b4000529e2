#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "depq/dual_depq.hpp"
#include "depq/harness.hpp"
#include "depq/lincheck.hpp"
#include "depq/list_depq.hpp"
#include "depq/oracle.hpp"

namespace py = pybind11;
using namespace depq;

namespace {

ListId parse_list(const std::string& s) {
  if (s == "min") return ListId::Min;
  if (s == "max") return ListId::Max;
  throw std::invalid_argument("list must be 'min' or 'max'");
}

py::dict stats_dict(const DepqStats& s) {
  py::dict d;
  d["failed_reserve_min"] = s.failed_reserve_min;
  d["failed_reserve_max"] = s.failed_reserve_max;
  d["successful_min"] = s.successful_min;
  d["successful_max"] = s.successful_max;
  d["failed_insert_cas"] = s.failed_insert_cas;
  d["retired"] = s.retired;
  d["deallocated"] = s.deallocated;
  return d;
}

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

template <typename T>
void bind_depq_ops(py::class_<T>& c) {
  c.def("insert", &T::insert, py::arg("key"), py::call_guard<py::gil_scoped_release>())
      .def("extract_min", &T::extract_min, py::call_guard<py::gil_scoped_release>(),
           "Remove and return the smallest key, or None when empty.")
      .def("extract_max", &T::extract_max, py::call_guard<py::gil_scoped_release>(),
           "Remove and return the largest key, or None when empty.")
      .def("contents", &T::quiescent_contents,
           "Keys still present. Only meaningful when no other thread is operating.")
      .def("audit", &T::audit, "Empty string when every structural check passes.")
      .def("stats", [](const T& d) { return stats_dict(d.stats()); })
      .def_property_readonly("name", &T::name);
}

}  // namespace

PYBIND11_MODULE(_pydepq, m) {
  m.doc() = "Concurrent double-ended priority queues";

  py::class_<ListDepq> list(m, "ListDepq");
  list.def(py::init([](std::size_t batch_cap, const std::string& reclaim) {
             ListDepqOptions o;
             o.batch_cap = batch_cap;
             o.reclaim = harness::parse_reclaim(reclaim);
             return std::make_unique<ListDepq>(o);
           }),
           py::arg("batch_cap") = 64, py::arg("reclaim") = "deferred");
  bind_depq_ops(list);
  list.def(
      "dump",
      [](const ListDepq& d, const std::string& which) { return d.dump(parse_list(which)); },
      py::arg("list"), "List contents from head as (key, logically_deleted) pairs.");

  py::class_<MultiConsumerDepq> dual(m, "DualDepq");
  dual.def(py::init([](const std::string& kind, const std::string& mode, bool optional_delete,
                       std::size_t batch_cap) {
             std::unique_ptr<DualDepq> inner;
             if (kind == "heap") inner = make_dual_heap(optional_delete);
             else if (kind == "list") inner = make_dual_list();
             else throw std::invalid_argument("kind must be 'heap' or 'list'");
             return make_multi_consumer(std::move(inner), harness::parse_mode(mode), batch_cap);
           }),
           py::arg("kind") = "heap", py::arg("mode") = "combining",
           py::arg("optional_delete") = false, py::arg("batch_cap") = 64);
  bind_depq_ops(dual);

  py::class_<SeqDepq>(m, "SeqDepq")
      .def(py::init<>())
      .def("insert", &SeqDepq::insert, py::arg("key"))
      .def("extract_min", &SeqDepq::extract_min)
      .def("extract_max", &SeqDepq::extract_max)
      .def("keys", &SeqDepq::keys)
      .def("__len__", &SeqDepq::size);

  m.def(
      "check_history",
      [](const std::string& jsonl, std::uint64_t state_budget) {
        std::istringstream in(jsonl);
        const auto hs = lincheck::read_jsonl(in);
        if (hs.size() != 1) throw std::invalid_argument("expected exactly one history");
        lincheck::CheckOptions opts;
        opts.state_budget = state_budget;
        lincheck::CheckResult r;
        {
          py::gil_scoped_release release;
          r = lincheck::check(hs.front(), opts);
        }
        return py::make_tuple(lincheck::to_string(r.verdict), r.witness);
      },
      py::arg("jsonl"), py::arg("state_budget") = lincheck::CheckOptions{}.state_budget,
      "Check one JSON-lines history. Returns (verdict, witness order).");

  m.def(
      "replay",
      [](const std::string& name) {
        const auto r = harness::replay(name);
        py::dict d;
        d["name"] = r.name;
        d["passed"] = r.passed;
        d["verdict"] = r.verdict;
        d["lines"] = r.lines;
        return d;
      },
      py::arg("name"));

  m.def(
      "bench",
      [](const std::string& impl, const std::string& mode, int threads_insert, int threads_min,
         int threads_max, std::uint64_t ops, std::uint64_t prefill, std::uint64_t seed,
         bool sequential, const std::string& reclaim) {
        harness::WorkloadConfig c;
        c.impl = harness::parse_impl(impl);
        c.mode = harness::parse_mode(mode);
        c.threads_insert = threads_insert;
        c.threads_min = threads_min;
        c.threads_max = threads_max;
        c.ops_per_thread = ops;
        c.prefill = prefill;
        c.seed = seed;
        c.sequential = sequential;
        c.reclaim = harness::parse_reclaim(reclaim);
        std::string text;
        {
          py::gil_scoped_release release;
          text = harness::to_json(harness::run_bench(c));
        }
        return json_loads(text);
      },
      py::arg("impl") = "list-depq", py::arg("mode") = "combining", py::arg("threads_insert") = 1,
      py::arg("threads_min") = 1, py::arg("threads_max") = 1, py::arg("ops") = 1000,
      py::arg("prefill") = 0, py::arg("seed") = 1, py::arg("sequential") = false,
      py::arg("reclaim") = "deferred", "Run a workload and return the JSON report as a dict.");
}
