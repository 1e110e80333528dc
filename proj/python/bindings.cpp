// Copyright 2026 The repcheck Authors. All rights reserved.
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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "repcheck/cli.hpp"
#include "repcheck/controller.hpp"
#include "repcheck/evaluator.hpp"
#include "repcheck/sandbox.hpp"

namespace py = pybind11;
using namespace repcheck;

namespace {

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

py::dict report_dict(const DiscrepancyReport& r, int score) {
  py::dict out;
  py::list sections;
  for (const auto& s : r.sections) {
    py::dict d;
    d["title"] = s.title;
    d["lines"] = s.lines;
    sections.append(d);
  }
  out["sections"] = sections;
  out["markdown"] = r.render_markdown(score);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings to the repcheck core: canonical results, scoring and the command line.";

  // Messages start with the error code name, e.g. "SchemaViolation: $.kind: ...".
  py::register_exception<Error>(m, "RepcheckError", PyExc_RuntimeError);

  m.def(
      "normalize_result",
      [](const std::string& text) { return serialize(parse_result(text)); },
      py::arg("document"), "Parse and validate a canonical-result document; return its canonical form.");

  m.def(
      "result_kind", [](const std::string& text) { return std::string(kind_name(parse_result(text).kind())); },
      py::arg("document"));

  m.def(
      "score",
      [](const std::string& reference, const std::string& candidate) {
        auto b = score(parse_result(reference), parse_result(candidate));
        return json_loads(breakdown_to_json(b));
      },
      py::arg("reference"), py::arg("candidate"),
      "Deterministic alignment breakdown of candidate against reference (both JSON text).");

  m.def(
      "discrepancy_report",
      [](const std::string& reference, const std::string& candidate) {
        auto ref = parse_result(reference);
        auto cand = parse_result(candidate);
        auto b = score(ref, cand);
        return report_dict(compose_discrepancy(ref, cand, b), b.score);
      },
      py::arg("reference"), py::arg("candidate"));

  m.def(
      "parse_harness_error",
      [](const std::string& text) -> py::object {
        auto r = parse_harness_error(text);
        if (!r) return py::none();
        return json_loads(error_report_to_json(*r));
      },
      py::arg("document"), "Read a harness error document; None when it is not one.");

  m.def("normalize_label", [](const std::string& s) { return normalize_label(s); }, py::arg("label"));

  m.def(
      "render_run_report", [](const std::string& out_dir) { return render_run_report(out_dir); },
      py::arg("run_dir"));

  m.def(
      "main",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"repcheck"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line in-process; returns (exit_code, stdout, stderr).");

  m.attr("EXIT_SUCCESS") = kExitSuccess;
  m.attr("EXIT_EXHAUSTED") = kExitExhausted;
  m.attr("EXIT_ABORTED") = kExitAborted;
  m.attr("EXIT_USAGE") = kExitUsage;
}
