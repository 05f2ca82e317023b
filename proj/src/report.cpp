#include <algorithm>
#include <cmath>

#include "hwlab/experiments.hpp"

namespace hwlab {
namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(CheckRole r) {
  switch (r) {
    case CheckRole::gate: return "gate";
    case CheckRole::validity: return "validity";
    case CheckRole::info: return "info";
  }
  return "?";
}

Check make_check(std::string name, double value, double lower, double upper, CheckRole role) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.lower = lower;
  c.upper = upper;
  c.role = role;
  c.passed = std::isfinite(value) && value >= lower && value <= upper;
  double m = std::numeric_limits<double>::infinity();
  if (std::isfinite(lower)) m = std::min(m, value - lower);
  if (std::isfinite(upper)) m = std::min(m, upper - value);
  c.margin = std::isfinite(value) ? m : -std::numeric_limits<double>::infinity();
  return c;
}

void Series::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw Error("series row width does not match the columns");
  rows.push_back(std::move(row));
}

Check& ExperimentReport::add_check(std::string name, double value, double lower, double upper,
                                   CheckRole role) {
  checks.push_back(make_check(std::move(name), value, lower, upper, role));
  return checks.back();
}

const Check* ExperimentReport::find_check(const std::string& n) const {
  for (const auto& c : checks) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

void ExperimentReport::finalize() {
  margin = std::numeric_limits<double>::infinity();
  bool any_gate = false;
  bool failed = false;
  std::string invalid;
  for (const auto& c : checks) {
    if (c.role == CheckRole::gate) {
      any_gate = true;
      const bool counted =
          headline.empty() || std::find(headline.begin(), headline.end(), c.name) != headline.end();
      if (counted || !c.passed) margin = std::min(margin, c.margin);
      if (!c.passed) failed = true;
    } else if (c.role == CheckRole::validity && !c.passed && invalid.empty()) {
      invalid = "validity check '" + c.name + "' failed";
    }
  }
  if (!std::isfinite(margin)) margin = any_gate && failed ? -1.0 : 0.0;
  if (inconclusive_reason.empty() && !invalid.empty()) inconclusive_reason = invalid;
  if (!inconclusive_reason.empty()) {
    verdict = Verdict::inconclusive;
  } else if (!any_gate) {
    verdict = Verdict::inconclusive;
    inconclusive_reason = "no gate checks were evaluated";
  } else {
    verdict = failed ? Verdict::fail : Verdict::pass;
  }
}

nlohmann::ordered_json to_json(const ExperimentReport& r) {
  using J = nlohmann::ordered_json;
  J out;
  out["name"] = r.name;
  out["inputs"] = r.inputs;
  J series;
  series["columns"] = r.series.columns;
  J rows = J::array();
  for (const auto& row : r.series.rows) {
    J jr = J::array();
    for (double v : row) jr.push_back(number(v));
    rows.push_back(std::move(jr));
  }
  series["rows"] = std::move(rows);
  out["series"] = std::move(series);
  J fits = J::object();
  for (const auto& f : r.fits) {
    J jf;
    jf["abscissa"] = f.abscissa;
    jf["ordinate"] = f.ordinate;
    jf["slope"] = number(f.fit.slope);
    jf["slope_stderr"] = number(f.fit.slope_stderr);
    jf["intercept"] = number(f.fit.intercept);
    jf["r_squared"] = number(f.fit.r_squared);
    jf["points"] = f.fit.points;
    jf["expected"] = number(f.expected);
    jf["accepted_range"] = J::array({number(f.lower), number(f.upper)});
    fits[f.name] = std::move(jf);
  }
  out["fit"] = std::move(fits);
  J checks = J::array();
  for (const auto& c : r.checks) {
    J jc;
    jc["name"] = c.name;
    jc["value"] = number(c.value);
    jc["lower"] = number(c.lower);
    jc["upper"] = number(c.upper);
    jc["role"] = to_string(c.role);
    jc["passed"] = c.passed;
    jc["margin"] = number(c.margin);
    checks.push_back(std::move(jc));
  }
  out["checks"] = std::move(checks);
  J verdict;
  verdict["status"] = to_string(r.verdict);
  verdict["margin"] = number(r.margin);
  if (!r.inconclusive_reason.empty()) verdict["reason"] = r.inconclusive_reason;
  out["verdict"] = std::move(verdict);
  out["notes"] = r.notes;
  return out;
}

}  // namespace hwlab
