#include "detour/cli/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "detour/cli/suites.hpp"

namespace detour::cli {

namespace {

using json = nlohmann::ordered_json;

// Default rescaling for the conformal suites; uses x0..x2 only.
constexpr const char* kDefaultRescale = "0.1*x0 + 0.05*x1*x2 - 0.03*x0^2";

struct Task {
  std::size_t run;
  const Suite* suite;
  int point;
  std::vector<CheckReport> out;
};

CheckReport failure(const std::string& what) {
  CheckReport r;
  r.add("error", std::nan(""), 0.0);
  r.notes.push_back(what);
  return r;
}

void apply_tolerances(CheckReport& r, const Tolerances& t, double scale) {
  for (CheckItem& it : r.items) {
    if (it.verdict) continue;
    double tol = it.tolerance;
    if (auto o = t.overrides.find(r.suite + "/" + it.name); o != t.overrides.end()) {
      tol = o->second;
    } else if (auto s = t.overrides.find(r.suite); s != t.overrides.end()) {
      tol = s->second;
    }
    it.tolerance = tol * scale;
    it.pass = std::isfinite(it.residual) && it.residual < it.tolerance;
  }
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

}  // namespace

const char* status_name(SuiteStatus s) {
  switch (s) {
    case SuiteStatus::Pass: return "pass";
    case SuiteStatus::Fail: return "FAIL";
    case SuiteStatus::ExpectedFail: return "xfail";
    case SuiteStatus::UnexpectedPass: return "XPASS";
  }
  return "?";
}

bool RunReport::ok() const {
  return std::all_of(summaries.begin(), summaries.end(), [](const SuiteSummary& s) {
    return s.status == SuiteStatus::Pass || s.status == SuiteStatus::ExpectedFail;
  });
}

RunReport run_manifest(const Manifest& m, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.source = m.source;
  rep.has_seed_override = opt.seed.has_value();
  rep.seed_override = opt.seed.value_or(0);
  rep.tolerance_scale = m.tolerances.scale * opt.tolerance_scale;

  std::vector<RunContext> ctx(m.runs.size());
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < m.runs.size(); ++r) {
    const RunSpec& run = m.runs[r];
    SamplePlan plan = run.sample;
    if (opt.seed) plan.seed = *opt.seed;
    ctx[r].run = &run;
    ctx[r].seed = plan.seed;
    ctx[r].points = plan.points();
    ctx[r].omega = parse(run.rescale.empty() ? kDefaultRescale : run.rescale, run.metric.n);
    for (const std::string& name : run.suites) {
      const Suite* s = find_suite(name);
      if (s->per_point) {
        for (int i = 0; i < static_cast<int>(ctx[r].points.size()); ++i) tasks.push_back({r, s, i, {}});
      } else {
        tasks.push_back({r, s, -1, {}});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
      Task& t = tasks[k];
      try {
        t.out = t.suite->run(ctx[t.run], t.point);
      } catch (const std::exception& e) {
        t.out = {failure(e.what())};
      }
      for (CheckReport& c : t.out) {
        c.suite = t.suite->name;
        c.fixture = m.runs[t.run].label;
        if (t.point >= 0) c.point_index = t.point;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Canonical order: suite, fixture, run, point; ties keep emission order.
  struct Row {
    std::size_t run;
    CheckReport rep;
  };
  std::vector<Row> rows;
  for (Task& t : tasks)
    for (CheckReport& c : t.out) rows.push_back({t.run, std::move(c)});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.rep.suite, a.rep.fixture, a.run, a.rep.point_index) <
           std::tie(b.rep.suite, b.rep.fixture, b.run, b.rep.point_index);
  });
  for (Row& row : rows) {
    apply_tolerances(row.rep, m.tolerances, rep.tolerance_scale);
    rep.report_runs.push_back(m.runs[row.run].label);
    rep.reports.push_back(std::move(row.rep));
  }

  std::map<std::tuple<std::string, std::string, std::size_t>, SuiteSummary> sums;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const CheckReport& c = rep.reports[k];
    auto& s = sums[{c.suite, c.fixture, rows[k].run}];
    s.run = rep.report_runs[k];
    s.suite = c.suite;
    s.fixture = c.fixture;
    for (const CheckItem& it : c.items) {
      ++s.checks;
      if (!it.pass) ++s.failed;
      s.max_residual = std::max(s.max_residual, std::isfinite(it.residual) ? it.residual : INFINITY);
    }
  }
  for (auto& [key, s] : sums) {
    const auto& xf = m.runs[std::get<2>(key)].expect_fail;
    const bool expected = std::find(xf.begin(), xf.end(), s.suite) != xf.end();
    if (expected) s.status = s.failed ? SuiteStatus::ExpectedFail : SuiteStatus::UnexpectedPass;
    else s.status = s.failed ? SuiteStatus::Fail : SuiteStatus::Pass;
    rep.summaries.push_back(s);
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

json to_json(const RunReport& r) {
  json j;
  j["schema"] = kReportSchema;
  j["source"] = r.source;
  j["seed_override"] = r.has_seed_override ? json(r.seed_override) : json(nullptr);
  j["tolerance_scale"] = r.tolerance_scale;
  int checks = 0, failed = 0, suites_failed = 0, xfail = 0;
  json suites = json::array();
  for (const SuiteSummary& s : r.summaries) {
    checks += s.checks;
    failed += s.failed;
    if (s.status == SuiteStatus::Fail || s.status == SuiteStatus::UnexpectedPass) ++suites_failed;
    if (s.status == SuiteStatus::ExpectedFail) ++xfail;
    suites.push_back({{"suite", s.suite},
                      {"fixture", s.fixture},
                      {"checks", s.checks},
                      {"failed", s.failed},
                      {"max_residual", number(s.max_residual)},
                      {"status", status_name(s.status)}});
  }
  j["summary"] = {{"status", r.ok() ? "pass" : "fail"},
                  {"suites", r.summaries.size()},
                  {"suites_failed", suites_failed},
                  {"expected_failures", xfail},
                  {"checks", checks},
                  {"checks_failed", failed}};
  j["suites"] = std::move(suites);
  json items = json::array(), measured = json::array(), notes = json::array();
  for (const CheckReport& c : r.reports) {
    for (const CheckItem& it : c.items)
      items.push_back({{"suite", c.suite},
                       {"fixture", c.fixture},
                       {"point", c.point_index},
                       {"item", it.name},
                       {"residual", number(it.residual)},
                       {"tolerance", it.tolerance},
                       {"pass", it.pass}});
    for (const auto& [k, v] : c.measured)
      measured.push_back({{"suite", c.suite}, {"fixture", c.fixture}, {"point", c.point_index}, {"name", k}, {"value", number(v)}});
    for (const auto& n : c.notes)
      notes.push_back({{"suite", c.suite}, {"fixture", c.fixture}, {"point", c.point_index}, {"note", n}});
  }
  j["checks"] = std::move(items);
  j["measured"] = std::move(measured);
  j["notes"] = std::move(notes);
  j["timing"] = {{"wall_seconds", r.wall_seconds}};
  return j;
}

std::string to_table(const RunReport& r) {
  std::size_t wf = 7, ws = 5;
  for (const SuiteSummary& s : r.summaries) {
    wf = std::max(wf, s.fixture.size());
    ws = std::max(ws, s.suite.size());
  }
  std::ostringstream os;
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  os << pad("fixture", wf) << "  " << pad("suite", ws) << "  checks  failed  max residual  status\n";
  os << std::string(wf + ws + 44, '-') << "\n";
  for (const SuiteSummary& s : r.summaries) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%6d  %6d  %12s  ", s.checks, s.failed, fmt(s.max_residual).c_str());
    os << pad(s.fixture, wf) << "  " << pad(s.suite, ws) << "  " << buf << status_name(s.status) << "\n";
  }
  bool header = false;
  for (const CheckReport& c : r.reports)
    for (const CheckItem& it : c.items) {
      if (it.pass) continue;
      if (!header) {
        os << "\nfailed checks:\n";
        header = true;
      }
      os << "  " << c.fixture << " / " << c.suite << " point " << c.point_index << "  " << it.name << "  residual "
         << fmt(it.residual) << " >= " << fmt(it.tolerance) << "\n";
    }
  header = false;
  for (const CheckReport& c : r.reports) {
    if (c.point_index >= 0 || c.measured.empty()) continue;
    if (!header) {
      os << "\nmeasured:\n";
      header = true;
    }
    for (const auto& [k, v] : c.measured) os << "  " << c.fixture << " / " << c.suite << "  " << k << " = " << v << "\n";
  }
  int failed = 0;
  for (const SuiteSummary& s : r.summaries)
    if (s.status == SuiteStatus::Fail || s.status == SuiteStatus::UnexpectedPass) ++failed;
  os << "\n" << r.summaries.size() << " suites, " << failed << " failed: " << (r.ok() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace detour::cli
