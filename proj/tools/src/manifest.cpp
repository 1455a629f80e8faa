#include "detour/cli/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "detour/cli/suites.hpp"

namespace detour::cli {

namespace {

using nlohmann::json;

// Default sample size; the profile and most manifests keep it.
constexpr int kDefaultCount = 5;

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ManifestError(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ManifestError(where.empty() ? k : where + "." + k, "unknown field");
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ManifestError(where, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ManifestError(where, "expected an integer");
  return v.get<int>();
}

std::string text_of(const json& v, const std::string& where) {
  if (!v.is_string()) throw ManifestError(where, "expected a string");
  return v.get<std::string>();
}

// Expressions may be given as strings or plain numbers.
Expr expression(const json& v, int n, const std::string& where) {
  std::string s;
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    s = os.str();
  } else {
    s = text_of(v, where);
  }
  try {
    return parse(s, n);
  } catch (const ParseError& e) {
    throw ManifestError(where, std::string("expression: ") + e.what());
  }
}

FixtureParams params_of(const json& obj, const std::string& where) {
  FixtureParams p;
  if (!obj.is_object()) throw ManifestError(where, "expected an object of numbers");
  for (const auto& [k, v] : obj.items()) p[k] = number(v, join(where, k));
  return p;
}

void parse_geometry(const json& g, RunSpec& run, Box& box, const std::string& where) {
  only_keys(g, where, {"fixture", "params", "metric", "signature", "name"});
  if (g.contains("fixture")) {
    if (g.contains("metric")) throw ManifestError(where, "give either a fixture or an inline metric");
    const std::string name = text_of(g["fixture"], join(where, "fixture"));
    const FixtureParams params = g.contains("params") ? params_of(g["params"], join(where, "params")) : FixtureParams{};
    try {
      MetricFixture f = metric_fixture(name, params);
      run.metric = std::move(f.spec);
      run.einstein = f.einstein;
      box = f.box;
    } catch (const std::invalid_argument& e) {
      throw ManifestError(join(where, "fixture"), e.what());
    }
    return;
  }
  if (!g.contains("metric")) throw ManifestError(where, "needs a fixture or a metric");
  const json& m = g["metric"];
  const std::string mw = join(where, "metric");
  if (!m.is_array() || m.empty()) throw ManifestError(mw, "expected an n x n array");
  const int n = static_cast<int>(m.size());
  MetricSpec spec;
  spec.n = n;
  spec.name = g.contains("name") ? text_of(g["name"], join(where, "name")) : "inline";
  for (int a = 0; a < n; ++a) {
    const json& row = m[static_cast<std::size_t>(a)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) throw ManifestError(at(mw, a), "expected a row of length " + std::to_string(n));
    for (int b = 0; b < n; ++b) spec.g.push_back(expression(row[static_cast<std::size_t>(b)], n, at(at(mw, a), b)));
  }
  if (!g.contains("signature")) throw ManifestError(where, "an inline metric needs a signature [p, q]");
  const json& sig = g["signature"];
  if (!sig.is_array() || sig.size() != 2) throw ManifestError(join(where, "signature"), "expected [p, q]");
  spec.p = integer(sig[0], at(join(where, "signature"), 0));
  spec.q = integer(sig[1], at(join(where, "signature"), 1));
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ManifestError(mw, e.what());
  }
  run.metric = std::move(spec);
  box = Box(static_cast<std::size_t>(n), {-0.5, 0.5});
}

void parse_connection(const json& c, RunSpec& run, const std::string& where) {
  only_keys(c, where, {"fixture", "params", "rank", "A", "A_im", "flat_half", "name"});
  const int n = run.metric.n;
  if (c.contains("fixture")) {
    const std::string name = text_of(c["fixture"], join(where, "fixture"));
    FixtureParams params = c.contains("params") ? params_of(c["params"], join(where, "params")) : FixtureParams{};
    if (!params.count("n")) params["n"] = n;
    try {
      ConnectionFixture f = connection_fixture(name, params);
      run.connection = std::move(f.spec);
      run.flat_half = f.flat_half;
    } catch (const std::invalid_argument& e) {
      throw ManifestError(join(where, "fixture"), e.what());
    }
  } else {
    if (!c.contains("A")) throw ManifestError(where, "needs a fixture or components A");
    ConnectionSpec spec;
    spec.n = n;
    spec.k = c.contains("rank") ? integer(c["rank"], join(where, "rank")) : 1;
    spec.name = c.contains("name") ? text_of(c["name"], join(where, "name")) : "inline";
    if (spec.k < 1 || spec.k > 4) throw ManifestError(join(where, "rank"), "rank must be 1..4");
    auto read = [&](const char* key, std::vector<Expr>& out) {
      const json& A = c[key];
      const std::string aw = join(where, key);
      if (!A.is_array() || static_cast<int>(A.size()) != n)
        throw ManifestError(aw, "expected one entry per coordinate (" + std::to_string(n) + ")");
      for (int a = 0; a < n; ++a) {
        const json& row = A[static_cast<std::size_t>(a)];
        if (!row.is_array() || static_cast<int>(row.size()) != spec.k * spec.k)
          throw ManifestError(at(aw, a), "expected rank^2 = " + std::to_string(spec.k * spec.k) + " entries");
        for (std::size_t e = 0; e < row.size(); ++e) out.push_back(expression(row[e], n, at(at(aw, a), e)));
      }
    };
    read("A", spec.re);
    if (c.contains("A_im")) read("A_im", spec.im);
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ManifestError(where, e.what());
    }
    run.connection = std::move(spec);
  }
  if (c.contains("flat_half")) {
    run.flat_half = integer(c["flat_half"], join(where, "flat_half"));
    if (run.flat_half < -1 || run.flat_half > 1) throw ManifestError(join(where, "flat_half"), "must be -1, 0 or 1");
  }
  if (run.connection->n != n) throw ManifestError(where, "connection dimension differs from the geometry");
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ManifestError(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(text_of(v[i], at(where, i)));
  return out;
}

RunSpec parse_run(const json& r, const std::string& where) {
  only_keys(r, where, {"label", "geometry", "connection", "rescale", "sample", "suites", "expect_fail"});
  RunSpec run;
  if (!r.contains("geometry")) throw ManifestError(where, "missing geometry");
  Box box;
  parse_geometry(r["geometry"], run, box, join(where, "geometry"));
  const int n = run.metric.n;
  if (n < 3 || n > 6) throw ManifestError(join(where, "geometry"), "dimension must be between 3 and 6");
  if (r.contains("connection")) parse_connection(r["connection"], run, join(where, "connection"));
  if (r.contains("rescale")) {
    run.rescale = text_of(r["rescale"], join(where, "rescale"));
    expression(r["rescale"], n, join(where, "rescale"));
  }
  run.sample.seed = 1;
  run.sample.count = kDefaultCount;
  run.sample.box = box;
  if (r.contains("sample")) {
    const json& s = r["sample"];
    const std::string sw = join(where, "sample");
    only_keys(s, sw, {"seed", "count", "box"});
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw ManifestError(join(sw, "seed"), "expected a non-negative integer");
      run.sample.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("count")) {
      run.sample.count = integer(s["count"], join(sw, "count"));
      if (run.sample.count < 1 || run.sample.count > 1000) throw ManifestError(join(sw, "count"), "must be 1..1000");
    }
    if (s.contains("box")) {
      const json& b = s["box"];
      const std::string bw = join(sw, "box");
      if (!b.is_array() || static_cast<int>(b.size()) != n) throw ManifestError(bw, "expected one [lo, hi] pair per coordinate");
      run.sample.box.clear();
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (!b[i].is_array() || b[i].size() != 2) throw ManifestError(at(bw, i), "expected [lo, hi]");
        const double lo = number(b[i][0], at(at(bw, i), 0)), hi = number(b[i][1], at(at(bw, i), 1));
        if (!(lo <= hi)) throw ManifestError(at(bw, i), "lo must not exceed hi");
        run.sample.box.emplace_back(lo, hi);
      }
    }
  }
  if (!r.contains("suites")) throw ManifestError(where, "missing suites");
  run.suites = string_list(r["suites"], join(where, "suites"));
  if (run.suites.empty()) throw ManifestError(join(where, "suites"), "no suites requested");
  for (std::size_t i = 0; i < run.suites.size(); ++i) {
    const Suite* s = find_suite(run.suites[i]);
    if (!s) throw ManifestError(at(join(where, "suites"), i), "unknown suite '" + run.suites[i] + "'");
    const std::string why = requirement_error(*s, run);
    if (!why.empty()) throw ManifestError(at(join(where, "suites"), i), "suite '" + s->name + "' " + why);
  }
  if (r.contains("expect_fail")) {
    run.expect_fail = string_list(r["expect_fail"], join(where, "expect_fail"));
    for (std::size_t i = 0; i < run.expect_fail.size(); ++i)
      if (std::find(run.suites.begin(), run.suites.end(), run.expect_fail[i]) == run.suites.end())
        throw ManifestError(at(join(where, "expect_fail"), i), "'" + run.expect_fail[i] + "' is not among the suites");
  }
  run.label = r.contains("label") ? text_of(r["label"], join(where, "label")) : run.metric.name;
  return run;
}

Tolerances parse_tolerances(const json& t) {
  only_keys(t, "tolerances", {"scale", "overrides"});
  Tolerances out;
  if (t.contains("scale")) {
    out.scale = number(t["scale"], "tolerances.scale");
    if (!(out.scale > 0.0)) throw ManifestError("tolerances.scale", "must be positive");
  }
  if (t.contains("overrides")) {
    const json& o = t["overrides"];
    if (!o.is_object()) throw ManifestError("tolerances.overrides", "expected an object");
    for (const auto& [k, v] : o.items()) {
      const std::string suite = k.substr(0, k.find('/'));
      if (!find_suite(suite)) throw ManifestError("tolerances.overrides." + k, "unknown suite '" + suite + "'");
      const double tol = number(v, "tolerances.overrides." + k);
      if (!(tol > 0.0)) throw ManifestError("tolerances.overrides." + k, "must be positive");
      out.overrides[k] = tol;
    }
  }
  return out;
}

Manifest from_json(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ManifestError("", "manifest must be an object");
  if (!doc.contains("schema")) throw ManifestError("schema", "missing (expected \"" + std::string(kManifestSchema) + "\")");
  if (text_of(doc["schema"], "schema") != kManifestSchema)
    throw ManifestError("schema", "unsupported schema '" + doc["schema"].get<std::string>() + "'");
  Manifest m;
  m.source = source;
  if (doc.contains("profile")) {
    only_keys(doc, "", {"schema", "profile", "tolerances"});
    const std::string name = text_of(doc["profile"], "profile");
    const auto names = profile_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw ManifestError("profile", "unknown profile '" + name + "'");
    m = profile_manifest(name);
    m.source = source;
  } else if (doc.contains("runs")) {
    only_keys(doc, "", {"schema", "runs", "tolerances"});
    const json& runs = doc["runs"];
    if (!runs.is_array() || runs.empty()) throw ManifestError("runs", "expected a non-empty array");
    for (std::size_t i = 0; i < runs.size(); ++i) m.runs.push_back(parse_run(runs[i], at("runs", i)));
  } else {
    json run = doc;
    run.erase("schema");
    run.erase("tolerances");
    m.runs.push_back(parse_run(run, ""));
  }
  if (doc.contains("tolerances")) m.tolerances = parse_tolerances(doc["tolerances"]);
  return m;
}

// Every suite on default fixtures.  Einstein metrics carry the Bach and
// Bach-Clifford vanishing checks; perturbed flat metrics are the generic case.
const char* const kCoreProfile = R"({
  "schema": "detour-manifest/1",
  "runs": [
    {"label": "flat-4-gl", "geometry": {"fixture": "flat", "params": {"n": 4}},
     "connection": {"fixture": "random-gl", "params": {"rank": 3, "degree": 3, "seed": 2}},
     "suites": ["jet-oracle", "algact", "currentder", "twistor-spinors", "clifford"]},
    {"label": "pflat-4-su2", "geometry": {"fixture": "perturbed-flat", "params": {"n": 4, "seed": 3}},
     "connection": {"fixture": "random-su2", "params": {"degree": 3, "seed": 4}},
     "suites": ["jet-oracle", "algact", "currentder", "conformal-n4"]},
    {"label": "bpst", "geometry": {"fixture": "flat", "params": {"n": 4}},
     "connection": {"fixture": "bpst"},
     "suites": ["algact", "detour-complex", "prop-agree", "currentder"]},
    {"label": "abelian-linear", "geometry": {"fixture": "flat", "params": {"n": 4}},
     "connection": {"fixture": "abelian-linear"},
     "suites": ["detour-complex", "prop-agree"]},
    {"label": "abelian-quadratic", "geometry": {"fixture": "flat", "params": {"n": 4}},
     "connection": {"fixture": "abelian-quadratic"},
     "suites": ["algact", "detour-complex"], "expect_fail": ["detour-complex"]},
    {"label": "sphere-4", "geometry": {"fixture": "sphere", "params": {"n": 4}},
     "suites": ["curvature", "einstein-bach", "eincomm", "divtr", "MP", "spin-curvature", "spincomm", "twistor-n4"]},
    {"label": "hyperbolic-4", "geometry": {"fixture": "hyperbolic", "params": {"n": 4}},
     "suites": ["curvature", "einstein-bach", "eincomm"]},
    {"label": "schwarzschild", "geometry": {"fixture": "schwarzschild"},
     "suites": ["jet-oracle", "curvature", "einstein-bach", "spincomm", "twistor-n4"]},
    {"label": "pflat-4", "geometry": {"fixture": "perturbed-flat", "params": {"n": 4, "seed": 5}},
     "suites": ["curvature", "conformal", "conformal-n4", "eincomm", "divtr", "MP", "MT-composition",
                "tractor-metric", "transf", "spin-curvature", "spincomm", "spintrtr", "twistor-n4",
                "symbol-maxwell", "symbol-einstein", "symbol-twistor", "symbol-oracle"]},
    {"label": "pflat-5", "geometry": {"fixture": "perturbed-flat", "params": {"n": 5, "seed": 6}},
     "suites": ["curvature", "conformal", "eincomm", "divtr", "MP", "MT-composition", "transf",
                "spincomm", "symbol-maxwell"]},
    {"label": "pflat-3", "geometry": {"fixture": "perturbed-flat", "params": {"n": 3, "seed": 7}},
     "suites": ["curvature", "conformal", "eincomm", "spincomm", "symbol-maxwell"]},
    {"label": "lorentz-4", "geometry": {"fixture": "flat", "params": {"n": 4, "q": 1}},
     "suites": ["clifford", "tractor-metric", "spin-curvature"]}
  ]
})";

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestError(line_col(text, e.byte == 0 ? 0 : e.byte - 1), "parse error");
  }
  return from_json(doc, source);
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(path, "cannot open manifest");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path);
}

std::vector<std::string> profile_names() { return {"paper-core"}; }

Manifest profile_manifest(const std::string& name) {
  if (name != "paper-core") throw ManifestError("profile", "unknown profile '" + name + "'");
  Manifest m = parse_manifest(kCoreProfile, "profile:" + name);
  return m;
}

}  // namespace detour::cli
