// Command-line front end: transport, bisim, trace, lift, check, examples.

#include <CLI11.hpp>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pmet/pmet.hpp"

namespace {

using nlohmann::ordered_json;
using namespace pmet;

enum Exit { kOk = 0, kInputError = 1, kNoConvergence = 2, kViolation = 3 };

struct Options {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
  std::string format = "json";
  std::uint64_t seed = kDefaultSeed;
  std::size_t budget = kDefaultBudget;
  std::string top;
};

// ---------------------------------------------------------------------------
// Output

ordered_json num(ExtReal x) {
  if (x.is_inf()) return "inf";
  return std::strtod(format_value(x).c_str(), nullptr);
}
ordered_json num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

ordered_json matrix_doc(const PseudometricMatrix& d) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    ordered_json r = ordered_json::array();
    for (std::size_t j = 0; j < d.size(); ++j) r.push_back(num(d(i, j)));
    rows.push_back(r);
  }
  return {{"labels", d.carrier()}, {"rows", rows}};
}

std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
  }
  return v.dump();
}

// Flattens a document to key<TAB>value lines; matrices become labelled tables.
void write_tsv(std::ostream& os, const ordered_json& doc, const std::string& prefix = "") {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const auto& v = it.value();
    if (v.is_object() && v.contains("labels") && v.contains("rows")) {
      os << key << "\n";
      for (const auto& l : v["labels"]) os << "\t" << l.get<std::string>();
      os << "\n";
      for (std::size_t i = 0; i < v["rows"].size(); ++i) {
        os << v["labels"][i].get<std::string>();
        for (const auto& x : v["rows"][i]) os << "\t" << scalar_text(x);
        os << "\n";
      }
    } else if (v.is_object()) {
      write_tsv(os, v, key);
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_object()) write_tsv(os, v[i], key + "." + std::to_string(i));
        else os << key << "." << i << "\t" << scalar_text(v[i]) << "\n";
      }
    } else {
      os << key << "\t" << scalar_text(v) << "\n";
    }
  }
}

void emit(const ordered_json& doc, const Options& opt) {
  if (opt.format == "tsv") write_tsv(std::cout, doc);
  else std::cout << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Input

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SystemSpec load_system(const std::string& path, const Options& opt) {
  const std::string builtin = "builtin:";
  SystemSpec s = path.rfind(builtin, 0) == 0 ? builtin_system(path.substr(builtin.size())) : parse_system(read_input(path));
  if (!opt.top.empty() && Top::parse(opt.top) != s.top)
    throw InputError("--top " + opt.top + " conflicts with the file's top " + s.top.name());
  return s;
}

YAML::Node load_yaml(const std::string& path) {
  try {
    return YAML::Load(read_input(path));
  } catch (const YAML::ParserException& e) {
    throw InputError("line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1) +
                     ": syntax error: " + e.msg);
  }
}

double to_number(const YAML::Node& n) {
  if (!n || !n.IsScalar()) throw InputError("expected a number");
  const std::string s = n.Scalar();
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end) throw InputError("expected a number, got '" + s + "'");
  return v;
}

ExtReal to_ext(const YAML::Node& n) {
  if (n && n.IsScalar() && n.Scalar() == "inf") return ExtReal::inf();
  return ExtReal(to_number(n));
}

// A base metric given as points plus a table or "euclid" over numeric point names.
PseudometricMatrix load_metric(const YAML::Node& root, const Options& opt) {
  Top top = root["top"] ? Top::parse(root["top"].Scalar()) : Top::one();
  if (!opt.top.empty() && Top::parse(opt.top) != top)
    throw InputError("--top " + opt.top + " conflicts with the file's top " + top.name());
  if (!root["points"] || !root["points"].IsSequence()) throw InputError("missing 'points' list");
  std::vector<std::string> pts;
  for (const auto& p : root["points"]) pts.push_back(p.Scalar());
  const YAML::Node m = root["metric"];
  if (!m) throw InputError("missing 'metric'");
  PseudometricMatrix d;
  if (m.IsScalar() && m.Scalar() == "euclid") {
    std::vector<ExtReal> vals;
    for (const auto& p : root["points"]) vals.push_back(to_ext(p));
    d = PseudometricMatrix::euclidean(pts, top, vals);
  } else {
    std::vector<std::vector<ExtReal>> rows;
    for (const auto& r : m) {
      rows.emplace_back();
      for (const auto& e : r) rows.back().push_back(to_ext(e));
    }
    d = PseudometricMatrix(pts, top, rows);
  }
  auto bad = check_axioms(d);
  if (!bad.empty())
    throw InputError(std::string("metric violates ") + to_string(bad.front().kind) + " at (" + pts[bad.front().x] + "," +
                     pts[bad.front().y] + "," + pts[bad.front().z] + ")");
  return d;
}

Distribution load_distribution(const YAML::Node& n, const PseudometricMatrix& d, bool sub) {
  if (!n || !n.IsMap()) throw InputError("distribution must map points to probabilities");
  std::vector<double> w(d.size(), 0.0);
  for (const auto& kv : n) w[d.index_of(kv.first.Scalar())] += to_number(kv.second);
  return Distribution(w, sub);
}

std::vector<std::size_t> load_points(const YAML::Node& n, const PseudometricMatrix& d) {
  if (!n || !n.IsSequence()) throw InputError("expected a list of points");
  std::vector<std::size_t> out;
  for (const auto& e : n) out.push_back(d.index_of(e.Scalar()));
  return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_transport(const std::string& path, bool sub_flag, const Options& opt) {
  YAML::Node root = load_yaml(path);
  auto d = load_metric(root, opt);
  const bool sub = sub_flag || (root["subdistribution"] && root["subdistribution"].as<bool>());
  auto p = load_distribution(root["supply"], d, sub), q = load_distribution(root["demand"], d, sub);
  auto primal = solve_transport(p, q, d);
  ordered_json res;
  res["cost"] = num(primal.cost);
  if (!primal.plan) {
    res["coupling"] = "none";
    res["message"] = "no coupling: distance = top";
  } else {
    auto dual = solve_dual(p, q, d);
    ordered_json plan = ordered_json::array();
    for (const auto& e : primal.plan->entries)
      plan.push_back({{"from", d.carrier()[e.from]}, {"to", d.carrier()[e.to]}, {"mass", num(e.mass)}});
    res["plan"] = plan;
    ordered_json pot = ordered_json::object();
    for (std::size_t i = 0; i < d.size(); ++i) pot[d.carrier()[i]] = num(dual.potential[i]);
    res["potential"] = pot;
    res["dual_value"] = num(dual.value);
    res["duality_gap"] = num(euclid(primal.cost, dual.value));
  }
  if (sub) res["kantorovich"] = num(kantorovich_distribution(d, p, q));
  emit({{"command", "transport"}, {"parameters", {{"file", path}, {"top", d.top().name()}, {"subdistribution", sub}}},
        {"result", res}},
       opt);
  return kOk;
}

int cmd_bisim(const std::string& path, bool trace, const Options& opt) {
  auto s = load_system(path, opt);
  FixpointConfig cfg{opt.tol, opt.max_iter, trace};
  auto r = bisim_metric(s, cfg);
  ordered_json res{{"metric", matrix_doc(r.metric)},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"final_delta", num(r.final_delta)}};
  if (trace) {
    ordered_json ds = ordered_json::array();
    for (auto x : r.deltas) ds.push_back(num(x));
    res["deltas"] = ds;
  }
  emit({{"command", "bisim"},
        {"parameters", {{"file", path}, {"kind", to_string(s.kind())}, {"top", s.top.name()}, {"tol", num(opt.tol)},
                        {"max_iter", opt.max_iter}}},
        {"result", res}},
       opt);
  return r.converged ? kOk : kNoConvergence;
}

int cmd_trace(const std::string& path, const std::string& from, const std::string& to, std::optional<double> c,
              std::optional<double> c1, std::optional<double> c2, const Options& opt) {
  auto s = load_system(path, opt);
  const std::size_t x = s.state_index(from), y = s.state_index(to);
  ordered_json params{{"file", path}, {"kind", to_string(s.kind())}, {"from", from}, {"to", to}};
  ordered_json res;
  if (s.kind() == SystemKind::nfa) {
    auto r = trace_metric_nfa(s, x, y, c);
    params["c"] = num(c.value_or(s.as<NfaData>().c));
    res["distance"] = num(r.distance);
    if (r.witness) {
      res["witness"] = *r.witness;
      res["witness_length"] = r.witness->size();
    } else {
      res["witness"] = nullptr;
    }
  } else if (s.kind() == SystemKind::pa) {
    const auto& d = s.as<PaData>();
    const double a = c1.value_or(d.c1), b = c2.value_or(d.c2);
    auto r = trace_metric_pa(s, x, y, a, b, opt.tol);
    params["c1"] = num(a);
    params["c2"] = num(b);
    params["tol"] = num(opt.tol);
    res["distance"] = num(r.distance);
    res["error_bound"] = num(opt.tol);
    res["deepest_word"] = r.depth;
    res["words_visited"] = r.words;
  } else {
    throw InputError("trace needs an nfa or pa system");
  }
  emit({{"command", "trace"}, {"parameters", params}, {"result", res}}, opt);
  return kOk;
}

int cmd_lift(const std::string& path, const Options& opt) {
  YAML::Node root = load_yaml(path);
  auto d = load_metric(root, opt);
  if (!root["functor"]) throw InputError("missing 'functor'");
  const std::string f = root["functor"].Scalar();
  const YAML::Node params = root["params"] ? root["params"] : YAML::Node(YAML::NodeType::Map);
  auto param = [&](const char* k, double dflt) { return params[k] ? to_number(params[k]) : dflt; };
  auto word = [&](const char* k, const char* dflt) { return params[k] ? params[k].Scalar() : std::string(dflt); };
  const YAML::Node left = root["left"], right = root["right"];
  if (!left || !right) throw InputError("missing 'left' or 'right' element");

  ordered_json res;
  if (f == "distribution") {
    const bool sub = word("subdistribution", "false") == "true";
    auto p = load_distribution(left, d, sub), q = load_distribution(right, d, sub);
    res["wasserstein"] = num(wasserstein_distribution(d, p, q));
    res["kantorovich"] = num(kantorovich_distribution(d, p, q));
  } else if (f == "powerset") {
    auto s1 = load_points(left, d), s2 = load_points(right, d);
    res["hausdorff"] = num(hausdorff(d, s1, s2));
  } else if (f == "input") {
    auto s1 = load_points(left, d), s2 = load_points(right, d);
    res["distance"] = num(lift_input(d, s1, s2, parse_input_mode(word("mode", "max"))));
  } else if (f == "product") {
    auto s1 = load_points(left, d), s2 = load_points(right, d);
    if (s1.size() != 2 || s2.size() != 2) throw InputError("product elements are pairs");
    ProductEval e;
    const std::string kind = word("kind", "max");
    if (kind != "max" && kind != "pnorm") throw InputError("product kind must be max or pnorm");
    e.kind = kind == "pnorm" ? ProductEval::Kind::pnorm : ProductEval::Kind::max;
    e.c1 = param("c1", 1.0);
    e.c2 = param("c2", 1.0);
    e.p = param("p", 1.0);
    res["distance"] = num(lift_product(d, d, {s1[0], s1[1]}, {s2[0], s2[1]}, e));
  } else if (f == "coproduct") {
    auto side = [&](const YAML::Node& n) {
      if (!n.IsMap() || n.size() != 1) throw InputError("coproduct elements look like {inl: x} or {inr: x}");
      auto kv = *n.begin();
      const std::string tag = kv.first.Scalar();
      if (tag != "inl" && tag != "inr") throw InputError("coproduct tag must be inl or inr");
      return CoproductElement{tag == "inr", d.index_of(kv.second.Scalar())};
    };
    res["distance"] = num(lift_coproduct(d, d, side(left), side(right)));
  } else if (f == "machine") {
    auto elem = [&](const YAML::Node& n) {
      if (!n.IsMap()) throw InputError("machine elements look like {output: x, next: [..]}");
      return MachineElement{d.index_of(n["output"].Scalar()), load_points(n["next"], d)};
    };
    MachineEval e{parse_machine_variant(word("variant", "max")), param("c1", 1.0), param("c2", 0.5)};
    res["distance"] = num(lift_machine(d, d, elem(left), elem(right), e));
  } else if (f == "squaring") {
    auto s1 = load_points(left, d), s2 = load_points(right, d);
    if (s1.size() != 2 || s2.size() != 2) throw InputError("squaring elements are pairs");
    res["wasserstein"] = num(squaring_wasserstein(d, {s1[0], s1[1]}, {s2[0], s2[1]}));
    res["kantorovich_grid"] =
        num(squaring_kantorovich_oracle(d, {s1[0], s1[1]}, {s2[0], s2[1]}, param("h", 0.05), param("cap", 1.0)));
  } else {
    throw InputError("unknown functor '" + f + "'");
  }
  emit({{"command", "lift"}, {"parameters", {{"file", path}, {"functor", f}, {"top", d.top().name()}}}, {"result", res}},
       opt);
  return kOk;
}

int cmd_check(const std::string& name, const Options& opt) {
  auto rep = run_check(name, opt.seed, opt.budget);
  ordered_json viol = ordered_json::array();
  for (const auto& v : rep.violations)
    viol.push_back({{"instance", v.instance}, {"expected", v.relation}, {"observed", v.observed}});
  emit({{"command", "check"},
        {"parameters", {{"name", name}, {"seed", opt.seed}, {"budget", opt.budget}}},
        {"result",
         {{"passed", rep.passed()},
          {"instances", rep.instances},
          {"violation_count", rep.violations.size() + rep.suppressed},
          {"violations", viol}}}},
       opt);
  return rep.passed() ? kOk : kViolation;
}

int cmd_examples(const std::string& action, const std::string& name, std::optional<double> eps,
                 std::optional<double> c, const Options& opt) {
  if (action == "list") {
    ordered_json list = ordered_json::array();
    for (const auto& e : builtin_examples())
      list.push_back({{"name", e.name}, {"kind", to_string(e.spec.kind())}, {"description", e.description}});
    emit({{"command", "examples"}, {"result", {{"examples", list}}}}, opt);
    return kOk;
  }
  if (action != "dump") throw InputError("examples action must be list or dump");
  SystemSpec s = builtin_system(name);
  if (eps || c) {
    if (name != "fig2-pts") throw InputError("--epsilon and --c only apply to fig2-pts");
    s = branching_pts(eps.value_or(0.1), c.value_or(0.9));
  }
  std::cout << serialize_system(s);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioural distances via functor liftings"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--tol", opt.tol, "convergence / truncation tolerance")->capture_default_str();
  app.add_option("--max-iter", opt.max_iter, "fixpoint iteration cap")->capture_default_str();
  app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"json", "tsv"}))->capture_default_str();
  app.add_option("--seed", opt.seed, "sampling seed for checks")->capture_default_str();
  app.add_option("--budget", opt.budget, "instances per check")->capture_default_str();
  app.add_option("--top", opt.top, "expected top (1 or inf); rejected if the input disagrees");

  std::string file, from, to, check_name, action, example;
  bool sub = false, trace = false;
  std::optional<double> c, c1, c2, eps;

  auto* transport = app.add_subcommand("transport", "optimal transport between supply and demand");
  transport->add_option("file", file, "instance file, - for stdin")->required();
  transport->add_flag("--sub", sub, "treat supply and demand as subdistributions");

  auto* bisim = app.add_subcommand("bisim", "bisimilarity pseudometric of a system");
  bisim->add_option("file", file, "system file, - for stdin, or builtin:NAME")->required();
  bisim->add_flag("--trace", trace, "report every iteration's delta");

  auto* tr = app.add_subcommand("trace", "trace distance between two states of an nfa or pa");
  tr->add_option("file", file, "system file, - for stdin, or builtin:NAME")->required();
  tr->add_option("--from", from)->required();
  tr->add_option("--to", to)->required();
  tr->add_option("--c", c, "nfa discount");
  tr->add_option("--c1", c1, "pa output weight");
  tr->add_option("--c2", c2, "pa continuation weight");

  auto* lift = app.add_subcommand("lift", "one lifted distance between two functor elements");
  lift->add_option("file", file, "lift instance file, - for stdin")->required();

  auto* check = app.add_subcommand("check", "run a named property check");
  check->add_option("name", check_name, "check name, or 'list'")->required();

  auto* ex = app.add_subcommand("examples", "list or dump builtin systems");
  ex->add_option("action", action, "list | dump")->required();
  ex->add_option("name", example, "example to dump");
  ex->add_option("--epsilon", eps, "fig2-pts branching offset");
  ex->add_option("--c", c, "fig2-pts discount");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*transport) return cmd_transport(file, sub, opt);
    if (*bisim) return cmd_bisim(file, trace, opt);
    if (*tr) return cmd_trace(file, from, to, c, c1, c2, opt);
    if (*lift) return cmd_lift(file, opt);
    if (*check) {
      if (check_name == "list") {
        for (const auto& n : check_names()) std::cout << n << "\n";
        return kOk;
      }
      return cmd_check(check_name, opt);
    }
    if (*ex) return cmd_examples(action, example, eps, c, opt);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const LimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const YAML::Exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
