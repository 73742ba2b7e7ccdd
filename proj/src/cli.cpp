#include "produpd/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "produpd/analysis.hpp"
#include "produpd/harness.hpp"
#include "produpd/parser.hpp"
#include "produpd/semantics.hpp"
#include "produpd/translator.hpp"

namespace produpd::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Formula formula_arg(const std::string& text) {
  if (!text.empty() && text.front() == '@') return parse_formula(read_file(text.substr(1)));
  return parse_formula(text);
}

std::string show(const WorldSet& set, const KripkeModel& m) {
  std::string out = "{";
  bool first = true;
  set.for_each([&](std::size_t i) {
    out += (first ? "" : ", ") + m.world(i);
    first = false;
  });
  return out + "}";
}

nlohmann::json names(const WorldSet& set, const KripkeModel& m) {
  nlohmann::json out = nlohmann::json::array();
  set.for_each([&](std::size_t i) { out.push_back(m.world(i)); });
  return out;
}

// Two worlds that see each other, w1 reflexive; the k-th proposition in
// sorted order holds at w(k mod 2).
KripkeModel sanity_model(const std::set<PropName>& props) {
  const std::vector<Edge> edges = {{0, 1}, {1, 0}, {1, 1}};
  std::map<PropName, WorldSet> val;
  std::size_t k = 0;
  for (const auto& p : props) val.emplace(p, WorldSet::singleton(2, k++ % 2));
  return KripkeModel({"w0", "w1"}, edges, std::move(val));
}

struct Common {
  bool json = false;
};

int cmd_parse(const std::string& text, const Common& c, std::ostream& out) {
  const Formula f = formula_arg(text);
  if (c.json) {
    out << nlohmann::json{{"formula", print_formula(f)},
                          {"language", to_string(classify(f))},
                          {"size", f.size()},
                          {"modal_depth", modal_depth(f)},
                          {"quantifiers", quantifier_nodes(f)}}
               .dump()
        << '\n';
  } else {
    out << print_formula(f) << '\n';
  }
  return Success;
}

int cmd_eval(const std::string& model_path, const std::string& text, const std::string& world,
             const std::string& events_path, const Common& c, std::ostream& out) {
  const KripkeModel m = parse_model(read_file(model_path));
  const Formula f = formula_arg(text);
  std::optional<EventModel> events;
  if (!events_path.empty()) events = parse_event_model(read_file(events_path));
  const EvalBudget budget = budget_from_environment();
  const WorldSet ext = extension(m, f, budget, events ? &*events : nullptr);
  if (!world.empty()) {
    const bool value = ext.test(m.require(world));
    if (c.json) {
      out << nlohmann::json{{"world", world}, {"value", value}}.dump() << '\n';
    } else {
      out << (value ? "true" : "false") << '\n';
    }
  } else if (c.json) {
    out << nlohmann::json{{"extension", names(ext, m)}}.dump() << '\n';
  } else {
    out << show(ext, m) << '\n';
  }
  return Success;
}

int cmd_product(const std::string& model_path, const std::string& events_path, const Common& c, std::ostream& out) {
  const KripkeModel m = parse_model(read_file(model_path));
  const EventModel a = parse_event_model(read_file(events_path));
  const TaggedModel p = product_update(m, a, budget_from_environment());
  out << to_json(p, a).dump(c.json ? -1 : 2) << '\n';
  return Success;
}

int cmd_announce(const std::string& model_path, const std::string& text, const Common& c, std::ostream& out) {
  const KripkeModel m = parse_model(read_file(model_path));
  const Formula f = formula_arg(text);
  const KripkeModel r = relativise(m, extension(m, f, budget_from_environment()));
  out << to_json(r).dump(c.json ? -1 : 2) << '\n';
  return Success;
}

int cmd_translate(const std::string& events_path, const std::string& event, const std::string& text, bool simplify_out,
                  const Common& c, std::ostream& out) {
  std::optional<EventModel> events;
  if (!events_path.empty()) events = parse_event_model(read_file(events_path));
  Formula f = formula_arg(text);
  if (!event.empty()) {
    if (!events) throw Error(ErrorCode::UnknownEvent, "--event needs --events");
    if (!events->index_of(event)) throw Error(ErrorCode::UnknownEvent, "unknown event '" + event + "'");
    f = Formula::action(event, f);
  }
  TranslateOptions options;
  options.simplify = simplify_out;
  const TranslationReport report = events ? eliminate_all(*events, f, options) : eliminate_all(f, options);

  std::set<PropName> props = free_props(f);
  const std::set<PropName> out_props = free_props(report.output);
  props.insert(out_props.begin(), out_props.end());
  if (events) props.insert(events->precondition_props().begin(), events->precondition_props().end());
  const KripkeModel sanity = sanity_model(props);
  const EvalBudget budget = budget_from_environment();
  const WorldSet before = extension(sanity, f, budget, events ? &*events : nullptr);
  const WorldSet after = extension(sanity, report.output, budget);
  const bool passed = before == after;

  if (c.json) {
    nlohmann::json j = to_json(report);
    j["sanity_check"] = {{"model", to_json(sanity)},
                         {"input_extension", names(before, sanity)},
                         {"output_extension", names(after, sanity)},
                         {"passed", passed}};
    out << j.dump() << '\n';
  } else {
    out << print_formula(report.output) << '\n';
    out << "size " << report.input_size << " -> " << report.output_size << ", quantifiers " << report.input_eps
        << " -> " << report.output_eps << ", " << report.steps.size() << " rewrite(s)\n";
    out << "sanity check on the two-world model: " << (passed ? "passed" : "FAILED") << '\n';
  }
  return passed ? Success : Failure;
}

int cmd_bisim(const std::string& p1, const std::string& w1, const std::string& p2, const std::string& w2,
              const Common& c, std::ostream& out) {
  const KripkeModel m1 = parse_model(read_file(p1));
  const KripkeModel m2 = parse_model(read_file(p2));
  const std::size_t s = m1.require(w1);
  const std::size_t t = m2.require(w2);
  const Bisimulation z = greatest_bisimulation(m1, m2);
  const bool related = z.contains(s, t);
  if (c.json) {
    out << nlohmann::json{{"bisimilar", related}, {"relation", to_json(z, m1, m2)}}.dump() << '\n';
  } else {
    out << (related ? "bisimilar" : "not bisimilar") << '\n';
    for (const auto& [a, b] : z.pairs) out << m1.world(a) << " ~ " << m2.world(b) << '\n';
  }
  return Success;
}

int cmd_fuzz(FuzzConfig cfg, const std::string& suites, const Common& c, std::ostream& out) {
  if (!suites.empty()) {
    cfg.suites.clear();
    std::stringstream in(suites);
    for (std::string name; std::getline(in, name, ',');) {
      if (!name.empty()) cfg.suites.push_back(suite_from_string(name));
    }
  }
  cfg.budget = budget_from_environment();
  const FuzzReport report = run_fuzz(cfg);
  if (c.json) {
    out << to_json(report).dump() << '\n';
  } else {
    for (const auto& s : report.suites) {
      out << to_string(s.suite) << ": " << s.passed << "/" << (s.passed + s.failed) << " passed, " << s.checks
          << " checks, " << s.seconds << " s\n";
      if (s.first_failure) {
        const auto& f = s.first_failure->shrunk;
        out << "  first failure (case " << f.case_index << ", shrunk in " << s.first_failure->shrink_steps
            << " steps): " << f.message << '\n'
            << "  formula: " << print_formula(f.formula) << '\n'
            << "  model: " << to_json(f.model).dump() << '\n';
        if (f.events) out << "  events: " << to_json(*f.events).dump() << '\n';
        if (f.announced) out << "  announced: " << print_formula(*f.announced) << '\n';
        if (!f.lhs.empty() || !f.rhs.empty()) out << "  " << f.lhs << " vs " << f.rhs << '\n';
      }
    }
    if (report.blowup.samples > 0) {
      out << "translation size ratio: mean " << report.blowup.mean_size_ratio << ", max "
          << report.blowup.max_size_ratio << "; output quantifiers: mean " << report.blowup.mean_output_eps
          << ", max " << report.blowup.max_output_eps << '\n';
    }
  }
  return report.ok() ? Success : Failure;
}

}  // namespace

ExitStatus status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NominalOutsideProductContext:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::UnknownEvent:
    case ErrorCode::InputNotSentenceFragment:
    case ErrorCode::NotABisimulation:
      return Failure;
    default:
      return Usage;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model checking and translation for modal logic with product update", "produpd"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--json", common.json, "Machine-readable JSON output");

  std::string formula, model, events, world, event, model2, world2;
  bool simplify_out = false;

  auto* parse = app.add_subcommand("parse", "Parse a formula and print its normal rendering");
  parse->add_option("--formula,formula", formula, "Formula text or @file")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a formula on a model");
  eval->add_option("--model", model, "Model JSON file")->required();
  eval->add_option("--formula", formula, "Formula text or @file")->required();
  eval->add_option("--world", world, "Report the truth value at this world");
  eval->add_option("--events", events, "Event model JSON file for action modalities");

  auto* product = app.add_subcommand("product", "Print the product of a model and an event model");
  product->add_option("--model", model, "Model JSON file")->required();
  product->add_option("--events", events, "Event model JSON file")->required();

  auto* announce = app.add_subcommand("announce", "Print the model restricted to the worlds satisfying a formula");
  announce->add_option("--model", model, "Model JSON file")->required();
  announce->add_option("--formula", formula, "Formula text or @file")->required();

  auto* translate = app.add_subcommand("translate", "Eliminate dynamic modalities from a formula");
  translate->add_option("--events", events, "Event model JSON file");
  translate->add_option("--event", event, "Translate <event> formula");
  translate->add_option("--formula", formula, "Formula text or @file")->required();
  translate->add_flag("--simplify", simplify_out, "Fold Boolean constants in the output");

  auto* bisim = app.add_subcommand("bisim", "Decide bisimilarity of two pointed models");
  bisim->add_option("--model1", model, "First model JSON file")->required();
  bisim->add_option("--world1", world, "Point of the first model")->required();
  bisim->add_option("--model2", model2, "Second model JSON file")->required();
  bisim->add_option("--world2", world2, "Point of the second model")->required();

  FuzzConfig cfg;
  std::string suites;
  auto* fuzz = app.add_subcommand("fuzz", "Run the randomized oracle suites");
  fuzz->add_option("--seed", cfg.seed, "Random seed");
  fuzz->add_option("--cases", cfg.cases, "Cases per suite");
  fuzz->add_option("--max-worlds", cfg.max_worlds, "Largest generated model");
  fuzz->add_option("--max-events", cfg.max_events, "Largest generated event model");
  fuzz->add_option("--max-props", cfg.max_props, "Number of proposition letters");
  fuzz->add_option("--max-formula-size", cfg.max_formula_size, "Largest generated formula");
  fuzz->add_option("--max-eps", cfg.max_eps, "Most quantifiers per formula");
  fuzz->add_option("--edge-probability", cfg.edge_probability, "Probability of each edge");
  fuzz->add_option("--suites", suites,
                   "Comma-separated subset of translation,announcement,nominals,fixpoint,bisim_lift,degree");
  for (auto* sub : app.get_subcommands({})) sub->add_flag("--json", common.json, "Machine-readable JSON output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Success : Usage;
  }

  try {
    if (*parse) return cmd_parse(formula, common, out);
    if (*eval) return cmd_eval(model, formula, world, events, common, out);
    if (*product) return cmd_product(model, events, common, out);
    if (*announce) return cmd_announce(model, formula, common, out);
    if (*translate) return cmd_translate(events, event, formula, simplify_out, common, out);
    if (*bisim) return cmd_bisim(model, world, model2, world2, common, out);
    if (*fuzz) return cmd_fuzz(cfg, suites, common, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (!e.expected().empty()) {
      err << "; expected one of:";
      for (const auto& x : e.expected()) err << ' ' << x;
    }
    err << '\n';
    return Usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return status_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Failure;
  }
  return Usage;
}

}  // namespace produpd::cli
