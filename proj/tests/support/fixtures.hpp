#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "produpd/harness.hpp"
#include "produpd/model.hpp"
#include "produpd/parser.hpp"

namespace fixtures {

inline produpd::Formula f(const std::string& text) {
  produpd::ParseOptions opts;
  opts.allow_reserved = true;
  return produpd::parse_formula(text, opts);
}

inline produpd::KripkeModel model(const std::string& json) { return produpd::parse_model(json); }
inline produpd::EventModel events(const std::string& json) { return produpd::parse_event_model(json); }

inline produpd::WorldSet worlds(const produpd::KripkeModel& m, std::initializer_list<const char*> names) {
  produpd::WorldSet s = m.none();
  for (const char* n : names) s.set(m.require(n));
  return s;
}

/// ({w0,w1}, {(w0,w1),(w1,w1)}, V(p)={w0}) with events a0 (pre p) and a1
/// (pre true), a0 seeing a0 and a1, a1 seeing a1.
inline produpd::KripkeModel product_example_model() {
  return model(R"({"worlds":["w0","w1"],"rel":[["w0","w1"],["w1","w1"]],"val":{"p":["w0"]}})");
}
inline produpd::EventModel product_example_events() {
  return events(R"({"events":["a0","a1"],"rel":[["a0","a0"],["a0","a1"],["a1","a1"]],"pre":{"a0":"p","a1":"true"}})");
}

/// Random formulas from the harness generator under a fixed seed.
inline std::vector<produpd::Formula> sample(std::size_t count, const produpd::FormulaShape& shape,
                                            std::uint64_t seed = 7, const produpd::EventModel* events = nullptr,
                                            std::vector<produpd::PropName> props = {"p", "q", "r"}) {
  std::vector<produpd::Formula> out;
  for (std::size_t i = 0; i < count; ++i) {
    produpd::Rng rng(seed, i, "fixture");
    out.push_back(produpd::random_shaped_formula(rng, props, shape, events));
  }
  return out;
}

inline std::vector<produpd::KripkeModel> sample_models(std::size_t count, std::size_t max_worlds,
                                                       std::uint64_t seed = 11) {
  produpd::FuzzConfig cfg;
  cfg.seed = seed;
  std::vector<produpd::KripkeModel> out;
  for (std::size_t i = 0; i < count; ++i) {
    produpd::Rng rng(seed, i, "fixture-model");
    out.push_back(produpd::random_model(cfg, rng, max_worlds));
  }
  return out;
}

}  // namespace fixtures
