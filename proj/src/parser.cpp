#include "produpd/parser.hpp"

#include <cctype>
#include <optional>

#include "produpd/error.hpp"

namespace produpd {

namespace {

enum class Tok {
  Ident,
  Nominal,
  Exists,
  Forall,
  Nu,
  True,
  False,
  Global,
  ExistsGlobal,
  LParen,
  RParen,
  Dot,
  Tilde,
  BoxOp,
  DiamondOp,
  LAngle,
  RAngle,
  LAnnounceBox,
  LAnnounceDiamond,
  RBracket,
  AndOp,
  OrOp,
  Arrow,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Nominal: return "nominal";
    case Tok::Exists: return "'exists'";
    case Tok::Forall: return "'forall'";
    case Tok::Nu: return "'nu'";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::Global: return "'U'";
    case Tok::ExistsGlobal: return "'E'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Dot: return "'.'";
    case Tok::Tilde: return "'~'";
    case Tok::BoxOp: return "'[]'";
    case Tok::DiamondOp: return "'<>'";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::LAnnounceBox: return "'[!'";
    case Tok::LAnnounceDiamond: return "'<!'";
    case Tok::RBracket: return "']'";
    case Tok::AndOp: return "'&'";
    case Tok::OrOp: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
  }
  return "?";
}

bool is_nominal_word(std::string_view w) {
  if (w.size() < 2 || w.front() != 'j') return false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(w[i]))) return false;
  }
  return true;
}

class Lexer {
 public:
  Lexer(std::string_view text, const ParseOptions& options) : text_(text), options_(options) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      const std::size_t start = pos_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", span(start)});
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(word());
        continue;
      }
      const char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
      auto emit = [&](Tok t, std::size_t len) {
        pos_ += len;
        out.push_back({t, std::string(text_.substr(start, len)), span(start)});
      };
      switch (c) {
        case '(': emit(Tok::LParen, 1); break;
        case ')': emit(Tok::RParen, 1); break;
        case '.': emit(Tok::Dot, 1); break;
        case '~': emit(Tok::Tilde, 1); break;
        case '&': emit(Tok::AndOp, 1); break;
        case '|': emit(Tok::OrOp, 1); break;
        case '>': emit(Tok::RAngle, 1); break;
        case ']': emit(Tok::RBracket, 1); break;
        case '[':
          if (next == ']') {
            emit(Tok::BoxOp, 2);
          } else if (next == '!') {
            emit(Tok::LAnnounceBox, 2);
          } else {
            fail(start, 1, "unexpected '['", {"'[]'", "'[!'"});
          }
          break;
        case '<':
          if (next == '>') {
            emit(Tok::DiamondOp, 2);
          } else if (next == '!') {
            emit(Tok::LAnnounceDiamond, 2);
          } else {
            emit(Tok::LAngle, 1);
          }
          break;
        case '-':
          if (next != '>') fail(start, 1, "unexpected '-'", {"'->'"});
          emit(Tok::Arrow, 2);
          break;
        default:
          fail(start, 1, std::string("unexpected character '") + c + "'", {});
      }
    }
  }

 private:
  SourceSpan span(std::size_t start) const { return SourceSpan{start, pos_, line_at(start)}; }

  std::size_t line_at(std::size_t offset) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') ++line;
    }
    return line;
  }

  [[noreturn]] void fail(std::size_t start, std::size_t len, const std::string& message,
                         std::vector<std::string> expected) const {
    throw ParseError(message, SourceSpan{start, start + len, line_at(start)}, std::move(expected));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Token word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string w(text_.substr(start, pos_ - start));
    const SourceSpan s = span(start);
    if (w == "exists") return {Tok::Exists, w, s};
    if (w == "forall") return {Tok::Forall, w, s};
    if (w == "nu") return {Tok::Nu, w, s};
    if (w == "true") return {Tok::True, w, s};
    if (w == "false") return {Tok::False, w, s};
    if (w == "U") return {Tok::Global, w, s};
    if (w == "E") return {Tok::ExistsGlobal, w, s};
    if (is_nominal_word(w)) return {Tok::Nominal, w, s};
    if (w.front() == '_') {
      if (!options_.allow_reserved) {
        fail(start, w.size(), "names starting with '_' are reserved for generated propositions", {"identifier"});
      }
      return {Tok::Ident, w, s};
    }
    if (!std::islower(static_cast<unsigned char>(w.front()))) {
      fail(start, w.size(), "unknown word '" + w + "'", {"identifier", "'U'", "'E'"});
    }
    return {Tok::Ident, w, s};
  }

  std::string_view text_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
};

const std::vector<std::string>& unary_starts() {
  static const std::vector<std::string> starts = {
      "'~'", "'[]'", "'<>'", "'U'", "'E'", "'<'", "'[!'", "'<!'", "'true'", "'false'", "identifier", "nominal", "'('"};
  return starts;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse() {
    Formula f = formula();
    expect(Tok::End);
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok t) const { return peek().kind == t; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("unexpected " + found, t.span, std::move(expected));
  }

  const Token& expect(Tok t) {
    if (!at(t)) fail({describe(t)});
    return advance();
  }

  Formula formula() {
    if (at(Tok::Exists) || at(Tok::Forall) || at(Tok::Nu)) {
      const Tok q = advance().kind;
      const std::string var = expect(Tok::Ident).text;
      expect(Tok::Dot);
      Formula body = formula();
      if (q == Tok::Exists) return Formula::exists(var, std::move(body));
      if (q == Tok::Forall) return Formula::forall(var, std::move(body));
      return Formula::nu(var, std::move(body));
    }
    return implied();
  }

  Formula implied() {
    Formula left = ored();
    if (at(Tok::Arrow)) {
      advance();
      return Formula::implies(std::move(left), implied());
    }
    return left;
  }

  Formula ored() {
    Formula acc = anded();
    while (at(Tok::OrOp)) {
      advance();
      acc = Formula::disj(std::move(acc), anded());
    }
    return acc;
  }

  Formula anded() {
    Formula acc = unary();
    while (at(Tok::AndOp)) {
      advance();
      acc = Formula::conj(std::move(acc), unary());
    }
    return acc;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Tilde:
        advance();
        return Formula::negate(unary());
      case Tok::BoxOp:
        advance();
        return Formula::box(unary());
      case Tok::DiamondOp:
        advance();
        return Formula::diamond(unary());
      case Tok::Global:
        advance();
        return Formula::global(unary());
      case Tok::ExistsGlobal:
        advance();
        return Formula::exists_global(unary());
      case Tok::LAngle: {
        advance();
        const std::string event = expect(Tok::Ident).text;
        expect(Tok::RAngle);
        return Formula::action(event, unary());
      }
      case Tok::LAnnounceDiamond: {
        advance();
        Formula announced = formula();
        expect(Tok::RAngle);
        return Formula::announce(std::move(announced), unary());
      }
      case Tok::LAnnounceBox: {
        advance();
        Formula announced = formula();
        expect(Tok::RBracket);
        return Formula::negate(Formula::announce(std::move(announced), Formula::negate(unary())));
      }
      default:
        return atom();
    }
  }

  Formula atom() {
    switch (peek().kind) {
      case Tok::True:
        advance();
        return Formula::top();
      case Tok::False:
        advance();
        return Formula::bottom();
      case Tok::Ident:
        return Formula::atom(advance().text);
      case Tok::Nominal:
        return Formula::nominal(std::stoul(advance().text.substr(1)));
      case Tok::LParen: {
        advance();
        Formula f = formula();
        expect(Tok::RParen);
        return f;
      }
      default:
        fail(unary_starts());
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void print(const Formula& f, std::string& out, bool operand);

void print_unary(const char* op, const Formula& f, std::string& out) {
  out += op;
  print(f.operand(), out, true);
}

void print(const Formula& f, std::string& out, bool operand) {
  switch (f.kind()) {
    case Connective::Top: out += "true"; return;
    case Connective::Bottom: out += "false"; return;
    case Connective::Atom: out += f.name(); return;
    case Connective::Nominal: out += "j" + std::to_string(f.nominal_index()); return;
    case Connective::Not: print_unary("~", f, out); return;
    case Connective::Box: print_unary("[] ", f, out); return;
    case Connective::Diamond: print_unary("<> ", f, out); return;
    case Connective::Global: print_unary("U ", f, out); return;
    case Connective::ExistsGlobal: print_unary("E ", f, out); return;
    case Connective::Action:
      out += "<" + f.name() + "> ";
      print(f.operand(), out, true);
      return;
    case Connective::Announce:
      out += "<!";
      print(f.announced(), out, false);
      out += "> ";
      print(f.operand(), out, true);
      return;
    case Connective::And:
    case Connective::Or:
    case Connective::Implies: {
      const char* op = f.is(Connective::And) ? " & " : f.is(Connective::Or) ? " | " : " -> ";
      out += '(';
      print(f.left(), out, true);
      out += op;
      print(f.right(), out, true);
      out += ')';
      return;
    }
    case Connective::Exists:
    case Connective::Forall:
    case Connective::Nu: {
      const char* kw = f.is(Connective::Exists) ? "exists " : f.is(Connective::Forall) ? "forall " : "nu ";
      if (operand) out += '(';
      out += kw + f.name() + ". ";
      print(f.operand(), out, false);
      if (operand) out += ')';
      return;
    }
  }
}

}  // namespace

bool is_identifier(std::string_view name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name.front()))) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  if (is_nominal_word(name)) return false;
  return name != "exists" && name != "forall" && name != "nu" && name != "true" && name != "false";
}

Formula parse_formula(std::string_view text, const ParseOptions& options) {
  Lexer lexer(text, options);
  Parser parser(lexer.run());
  Formula f = parser.parse();
  check_positivity(f);
  return f;
}

std::string print_formula(const Formula& phi) {
  std::string out;
  print(phi, out, false);
  return out;
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw ParseError(what, SourceSpan{}); }

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), SourceSpan{e.byte, e.byte, 1});
  }
}

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) malformed("'" + field + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) malformed("'" + field + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> pair_list(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) malformed("'" + field + "' must be an array of pairs");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
      malformed("'" + field + "' entries must be [string, string] pairs");
    }
    out.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
  }
  return out;
}

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.is_object()) malformed("expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) malformed(std::string("missing field '") + name + "'");
  return *it;
}

}  // namespace

KripkeModel model_from_json(const nlohmann::json& j) {
  auto worlds = string_list(field(j, "worlds"), "worlds");
  if (worlds.empty()) throw Error(ErrorCode::EmptyDomain, "a model needs at least one world");
  const auto rel = pair_list(field(j, "rel"), "rel");
  const auto& val_json = field(j, "val");
  if (!val_json.is_object()) malformed("'val' must be an object");
  std::map<PropName, std::vector<WorldId>> val;
  for (const auto& [prop, ws] : val_json.items()) {
    if (!is_identifier(prop)) malformed("'" + prop + "' is not a valid proposition name");
    val.emplace(prop, string_list(ws, "val." + prop));
  }
  return KripkeModel::from_names(std::move(worlds), rel, val);
}

EventModel event_model_from_json(const nlohmann::json& j) {
  auto events = string_list(field(j, "events"), "events");
  if (events.empty()) throw Error(ErrorCode::EmptyEventSet, "an event model needs at least one event");
  for (const auto& e : events) {
    if (!is_identifier(e)) malformed("'" + e + "' is not a valid event name");
  }
  const auto rel = pair_list(field(j, "rel"), "rel");
  const auto& pre_json = field(j, "pre");
  if (!pre_json.is_object()) malformed("'pre' must be an object");
  std::map<EventId, Formula> pre;
  for (const auto& [event, text] : pre_json.items()) {
    if (!text.is_string()) malformed("precondition of '" + event + "' must be a formula string");
    Formula f = parse_formula(text.get<std::string>());
    if (classify(f) != LanguageTag::BaseMso) {
      throw Error(ErrorCode::PreconditionNotBaseMso, "precondition of '" + event + "' must be a static formula");
    }
    pre.emplace(event, std::move(f));
  }
  return EventModel::from_names(std::move(events), rel, pre);
}

KripkeModel parse_model(std::string_view json_text) { return model_from_json(parse_json(json_text)); }

EventModel parse_event_model(std::string_view json_text) { return event_model_from_json(parse_json(json_text)); }

nlohmann::json to_json(const KripkeModel& m) {
  nlohmann::json rel = nlohmann::json::array();
  for (const auto& [from, to] : m.edges()) rel.push_back({m.world(from), m.world(to)});
  nlohmann::json val = nlohmann::json::object();
  for (const auto& [p, set] : m.valuation()) {
    nlohmann::json ws = nlohmann::json::array();
    set.for_each([&](std::size_t i) { ws.push_back(m.world(i)); });
    val[p] = std::move(ws);
  }
  return {{"worlds", m.worlds()}, {"rel", std::move(rel)}, {"val", std::move(val)}};
}

nlohmann::json to_json(const EventModel& a) {
  nlohmann::json rel = nlohmann::json::array();
  for (const auto& [from, to] : a.edges()) rel.push_back({a.event(from), a.event(to)});
  nlohmann::json pre = nlohmann::json::object();
  for (std::size_t i = 0; i < a.size(); ++i) pre[a.event(i)] = print_formula(a.pre(i));
  return {{"events", a.events()}, {"rel", std::move(rel)}, {"pre", std::move(pre)}};
}

nlohmann::json to_json(const TaggedModel& m, const EventModel& a) {
  nlohmann::json j = to_json(m.model);
  nlohmann::json tags = nlohmann::json::object();
  for (std::size_t i = 0; i < m.tags.size(); ++i) tags[m.model.world(i)] = a.event(m.tags[i]);
  j["tags"] = std::move(tags);
  return j;
}

}  // namespace produpd
