#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <utility>

#include "awareplan/errors.hpp"
#include "awareplan/pddl.hpp"

namespace awareplan {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class TokKind { lparen, rparen, symbol, annotation, end };

struct Token {
  TokKind kind;
  std::string text;  // symbol text or annotation payload
  int line;
  int column;
};

// Features recognized but outside the supported subset; reported by name.
const std::set<std::string> kUnsupportedSymbols = {
    "forall", "exists", "when", "or", "imply", "either", "=",
    "increase", "decrease", "assign", "scale-up", "scale-down",
};

const std::set<std::string> kUnsupportedSections = {
    ":constants",        ":functions",      ":durative-action", ":derived",
    ":constraints",      ":metric",         ":axiom",
};

const std::set<std::string> kSupportedRequirements = {
    ":strips", ":typing", ":negative-preconditions"};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_whitespace();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == ';') {
        lex_comment(tokens);
        continue;
      }
      if (c == '(') {
        tokens.push_back({TokKind::lparen, "(", line_, col_});
        advance();
        continue;
      }
      if (c == ')') {
        tokens.push_back({TokKind::rparen, ")", line_, col_});
        advance();
        continue;
      }
      lex_symbol(tokens);
    }
    tokens.push_back({TokKind::end, "", line_, col_});
    return tokens;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_whitespace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  void lex_comment(std::vector<Token>& tokens) {
    const int line = line_;
    const int col = col_;
    std::string body;
    while (pos_ < text_.size() && text_[pos_] != '\n') {
      body += text_[pos_];
      advance();
    }
    // Strip leading ';' and spaces; partition markers become tokens, other
    // comments are trivia.
    size_t start = 0;
    while (start < body.size() && (body[start] == ';' || body[start] == ' ')) ++start;
    const std::string payload = body.substr(start);
    if (payload.rfind("partition ", 0) == 0) {
      tokens.push_back({TokKind::annotation, payload, line, col});
    }
  }

  void lex_symbol(std::vector<Token>& tokens) {
    const int line = line_;
    const int col = col_;
    std::string sym;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      if (static_cast<unsigned char>(c) > 127) {
        throw LexError("illegal character in symbol at " + std::to_string(line) + ":" +
                       std::to_string(col));
      }
      sym += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      advance();
    }
    tokens.push_back({TokKind::symbol, sym, line, col});
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(Lexer(text).run()) {}

  DomainSpec domain() {
    DomainSpec d;
    expect(TokKind::lparen);
    expect_symbol("define");
    expect(TokKind::lparen);
    expect_symbol("domain");
    d.name = symbol("domain name");
    expect(TokKind::rparen);

    while (!at(TokKind::rparen)) {
      expect(TokKind::lparen);
      const Token section = peek();
      const std::string name = symbol("section keyword");
      if (kUnsupportedSections.count(name) > 0) {
        throw UnsupportedFeature("unsupported PDDL feature '" + name + "'");
      }
      if (name == ":requirements") {
        parse_requirements();
      } else if (name == ":types") {
        parse_types(d);
      } else if (name == ":predicates") {
        parse_predicates(d);
      } else if (name == ":action") {
        parse_action(d);
      } else {
        throw ParseError("unknown domain section '" + name + "'", section.line, section.column);
      }
    }
    expect(TokKind::rparen);
    expect(TokKind::end);

    const auto violations = validate_domain_elements(d.elements());
    if (!violations.empty()) {
      std::string joined;
      for (const auto& v : violations) joined += (joined.empty() ? "" : "; ") + v;
      throw ParseError("domain is inconsistent: " + joined, 1, 1);
    }
    return d;
  }

  ProblemSpec problem() {
    ProblemSpec p;
    expect(TokKind::lparen);
    expect_symbol("define");
    expect(TokKind::lparen);
    expect_symbol("problem");
    p.name = symbol("problem name");
    expect(TokKind::rparen);

    bool saw_goal = false;
    while (!at(TokKind::rparen)) {
      expect(TokKind::lparen);
      const Token section = peek();
      const std::string name = symbol("section keyword");
      if (kUnsupportedSections.count(name) > 0) {
        throw UnsupportedFeature("unsupported PDDL feature '" + name + "'");
      }
      if (name == ":domain") {
        p.domain_name = symbol("domain name");
        expect(TokKind::rparen);
      } else if (name == ":objects") {
        parse_objects(p);
      } else if (name == ":init") {
        parse_init(p);
      } else if (name == ":goal") {
        parse_goal(p);
        saw_goal = true;
      } else {
        throw ParseError("unknown problem section '" + name + "'", section.line, section.column);
      }
    }
    expect(TokKind::rparen);
    expect(TokKind::end);

    if (!saw_goal) p.goals.push_back({"", PartitionKind::robot, {}});
    // Exactly one robot partition; unattributed external goals land there.
    if (std::none_of(p.goals.begin(), p.goals.end(),
                     [](const GoalPartition& g) { return g.kind == PartitionKind::robot; })) {
      p.goals.insert(p.goals.begin(), {"", PartitionKind::robot, {}});
    }
    return p;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  Token next() { return tokens_[pos_++]; }

  bool at(TokKind kind) const { return peek().kind == kind; }

  void expect(TokKind kind) {
    const Token& t = peek();
    if (t.kind != kind) {
      const char* what = kind == TokKind::lparen   ? "'('"
                         : kind == TokKind::rparen ? "')'"
                                                   : "token";
      throw ParseError(std::string("expected ") + what + ", got '" +
                           (t.kind == TokKind::end ? "<end of input>" : t.text) + "'",
                       t.line, t.column);
    }
    ++pos_;
  }

  std::string symbol(const char* what) {
    const Token& t = peek();
    if (t.kind != TokKind::symbol) {
      throw ParseError(std::string("expected ") + what, t.line, t.column);
    }
    ++pos_;
    return t.text;
  }

  void expect_symbol(const std::string& sym) {
    const Token& t = peek();
    if (t.kind != TokKind::symbol || t.text != sym) {
      throw ParseError("expected '" + sym + "'", t.line, t.column);
    }
    ++pos_;
  }

  void parse_requirements() {
    while (!at(TokKind::rparen)) {
      const Token& t = peek();
      const std::string req = symbol("requirement");
      if (kSupportedRequirements.count(req) == 0) {
        throw UnsupportedFeature("unsupported requirement '" + req + "' at " +
                                 std::to_string(t.line) + ":" + std::to_string(t.column));
      }
    }
    expect(TokKind::rparen);
  }

  // name... [- parent] groups until ')'. Callback receives (name, type).
  template <typename F>
  void parse_typed_list(F&& add, const char* what) {
    std::vector<std::string> pending;
    while (!at(TokKind::rparen)) {
      std::string sym = symbol(what);
      if (sym == "-") {
        const std::string type = symbol("type name");
        for (const auto& n : pending) add(n, type);
        pending.clear();
      } else {
        pending.push_back(std::move(sym));
      }
    }
    for (const auto& n : pending) add(n, "object");
    expect(TokKind::rparen);
  }

  void parse_types(DomainSpec& d) {
    parse_typed_list([&](const std::string& name, const std::string& type) {
      d.types.parent[name] = type;
    }, "type name");
  }

  std::vector<Param> parse_params() {
    std::vector<Param> params;
    expect(TokKind::lparen);
    parse_typed_list([&](const std::string& name, const std::string& type) {
      std::string bare = name;
      if (!bare.empty() && bare[0] == '?') bare.erase(bare.begin());
      params.push_back({bare, type});
    }, "parameter");
    return params;
  }

  void parse_predicates(DomainSpec& d) {
    while (!at(TokKind::rparen)) {
      expect(TokKind::lparen);
      PredicateSignature sig;
      sig.name = symbol("predicate name");
      parse_typed_list([&](const std::string& name, const std::string& type) {
        std::string bare = name;
        if (!bare.empty() && bare[0] == '?') bare.erase(bare.begin());
        sig.params.push_back({bare, type});
      }, "parameter");
      d.predicates.push_back(std::move(sig));
    }
    expect(TokKind::rparen);
  }

  Literal parse_condition_literal() {
    const Token open = peek();
    expect(TokKind::lparen);
    std::string head = symbol("predicate or 'not'");
    Literal lit;
    if (head == "not") {
      lit.negated = true;
      expect(TokKind::lparen);
      head = symbol("predicate name");
    }
    if (kUnsupportedSymbols.count(head) > 0) {
      throw UnsupportedFeature("unsupported PDDL feature '" + head + "' at " +
                               std::to_string(open.line) + ":" + std::to_string(open.column));
    }
    lit.predicate = head;
    while (!at(TokKind::rparen)) {
      std::string arg = symbol("argument");
      if (!arg.empty() && arg[0] == '?') arg.erase(arg.begin());
      lit.args.push_back(std::move(arg));
    }
    expect(TokKind::rparen);
    if (lit.negated) expect(TokKind::rparen);
    return lit;
  }

  // (and lit...) or a bare literal. Annotations inside the form are passed
  // to on_annotation when provided.
  template <typename F>
  std::vector<Literal> parse_conjunction(F&& on_annotation) {
    std::vector<Literal> lits;
    const Token open = peek();
    expect(TokKind::lparen);
    if (at(TokKind::symbol) && peek().text == "and") {
      next();
      while (!at(TokKind::rparen)) {
        if (at(TokKind::annotation)) {
          on_annotation(next().text);
          continue;
        }
        lits.push_back(parse_condition_literal());
      }
      expect(TokKind::rparen);
      return lits;
    }
    // bare literal: rewind the '(' and parse one literal
    --pos_;
    (void)open;
    lits.push_back(parse_condition_literal());
    return lits;
  }

  void parse_action(DomainSpec& d) {
    ActionSchema a;
    a.name = symbol("action name");
    while (!at(TokKind::rparen)) {
      if (at(TokKind::annotation)) {
        next();
        continue;
      }
      const Token key = peek();
      const std::string section = symbol("action keyword");
      if (section == ":parameters") {
        a.params = parse_params();
      } else if (section == ":precondition") {
        a.preconditions = parse_conjunction([](const std::string&) {});
      } else if (section == ":effect") {
        for (auto& lit : parse_conjunction([](const std::string&) {})) {
          if (lit.negated) {
            lit.negated = false;
            a.del_effects.push_back(std::move(lit));
          } else {
            a.add_effects.push_back(std::move(lit));
          }
        }
      } else {
        throw ParseError("unknown action keyword '" + section + "'", key.line, key.column);
      }
    }
    expect(TokKind::rparen);
    d.actions.push_back(std::move(a));
  }

  void parse_objects(ProblemSpec& p) {
    parse_typed_list([&](const std::string& name, const std::string& type) {
      p.objects[name] = type;
    }, "object name");
  }

  void parse_init(ProblemSpec& p) {
    while (!at(TokKind::rparen)) {
      const Token open = peek();
      Literal lit = parse_condition_literal();
      if (lit.negated) {
        throw UnsupportedFeature("negative init literals are not supported (closed world), at " +
                                 std::to_string(open.line) + ":" + std::to_string(open.column));
      }
      p.init.push_back({lit.predicate, lit.args});
    }
    expect(TokKind::rparen);
  }

  static GoalPartition partition_from_marker(const std::string& payload) {
    // "partition <agent-id> <robot|human>" or "partition <robot|human>"
    std::vector<std::string> words;
    std::string cur;
    for (char c : payload) {
      if (c == ' ' || c == '\t') {
        if (!cur.empty()) words.push_back(std::exchange(cur, {}));
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) words.push_back(cur);
    GoalPartition g;
    if (words.size() >= 3) {
      g.agent_id = words[1];
      g.kind = words[2] == "robot" ? PartitionKind::robot : PartitionKind::human;
    } else if (words.size() == 2) {
      g.kind = words[1] == "robot" ? PartitionKind::robot : PartitionKind::human;
    }
    return g;
  }

  void parse_goal(ProblemSpec& p) {
    expect(TokKind::lparen);
    if (at(TokKind::symbol) && peek().text == "and") {
      next();
      // Partition markers switch which agent the following literals belong
      // to; unattributed literals land in an anonymous robot partition.
      size_t current = SIZE_MAX;
      while (!at(TokKind::rparen)) {
        if (at(TokKind::annotation)) {
          p.goals.push_back(partition_from_marker(next().text));
          current = p.goals.size() - 1;
          continue;
        }
        const Token open = peek();
        Literal lit = parse_condition_literal();
        if (lit.negated) {
          throw UnsupportedFeature("negative goal literals are not supported, at " +
                                   std::to_string(open.line) + ":" +
                                   std::to_string(open.column));
        }
        if (current == SIZE_MAX) {
          p.goals.push_back({"", PartitionKind::robot, {}});
          current = p.goals.size() - 1;
        }
        p.goals[current].literals.push_back({lit.predicate, lit.args});
      }
      expect(TokKind::rparen);
    } else {
      --pos_;  // rewind to '(' of a bare literal
      Literal lit = parse_condition_literal();
      if (lit.negated) throw UnsupportedFeature("negative goal literals are not supported");
      p.goals.push_back({"", PartitionKind::robot, {{lit.predicate, lit.args}}});
    }
    expect(TokKind::rparen);
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

}  // namespace

DomainSpec parse_domain(const std::string& text) { return Parser(text).domain(); }

ProblemSpec parse_problem(const std::string& text) { return Parser(text).problem(); }

}  // namespace awareplan
