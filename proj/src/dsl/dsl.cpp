#include "psys/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace psys::dsl {

std::string format_diagnostic(const ParseDiagnostic& d, const std::string& origin) {
  std::ostringstream os;
  os << origin << ':' << d.line << ':' << d.column << ": "
     << (d.severity == Severity::error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

namespace {

enum class Tok { name, lbrack, rbrack, lbrace, rbrace, arrow, caret, semi, colon, at, gt, pol, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

struct SyntaxError {
  std::string message;
  int line;
  int column;
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::end, "", line_, col_});
        return out;
      }
      const int line = line_;
      const int col = col_;
      const char c = text_[pos_];
      auto single = [&](Tok k) {
        advance();
        out.push_back({k, std::string(1, c), line, col});
      };
      switch (c) {
        case '[': single(Tok::lbrack); continue;
        case ']': single(Tok::rbrack); continue;
        case '{': single(Tok::lbrace); continue;
        case '}': single(Tok::rbrace); continue;
        case '^': single(Tok::caret); continue;
        case ';': single(Tok::semi); continue;
        case ':': single(Tok::colon); continue;
        case '@': single(Tok::at); continue;
        case '>': single(Tok::gt); continue;
        default: break;
      }
      if (c == '-' && peek(1) == '>') {
        advance();
        advance();
        out.push_back({Tok::arrow, "->", line, col});
        continue;
      }
      if (c == '\'') {
        const char p = peek(1);
        if (p == '0' || p == '+' || p == '-') {
          advance();
          advance();
          out.push_back({Tok::pol, std::string(1, p), line, col});
          continue;
        }
        throw SyntaxError{"polarization must be '0, '+ or '-", line, col};
      }
      if (name_char(c)) {
        std::string name;
        while (pos_ < text_.size() && name_char(text_[pos_])) {
          name.push_back(text_[pos_]);
          advance();
        }
        name += index_suffix();
        out.push_back({Tok::name, name, line, col});
        continue;
      }
      throw SyntaxError{"unexpected character '" + printable(c) + "'", line, col};
    }
  }

 private:
  static std::string printable(char c) {
    if (std::isprint(static_cast<unsigned char>(c))) return std::string(1, c);
    std::ostringstream os;
    os << "\\x" << std::hex << (static_cast<unsigned>(static_cast<unsigned char>(c)));
    return os.str();
  }

  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  // Absorbs an immediately following "{1,2}" group into the name.
  std::string index_suffix() {
    if (peek(0) != '{') return {};
    std::size_t i = pos_ + 1;
    bool need_digit = true;
    while (i < text_.size()) {
      const char c = text_[i];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        need_digit = false;
      } else if (c == ',' && !need_digit) {
        need_digit = true;
      } else if (c == '}' && !need_digit) {
        std::string suffix = text_.substr(pos_, i + 1 - pos_);
        while (pos_ <= i) advance();
        return suffix;
      } else {
        return {};
      }
      ++i;
    }
    return {};
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Polarization to_polarization(const std::string& s) {
  if (s == "+") return Polarization::positive;
  if (s == "-") return Polarization::negative;
  return Polarization::neutral;
}

struct NamedMultiset {
  std::vector<std::pair<Token, Count>> items;
};

struct TreeNode {
  Token label;
  std::vector<TreeNode> children;
};

struct RuleDecl {
  Token id;
  RuleKind kind;
  NamedMultiset lhs, inside, outside;
  Polarization alpha, beta;
  Token label;
};

struct PriorityDecl {
  Token higher, lower;
  std::optional<Token> label;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ParseResult run() {
    try {
      while (cur().kind != Tok::end) statement();
    } catch (const SyntaxError& e) {
      diags_.push_back({Severity::error, e.message, e.line, e.column});
      return diags_;
    }
    return assemble();
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  Token expect(Tok kind, const char* what) {
    if (cur().kind != kind) {
      const Token& t = cur();
      std::string got = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
      throw SyntaxError{std::string("expected ") + what + ", found " + got, t.line, t.column};
    }
    return toks_[pos_++];
  }

  bool accept(Tok kind) {
    if (cur().kind != kind) return false;
    ++pos_;
    return true;
  }

  void statement() {
    Token kw = expect(Tok::name, "a statement keyword");
    if (kw.text == "alphabet") {
      expect(Tok::lbrace, "'{'");
      while (cur().kind == Tok::name) alphabet_.push_back(toks_[pos_++]);
      expect(Tok::rbrace, "'}'");
    } else if (kw.text == "membranes") {
      if (tree_) throw SyntaxError{"membrane structure declared twice", kw.line, kw.column};
      tree_ = tree();
    } else if (kw.text == "contents") {
      Token label = expect(Tok::name, "a membrane label");
      expect(Tok::lbrace, "'{'");
      NamedMultiset ms = multiset();
      expect(Tok::rbrace, "'}'");
      contents_.emplace_back(label, std::move(ms));
    } else if (kw.text == "output") {
      if (output_) throw SyntaxError{"output declared twice", kw.line, kw.column};
      output_ = expect(Tok::name, "a membrane label or 'environment'");
    } else if (kw.text == "rule") {
      rule();
    } else if (kw.text == "priority") {
      PriorityDecl p;
      p.higher = expect(Tok::name, "a rule id");
      expect(Tok::gt, "'>'");
      p.lower = expect(Tok::name, "a rule id");
      if (accept(Tok::at)) p.label = expect(Tok::name, "a membrane label");
      priorities_.push_back(std::move(p));
    } else {
      throw SyntaxError{"unknown statement '" + kw.text + "'", kw.line, kw.column};
    }
    expect(Tok::semi, "';'");
  }

  TreeNode tree() {
    expect(Tok::lbrack, "'['");
    TreeNode node{expect(Tok::name, "a membrane label"), {}};
    while (cur().kind == Tok::lbrack) node.children.push_back(tree());
    expect(Tok::rbrack, "']'");
    return node;
  }

  Count exponent() {
    Token t = expect(Tok::name, "a multiplicity");
    if (t.text.empty() || !std::all_of(t.text.begin(), t.text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw SyntaxError{"multiplicity must be a decimal integer", t.line, t.column};
    }
    try {
      Count n = parse_count(t.text);
      if (n == 0) throw SyntaxError{"multiplicity must be positive", t.line, t.column};
      return n;
    } catch (const OverflowError&) {
      throw SyntaxError{"multiplicity exceeds 128 bits", t.line, t.column};
    }
  }

  NamedMultiset multiset() {
    NamedMultiset ms;
    while (cur().kind == Tok::name) {
      Token sym = toks_[pos_++];
      Count n = 1;
      if (accept(Tok::caret)) n = exponent();
      ms.items.emplace_back(sym, n);
    }
    return ms;
  }

  Polarization pol() { return to_polarization(expect(Tok::pol, "a polarization ('0, '+ or '-)").text); }

  // v [w]'b
  void products(RuleDecl& r) {
    r.outside = multiset();
    expect(Tok::lbrack, "'['");
    r.inside = multiset();
    expect(Tok::rbrack, "']'");
    r.beta = pol();
  }

  void rule() {
    RuleDecl r;
    r.id = expect(Tok::name, "a rule id");
    expect(Tok::colon, "':'");
    if (accept(Tok::lbrack)) {
      r.lhs = multiset();
      if (accept(Tok::arrow)) {
        r.kind = RuleKind::evolution;
        r.inside = multiset();
        expect(Tok::rbrack, "']'");
        r.alpha = pol();
        r.beta = r.alpha;
      } else {
        r.kind = RuleKind::send_out;
        expect(Tok::rbrack, "']' or '->'");
        r.alpha = pol();
        expect(Tok::arrow, "'->'");
        products(r);
      }
    } else {
      r.kind = RuleKind::send_in;
      r.lhs = multiset();
      expect(Tok::lbrack, "'['");
      expect(Tok::rbrack, "']' (a send-in rule's membrane is written empty)");
      r.alpha = pol();
      expect(Tok::arrow, "'->'");
      products(r);
    }
    expect(Tok::at, "'@'");
    r.label = expect(Tok::name, "a membrane label");
    rules_.push_back(std::move(r));
  }

  void error_at(const Token& t, std::string message) {
    diags_.push_back({Severity::error, std::move(message), t.line, t.column});
  }

  void add_tree(PSystemDef& def, const TreeNode& node, std::optional<MembraneIndex> parent,
                std::set<std::string>& seen) {
    if (node.label.text == "environment") error_at(node.label, "'environment' is reserved and cannot label a membrane");
    if (!seen.insert(node.label.text).second) {
      error_at(node.label, "duplicate membrane label '" + node.label.text + "'");
      return;
    }
    MembraneIndex idx = parent ? def.add_membrane(node.label.text, *parent) : def.add_skin(node.label.text);
    for (const auto& c : node.children) add_tree(def, c, idx, seen);
  }

  std::optional<Multiset> resolve(const PSystemDef& def, const NamedMultiset& ms) {
    Multiset out;
    bool ok = true;
    for (const auto& [tok, n] : ms.items) {
      auto id = def.alphabet.find(tok.text);
      if (!id) {
        error_at(tok, "symbol '" + tok.text + "' is not declared in the alphabet");
        ok = false;
        continue;
      }
      try {
        out.add(*id, n);
      } catch (const OverflowError&) {
        error_at(tok, "multiplicity of '" + tok.text + "' exceeds 128 bits");
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  ParseResult assemble() {
    PSystemDef def;
    for (const auto& t : alphabet_) def.alphabet.intern(t.text);
    if (!tree_) {
      diags_.push_back({Severity::error, "missing 'membranes' declaration", cur().line, cur().column});
      return diags_;
    }
    std::set<std::string> seen;
    add_tree(def, *tree_, std::nullopt, seen);

    std::set<MembraneIndex> filled;
    for (const auto& [label, ms] : contents_) {
      auto m = def.find_membrane(label.text);
      if (!m) {
        error_at(label, "unknown membrane label '" + label.text + "'");
        continue;
      }
      if (!filled.insert(*m).second) error_at(label, "contents of '" + label.text + "' declared twice");
      if (auto resolved = resolve(def, ms)) def.initial[*m] = std::move(*resolved);
    }

    if (output_ && output_->text != "environment") {
      if (auto m = def.find_membrane(output_->text)) {
        def.output = *m;
      } else {
        error_at(*output_, "unknown output membrane '" + output_->text + "'");
      }
    }

    std::set<std::string> ids;
    for (const auto& r : rules_) {
      bool ok = true;
      if (!ids.insert(r.id.text).second) {
        error_at(r.id, "duplicate rule id '" + r.id.text + "'");
        ok = false;
      }
      auto m = def.find_membrane(r.label.text);
      if (!m) {
        error_at(r.label, "unknown membrane label '" + r.label.text + "'");
        ok = false;
      } else if (r.kind == RuleKind::send_in && *m == 0) {
        error_at(r.label, "send-in rule '" + r.id.text + "' cannot target the skin membrane");
        ok = false;
      }
      if (r.lhs.items.empty()) {
        error_at(r.id, "rule '" + r.id.text + "' has an empty left-hand side");
        ok = false;
      }
      auto lhs = resolve(def, r.lhs);
      auto inside = resolve(def, r.inside);
      auto outside = resolve(def, r.outside);
      if (!ok || !lhs || !inside || !outside) continue;
      def.add_rule(Rule{r.id.text, r.kind, *m, std::move(*lhs), std::move(*inside), std::move(*outside), r.alpha,
                        r.beta});
    }

    std::map<RuleIndex, std::set<RuleIndex>> succ;
    auto reaches = [&](RuleIndex from, RuleIndex to) {
      std::vector<RuleIndex> stack{from};
      std::set<RuleIndex> seen_rules;
      while (!stack.empty()) {
        RuleIndex x = stack.back();
        stack.pop_back();
        if (x == to) return true;
        if (!seen_rules.insert(x).second) continue;
        for (RuleIndex y : succ[x]) stack.push_back(y);
      }
      return false;
    };
    for (const auto& p : priorities_) {
      auto hi = def.find_rule(p.higher.text);
      auto lo = def.find_rule(p.lower.text);
      if (!hi) error_at(p.higher, "priority references unknown rule '" + p.higher.text + "'");
      if (!lo) error_at(p.lower, "priority references unknown rule '" + p.lower.text + "'");
      if (!hi || !lo) continue;
      if (p.label) {
        auto m = def.find_membrane(p.label->text);
        if (!m) {
          error_at(*p.label, "unknown membrane label '" + p.label->text + "'");
          continue;
        }
        if (def.rules[*hi].membrane != *m && def.rules[*lo].membrane != *m) {
          error_at(*p.label, "neither '" + p.higher.text + "' nor '" + p.lower.text + "' is attached to '" +
                                 p.label->text + "'");
          continue;
        }
      }
      if (*hi == *lo || reaches(*lo, *hi)) {
        error_at(p.higher, "cyclic priority between rules '" + p.higher.text + "' and '" + p.lower.text + "'");
        continue;
      }
      if (succ[*hi].insert(*lo).second) def.priorities.push_back({*hi, *lo});
    }

    if (!diags_.empty()) return diags_;
    for (const auto& problem : def.problems()) diags_.push_back({Severity::error, problem, 1, 1});
    if (!diags_.empty()) return diags_;
    return def;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseDiagnostic> diags_;
  std::vector<Token> alphabet_;
  std::optional<TreeNode> tree_;
  std::vector<std::pair<Token, NamedMultiset>> contents_;
  std::optional<Token> output_;
  std::vector<RuleDecl> rules_;
  std::vector<PriorityDecl> priorities_;
};

std::string sorted_multiset(const Multiset& m, const Alphabet& a) {
  std::vector<std::pair<std::string, Count>> items;
  for (const auto& [s, n] : m) items.emplace_back(a.name(s), n);
  std::sort(items.begin(), items.end());
  std::string out;
  for (const auto& [name, n] : items) {
    if (!out.empty()) out.push_back(' ');
    out += name;
    if (n != 1) out += "^" + to_string(n);
  }
  return out;
}

void write_tree(std::ostream& os, const PSystemDef& def, MembraneIndex m) {
  os << '[' << def.label(m);
  std::vector<MembraneIndex> kids = def.membranes[m].children;
  std::sort(kids.begin(), kids.end(), [&](MembraneIndex a, MembraneIndex b) { return def.label(a) < def.label(b); });
  for (MembraneIndex c : kids) {
    os << ' ';
    write_tree(os, def, c);
  }
  os << ']';
}

std::string spaced(const std::string& s) { return s.empty() ? s : s + " "; }

}  // namespace

ParseResult parse(const SourceDocument& doc) {
  std::vector<Token> tokens;
  try {
    tokens = Lexer(doc.text).run();
  } catch (const SyntaxError& e) {
    return std::vector<ParseDiagnostic>{{Severity::error, e.message, e.line, e.column}};
  }
  return Parser(std::move(tokens)).run();
}

PSystemDef parse_or_throw(const SourceDocument& doc) {
  auto result = parse(doc);
  if (auto* def = std::get_if<PSystemDef>(&result)) return std::move(*def);
  std::string msg;
  for (const auto& d : std::get<std::vector<ParseDiagnostic>>(result)) {
    if (!msg.empty()) msg.push_back('\n');
    msg += format_diagnostic(d, doc.origin);
  }
  throw DefinitionError(msg);
}

std::string serialize(const PSystemDef& def) {
  std::ostringstream os;
  std::vector<std::string> names = def.alphabet.names();
  std::sort(names.begin(), names.end());
  os << "alphabet {";
  for (const auto& n : names) os << ' ' << n;
  os << " };\n";

  os << "membranes ";
  write_tree(os, def, 0);
  os << ";\n";

  std::vector<MembraneIndex> order(def.membranes.size());
  for (MembraneIndex i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](MembraneIndex a, MembraneIndex b) { return def.label(a) < def.label(b); });
  for (MembraneIndex m : order) {
    if (def.initial[m].empty()) continue;
    os << "contents " << def.label(m) << " { " << sorted_multiset(def.initial[m], def.alphabet) << " };\n";
  }
  os << "output " << (def.output ? def.label(*def.output) : std::string("environment")) << ";\n";

  for (const auto& r : def.rules) {
    const std::string lhs = sorted_multiset(r.lhs, def.alphabet);
    const std::string in = sorted_multiset(r.inside, def.alphabet);
    const std::string out = sorted_multiset(r.outside, def.alphabet);
    os << "rule " << r.id << ": ";
    switch (r.kind) {
      case RuleKind::evolution:
        os << '[' << lhs << " ->" << (in.empty() ? "" : " " + in) << "]'" << polarization_char(r.alpha);
        break;
      case RuleKind::send_out:
        os << '[' << lhs << "]'" << polarization_char(r.alpha) << " -> " << spaced(out) << '[' << in << "]'"
           << polarization_char(r.beta);
        break;
      case RuleKind::send_in:
        os << lhs << " []'" << polarization_char(r.alpha) << " -> " << spaced(out) << '[' << in << "]'"
           << polarization_char(r.beta);
        break;
    }
    os << " @ " << def.label(r.membrane) << ";\n";
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : def.priorities) pairs.emplace_back(def.rules[p.higher].id, def.rules[p.lower].id);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  for (const auto& [hi, lo] : pairs) os << "priority " << hi << " > " << lo << ";\n";
  return os.str();
}

}  // namespace psys::dsl
