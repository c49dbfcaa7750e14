#include "rawtypes/parser.h"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace rawtypes {
namespace {

enum class Tok {
  kIdent,
  kInt,
  kLBrace,
  kRBrace,
  kLParen,
  kRParen,
  kSemi,
  kColon,
  kColonColon,
  kComma,
  kDot,
  kStar,
  kLeftArrow,   // <-
  kRightArrow,  // ->
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  SourceLocation loc;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::kIdent: return "identifier";
    case Tok::kInt: return "integer";
    case Tok::kLBrace: return "'{'";
    case Tok::kRBrace: return "'}'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kSemi: return "';'";
    case Tok::kColon: return "':'";
    case Tok::kColonColon: return "'::'";
    case Tok::kComma: return "','";
    case Tok::kDot: return "'.'";
    case Tok::kStar: return "'*'";
    case Tok::kLeftArrow: return "'<-'";
    case Tok::kRightArrow: return "'->'";
    case Tok::kEnd: return "end of input";
  }
  return "token";
}

struct ParseFailure {
  Diagnostic diag;
};

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file)
      : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceLocation loc{file_, line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back({Tok::kEnd, "", loc});
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_')) {
          advance();
        }
        out.push_back(
            {Tok::kIdent, std::string(text_.substr(start, pos_ - start)), loc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          advance();
        }
        out.push_back(
            {Tok::kInt, std::string(text_.substr(start, pos_ - start)), loc});
        continue;
      }
      auto two = text_.substr(pos_, 2);
      if (two == "<-" || two == "->" || two == "::") {
        advance();
        advance();
        Tok k = two == "<-" ? Tok::kLeftArrow
                : two == "->" ? Tok::kRightArrow
                              : Tok::kColonColon;
        out.push_back({k, std::string(two), loc});
        continue;
      }
      Tok k;
      switch (c) {
        case '{': k = Tok::kLBrace; break;
        case '}': k = Tok::kRBrace; break;
        case '(': k = Tok::kLParen; break;
        case ')': k = Tok::kRParen; break;
        case ';': k = Tok::kSemi; break;
        case ':': k = Tok::kColon; break;
        case ',': k = Tok::kComma; break;
        case '.': k = Tok::kDot; break;
        case '*': k = Tok::kStar; break;
        default:
          throw ParseFailure{make_error(
              codes::kLexError,
              std::string("unexpected character '") + c + "'", loc)};
      }
      advance();
      out.push_back({k, std::string(1, c), loc});
    }
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

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "null",   "new",    "if",      "jmp",   "super", "return",
      "setinit", "handler", "class", "extends", "field", "init",
      "method", "pre",    "post",    "ret",   "Init",  "Raw",
  };
  return words;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  PartialProgram run() {
    PartialProgram prog;
    bool have_main = false;
    if (peek().kind == Tok::kEnd) {
      throw ParseFailure{make_error(codes::kEmptyProgram,
                                    "the input declares nothing", peek().loc)};
    }
    while (peek().kind != Tok::kEnd) {
      const Token& t = peek();
      if (is_word("field")) {
        prog.fields.push_back(parse_field());
      } else if (is_word("class")) {
        prog.classes.push_back(parse_class(prog));
      } else if (is_word("main")) {
        SourceLocation loc = next().loc;
        ClassId main(expect_ident("main class name"));
        expect(Tok::kSemi);
        if (have_main) {
          diags_.push_back(make_error(codes::kDuplicateDefinition,
                                      "main class declared twice", loc));
        }
        have_main = true;
        prog.main = main;
        prog.main_location = loc;
      } else {
        fail(t, "'class', 'field' or 'main'");
      }
    }
    if (!have_main) {
      diags_.push_back(make_error(codes::kMissingMain,
                                  "no 'main C;' declaration", peek().loc));
    }
    return prog;
  }

  std::vector<Diagnostic>& diagnostics() { return diags_; }

 private:
  const Token& peek(int ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_word(const char* w, int ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kIdent && t.text == w;
  }

  [[noreturn]] void fail(const Token& t, const std::string& expected) {
    std::string found = t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
    throw ParseFailure{make_error(codes::kSyntaxError,
                                  "expected " + expected + ", found " + found,
                                  t.loc)};
  }

  const Token& expect(Tok k) {
    if (peek().kind != k) fail(peek(), describe(k));
    return next();
  }
  void expect_word(const char* w) {
    if (!is_word(w)) fail(peek(), std::string("'") + w + "'");
    next();
  }
  std::string expect_ident(const std::string& what) {
    if (peek().kind != Tok::kIdent) fail(peek(), what);
    return next().text;
  }
  VarId expect_var() {
    const Token& t = peek();
    if (t.kind != Tok::kIdent || reserved_words().count(t.text) != 0) {
      fail(t, "variable name");
    }
    return VarId(next().text);
  }
  int expect_int() {
    const Token& t = expect(Tok::kInt);
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc()) {
      throw ParseFailure{
          make_error(codes::kSyntaxError, "integer out of range", t.loc)};
    }
    return value;
  }

  InitType parse_type() {
    if (is_word("Init")) {
      next();
      return InitType::init();
    }
    if (is_word("Raw")) {
      next();
      if (peek().kind == Tok::kLParen) {
        next();
        ClassId c(expect_ident("class name"));
        expect(Tok::kRParen);
        return InitType::raw(c);
      }
      return InitType::raw_bot();
    }
    fail(peek(), "type ('Init', 'Raw' or 'Raw(C)')");
  }

  PartialField parse_field() {
    PartialField f;
    f.location = peek().loc;
    expect_word("field");
    f.id = FieldId(expect_ident("field name"));
    if (peek().kind == Tok::kColon) {
      next();
      f.type = parse_type();
    }
    expect(Tok::kSemi);
    return f;
  }

  PartialClass parse_class(PartialProgram& prog) {
    PartialClass cls;
    cls.location = peek().loc;
    expect_word("class");
    cls.id = ClassId(expect_ident("class name"));
    if (is_word("extends")) {
      next();
      cls.super = ClassId(expect_ident("superclass name"));
    }
    expect(Tok::kLBrace);
    while (peek().kind != Tok::kRBrace) {
      if (is_word("field")) {
        prog.fields.push_back(parse_field());
      } else if (is_word("init")) {
        SourceLocation loc = peek().loc;
        PartialMethod m = parse_method(true);
        if (cls.ctor) {
          diags_.push_back(make_error(
              codes::kDuplicateDefinition,
              "class '" + cls.id.name() + "' has more than one constructor",
              loc));
        } else {
          cls.ctor = std::move(m);
        }
      } else if (is_word("method")) {
        cls.methods.push_back(parse_method(false));
      } else {
        fail(peek(), "'field', 'init', 'method' or '}'");
      }
    }
    expect(Tok::kRBrace);
    return cls;
  }

  PartialMethod parse_method(bool is_ctor) {
    PartialMethod m;
    m.location = peek().loc;
    m.is_constructor = is_ctor;
    if (is_ctor) {
      expect_word("init");
      m.name = names::constructor();
    } else {
      expect_word("method");
      m.name = MethodName(expect_ident("method name"));
    }
    expect(Tok::kLParen);
    if (peek().kind != Tok::kRParen) {
      if (!is_word("arg")) fail(peek(), "'arg'");
      next();
      if (peek().kind == Tok::kColon) {
        next();
        m.argtype = parse_type();
      }
    }
    expect(Tok::kRParen);
    for (;;) {
      std::optional<InitType>* slot = nullptr;
      if (is_word("pre")) slot = &m.pre;
      else if (is_word("post")) slot = &m.post;
      else if (is_word("ret")) slot = &m.rettype;
      if (slot == nullptr) break;
      const Token& kw = next();
      if (slot->has_value()) {
        throw ParseFailure{make_error(
            codes::kSyntaxError, "'" + kw.text + "' annotation repeated",
            kw.loc)};
      }
      *slot = parse_type();
    }
    parse_body(m);
    return m;
  }

  void parse_body(PartialMethod& m) {
    expect(Tok::kLBrace);
    while (peek().kind != Tok::kRBrace) {
      if (is_word("handler")) {
        SourceLocation loc = next().loc;
        int from = expect_int();
        ExcId exc(expect_ident("exception name"));
        expect(Tok::kRightArrow);
        int to = expect_int();
        expect(Tok::kSemi);
        if (!m.handlers.emplace(std::make_pair(from, exc), to).second) {
          diags_.push_back(make_error(codes::kDuplicateDefinition,
                                      "handler for " + std::to_string(from) +
                                          " " + exc.name() + " repeated",
                                      loc));
        }
        continue;
      }
      const Token& label = peek();
      int pc = expect_int();
      if (pc != static_cast<int>(m.instrs.size())) {
        diags_.push_back(make_error(
            codes::kPcLabel,
            "expected label " + std::to_string(m.instrs.size()) + ", found " +
                std::to_string(pc),
            label.loc));
      }
      expect(Tok::kColon);
      m.instr_locations.push_back(label.loc);
      m.instrs.push_back(parse_instr());
      expect(Tok::kSemi);
    }
    expect(Tok::kRBrace);
  }

  Instr parse_instr() {
    if (is_word("if")) {
      next();
      expect(Tok::kStar);
      expect_word("jmp");
      return IfStar{expect_int()};
    }
    if (is_word("super")) {
      next();
      expect(Tok::kLParen);
      VarId y = expect_var();
      expect(Tok::kRParen);
      return SuperCall{y};
    }
    if (is_word("return")) {
      next();
      return Return{expect_var()};
    }
    if (is_word("setinit")) {
      next();
      return SetInit{};
    }
    VarId x = expect_var();
    if (peek().kind == Tok::kDot) {
      next();
      FieldId f(expect_ident("field name"));
      expect(Tok::kLeftArrow);
      return FieldWrite{x, f, expect_var()};
    }
    expect(Tok::kLeftArrow);
    return parse_rhs(x);
  }

  Instr parse_rhs(VarId x) {
    if (is_word("new")) {
      next();
      ClassId c(expect_ident("class name"));
      expect(Tok::kLParen);
      VarId y = expect_var();
      expect(Tok::kRParen);
      return New{x, c, y};
    }
    if (peek().kind == Tok::kLParen) {
      next();
      if (is_word("Init")) {
        next();
        expect(Tok::kRParen);
        return CastInit{x, expect_var()};
      }
      if (is_word("Raw")) {
        next();
        expect(Tok::kLParen);
        ClassId c(expect_ident("class name"));
        expect(Tok::kRParen);
        expect(Tok::kRParen);
        return CastRaw{x, c, expect_var()};
      }
      fail(peek(), "cast type ('Init' or 'Raw(C)')");
    }
    Expr e;
    if (is_word("null")) {
      next();
    } else {
      VarId r = expect_var();
      // r.D::m(y) is a call; r.f is a field read.
      if (peek().kind == Tok::kDot && peek(1).kind == Tok::kIdent &&
          peek(2).kind == Tok::kColonColon) {
        next();
        ClassId decl(next().text);
        next();
        MethodName m(expect_ident("method name"));
        expect(Tok::kLParen);
        VarId y = expect_var();
        expect(Tok::kRParen);
        return VirtualCall{x, r, decl, m, y};
      }
      e = Expr::variable(r);
    }
    while (peek().kind == Tok::kDot) {
      next();
      e.path.push_back(FieldId(expect_ident("field name")));
    }
    return Assign{x, e};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
};

// Name resolution and duplicate detection over the partial program.
class Resolver {
 public:
  Resolver(const PartialProgram& p, std::vector<Diagnostic>& diags)
      : p_(p), diags_(diags) {}

  void run() {
    for (const PartialClass& c : p_.classes) {
      if (!classes_.insert(c.id).second) {
        dup("class '" + c.id.name() + "'", c.location);
      }
      std::set<MethodName> names;
      for (const PartialMethod& m : c.methods) {
        if (!names.insert(m.name).second) {
          dup("method '" + c.id.name() + "." + m.name.name() + "'",
              m.location);
        }
        methods_.insert({c.id, m.name});
      }
    }
    for (const PartialField& f : p_.fields) {
      if (!fields_.insert(f.id).second) {
        dup("field '" + f.id.name() + "'", f.location);
      }
    }
    for (const PartialField& f : p_.fields) {
      if (f.type) type(*f.type, f.location);
    }
    if (!p_.main.empty()) cls(p_.main, p_.main_location);
    for (const PartialClass& c : p_.classes) {
      if (c.super) cls(*c.super, c.location);
      if (!c.ctor) {
        diags_.push_back(make_error(
            codes::kMissingConstructor,
            "class '" + c.id.name() + "' declares no constructor",
            c.location));
      } else {
        method(*c.ctor);
      }
      for (const PartialMethod& m : c.methods) method(m);
    }
  }

 private:
  void dup(const std::string& what, const SourceLocation& loc) {
    diags_.push_back(
        make_error(codes::kDuplicateDefinition, what + " defined twice", loc));
  }
  void unresolved(const std::string& what, const SourceLocation& loc) {
    diags_.push_back(make_error(codes::kUnresolvedName, what, loc));
  }
  void cls(ClassId c, const SourceLocation& loc) {
    if (classes_.count(c) == 0) {
      unresolved("unknown class '" + c.name() + "'", loc);
    }
  }
  void field(FieldId f, const SourceLocation& loc) {
    if (fields_.count(f) == 0) {
      unresolved("unknown field '" + f.name() + "'", loc);
    }
  }
  void type(const InitType& t, const SourceLocation& loc) {
    if (t.is_raw()) cls(t.cls, loc);
  }

  void method(const PartialMethod& m) {
    for (const auto* t : {&m.pre, &m.post, &m.argtype, &m.rettype}) {
      if (*t) type(**t, m.location);
    }
    for (std::size_t pc = 0; pc < m.instrs.size(); ++pc) {
      const Instr& ins = m.instrs[pc];
      const SourceLocation& loc = m.instr_locations[pc];
      if (auto* a = std::get_if<Assign>(&ins)) {
        for (const FieldId& f : a->value.path) field(f, loc);
      } else if (auto* fw = std::get_if<FieldWrite>(&ins)) {
        field(fw->field, loc);
      } else if (auto* n = std::get_if<New>(&ins)) {
        cls(n->cls, loc);
      } else if (auto* call = std::get_if<VirtualCall>(&ins)) {
        if (classes_.count(call->declaring) == 0) {
          cls(call->declaring, loc);
        } else if (methods_.count({call->declaring, call->method}) == 0) {
          unresolved("unknown method '" + call->declaring.name() +
                         "::" + call->method.name() + "'",
                     loc);
        }
      } else if (auto* cr = std::get_if<CastRaw>(&ins)) {
        cls(cr->cls, loc);
      }
    }
  }

  const PartialProgram& p_;
  std::vector<Diagnostic>& diags_;
  std::set<ClassId> classes_;
  std::set<FieldId> fields_;
  std::set<std::pair<ClassId, MethodName>> methods_;
};

}  // namespace

Result<PartialProgram> parse_partial(std::string_view text,
                                     const std::string& file) {
  try {
    Parser parser(Lexer(text, file).run());
    PartialProgram p = parser.run();
    if (!parser.diagnostics().empty()) return parser.diagnostics();
    return p;
  } catch (const ParseFailure& f) {
    return f.diag;
  }
}

Result<Program> parse(std::string_view text, const std::string& file) {
  Result<PartialProgram> partial = parse_partial(text, file);
  if (!partial) return partial.diagnostics();
  std::vector<Diagnostic> diags;
  Resolver(*partial, diags).run();
  if (!diags.empty()) return diags;
  Program p = apply_default_annotations(*partial);
  diags = validate_structure(p);
  if (!diags.empty()) {
    // Program-level findings carry no position of their own.
    for (Diagnostic& d : diags) {
      if (d.location == SourceLocation{}) d.location = partial->main_location;
    }
    return diags;
  }
  return p;
}

namespace {

void print_method(std::ostringstream& os, const MethodDef& m) {
  os << "  ";
  if (m.is_constructor) {
    os << "init";
  } else {
    os << "method " << m.name.name();
  }
  os << "(arg: " << to_string(m.argtype) << ") pre " << to_string(m.pre)
     << " post " << to_string(m.post) << " ret " << to_string(m.rettype)
     << " {\n";
  for (std::size_t pc = 0; pc < m.instrs.size(); ++pc) {
    os << "    " << pc << ": " << to_string(m.instrs[pc]) << ";\n";
  }
  for (const auto& [key, target] : m.handlers) {
    os << "    handler " << key.first << ' ' << key.second.name() << " -> "
       << target << ";\n";
  }
  os << "  }\n";
}

}  // namespace

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& [id, type] : p.fields) {
    os << "field " << id.name() << " : " << to_string(type) << ";\n";
  }
  if (!p.fields.empty()) os << '\n';
  for (const auto& [id, cls] : p.classes) {
    os << "class " << id.name();
    if (cls.super) os << " extends " << cls.super->name();
    os << " {\n";
    print_method(os, cls.ctor);
    for (const auto& [name, m] : cls.methods) {
      os << '\n';
      print_method(os, m);
    }
    os << "}\n\n";
  }
  os << "main " << p.main.name() << ";\n";
  return os.str();
}

}  // namespace rawtypes
