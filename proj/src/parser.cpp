#include "ebforge/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

namespace ebforge {

namespace {

enum class Tk : std::uint8_t {
    End, Ident, IntTok, Label,
    // structure keywords
    KwMachine, KwRefines, KwSees, KwVariables, KwInvariants, KwVariant, KwEvents, KwEvent,
    KwStatus, KwAny, KwWhere, KwWith, KwThen, KwEnd,
    KwContext, KwExtends, KwSets, KwConstants, KwAxioms, KwTheorems, KwTheorem,
    KwOrdinary, KwConvergent, KwAnticipated,
    // formula keywords
    KwNot, KwOr, KwMod, KwCirc, KwTrue, KwFalse,
    // symbols
    Assign, NdAssign, Colon, NotColon, Eq, Neq, LtTok, LeTok, GtTok, GeTok,
    SubsetTok, PSubsetTok,
    UnionTok, InterTok, DiffTok, CrossTok, MapletTok, DotDot,
    ArrowRel, ArrowTrel, ArrowSrel, ArrowStrel, ArrowPfun, ArrowTfun, ArrowPinj,
    ArrowTinj, ArrowPsur, ArrowTsur, ArrowTbij,
    DomResTok, RanResTok, DomSubTok, RanSubTok, OvlTok, Semi, DprodTok, PprodTok,
    ImpliesTok, IffTok, Amp, Bang, Hash, Dot, Bar, Tilde, Caret,
    Plus, Minus, Star, Slash, EmptySetTok,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma,
};

struct Token {
    Tk kind = Tk::End;
    std::string text;
    std::int64_t ival = 0;
    SourceSpan span;
};

const std::map<std::string, Tk>& keyword_map() {
    static const std::map<std::string, Tk> m = {
        {"machine", Tk::KwMachine},   {"refines", Tk::KwRefines},
        {"sees", Tk::KwSees},         {"variables", Tk::KwVariables},
        {"invariants", Tk::KwInvariants}, {"variant", Tk::KwVariant},
        {"events", Tk::KwEvents},     {"event", Tk::KwEvent},
        {"status", Tk::KwStatus},     {"any", Tk::KwAny},
        {"where", Tk::KwWhere},       {"with", Tk::KwWith},
        {"then", Tk::KwThen},         {"end", Tk::KwEnd},
        {"context", Tk::KwContext},   {"extends", Tk::KwExtends},
        {"sets", Tk::KwSets},         {"constants", Tk::KwConstants},
        {"axioms", Tk::KwAxioms},     {"theorems", Tk::KwTheorems},
        {"theorem", Tk::KwTheorem},   {"ordinary", Tk::KwOrdinary},
        {"convergent", Tk::KwConvergent}, {"anticipated", Tk::KwAnticipated},
        {"not", Tk::KwNot},           {"or", Tk::KwOr},
        {"mod", Tk::KwMod},           {"circ", Tk::KwCirc},
        {"TRUE", Tk::KwTrue},         {"FALSE", Tk::KwFalse},
    };
    return m;
}

// Multi-character operators, longest first so maximal munch works.
const std::vector<std::pair<std::string, Tk>>& symbol_table() {
    static const std::vector<std::pair<std::string, Tk>> t = {
        {"<<->>", Tk::ArrowStrel},
        {"<<->", Tk::ArrowTrel}, {"<->>", Tk::ArrowSrel}, {">->>", Tk::ArrowTbij},
        {"<->", Tk::ArrowRel}, {"+->", Tk::ArrowPfun}, {"-->", Tk::ArrowTfun},
        {">+>", Tk::ArrowPinj}, {">->", Tk::ArrowTinj}, {"+>>", Tk::ArrowPsur},
        {"->>", Tk::ArrowTsur}, {"<<:", Tk::PSubsetTok}, {"<<|", Tk::DomSubTok},
        {"|>>", Tk::RanSubTok}, {"|->", Tk::MapletTok}, {"<=>", Tk::IffTok},
        {":=", Tk::Assign}, {":|", Tk::NdAssign}, {"/:", Tk::NotColon},
        {"/=", Tk::Neq}, {"<=", Tk::LeTok}, {">=", Tk::GeTok}, {"<:", Tk::SubsetTok},
        {"\\/", Tk::UnionTok}, {"/\\", Tk::InterTok}, {"**", Tk::CrossTok},
        {"..", Tk::DotDot}, {"<|", Tk::DomResTok}, {"|>", Tk::RanResTok},
        {"<+", Tk::OvlTok}, {"><", Tk::DprodTok}, {"||", Tk::PprodTok},
        {"=>", Tk::ImpliesTok},
        {":", Tk::Colon}, {"=", Tk::Eq}, {"<", Tk::LtTok}, {">", Tk::GtTok},
        {"\\", Tk::DiffTok}, {"|", Tk::Bar}, {"~", Tk::Tilde}, {"^", Tk::Caret},
        {"+", Tk::Plus}, {"-", Tk::Minus}, {"*", Tk::Star}, {"/", Tk::Slash},
        {".", Tk::Dot}, {",", Tk::Comma}, {"(", Tk::LParen}, {")", Tk::RParen},
        {"{", Tk::LBrace}, {"}", Tk::RBrace}, {"[", Tk::LBracket}, {"]", Tk::RBracket},
        {"!", Tk::Bang}, {"#", Tk::Hash}, {";", Tk::Semi}, {"&", Tk::Amp},
    };
    return t;
}

// Unicode aliases for the ASCII operators.
const std::vector<std::pair<std::string, Tk>>& unicode_table() {
    static const std::vector<std::pair<std::string, Tk>> t = {
        {"∈", Tk::Colon},      // ∈
        {"∉", Tk::NotColon},   // ∉
        {"≠", Tk::Neq},        // ≠
        {"≤", Tk::LeTok},      // ≤
        {"≥", Tk::GeTok},      // ≥
        {"∪", Tk::UnionTok},   // ∪
        {"∩", Tk::InterTok},   // ∩
        {"∖", Tk::DiffTok},    // ∖
        {"↦", Tk::MapletTok},  // ↦
        {"×", Tk::CrossTok},   // ×
        {"‥", Tk::DotDot},     // ‥
        {"÷", Tk::Slash},      // ÷
        {"¬", Tk::KwNot},      // ¬
        {"∧", Tk::Amp},        // ∧
        {"∨", Tk::KwOr},       // ∨
        {"⇒", Tk::ImpliesTok}, // ⇒
        {"⇔", Tk::IffTok},     // ⇔
        {"∀", Tk::Bang},       // ∀
        {"∃", Tk::Hash},       // ∃
        {"·", Tk::Dot},        // ·
        {"∅", Tk::EmptySetTok}, // ∅
        {"⊆", Tk::SubsetTok},  // ⊆
        {"⊂", Tk::PSubsetTok}, // ⊂
        {"↔", Tk::ArrowRel},   // ↔
        {"⇸", Tk::ArrowPfun},  // ⇸
        {"→", Tk::ArrowTfun},  // →
        {"⤔", Tk::ArrowPinj},  // ⤔
        {"↣", Tk::ArrowTinj},  // ↣
        {"⤀", Tk::ArrowPsur},  // ⤀
        {"↠", Tk::ArrowTsur},  // ↠
        {"⤖", Tk::ArrowTbij},  // ⤖
        {"◁", Tk::DomResTok},  // ◁
        {"▷", Tk::RanResTok},  // ▷
        {"⩤", Tk::DomSubTok},  // ⩤
        {"⩥", Tk::RanSubTok},  // ⩥
        {"⊗", Tk::DprodTok},   // ⊗
        {"∥", Tk::PprodTok},   // ∥
        {"∘", Tk::KwCirc},     // ∘
    };
    return t;
}

class Lexer {
public:
    Lexer(const std::string& file, const std::string& text) : file_(file), text_(text) {}

    std::vector<Token> lex() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            if (pos_ >= text_.size()) break;
            out.push_back(next_token());
        }
        Token end;
        end.kind = Tk::End;
        end.span = here(0);
        out.push_back(end);
        return out;
    }

private:
    SourceSpan here(std::size_t len) const {
        SourceSpan s;
        s.file = file_;
        s.start_line = line_;
        s.start_col = col_;
        s.end_line = line_;
        s.end_col = col_ + static_cast<int>(len);
        return s;
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
    }

    void skip_space_and_comments() {
        for (;;) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                advance(1);
            if (pos_ + 1 < text_.size() && text_[pos_] == '/' && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
                continue;
            }
            break;
        }
    }

    Token next_token() {
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident();
        if (c == '@') return lex_label();
        if (static_cast<unsigned char>(c) >= 0x80) return lex_unicode();
        for (const auto& [sym, kind] : symbol_table()) {
            if (text_.compare(pos_, sym.size(), sym) == 0) {
                Token t;
                t.kind = kind;
                t.text = sym;
                t.span = here(sym.size());
                advance(sym.size());
                return t;
            }
        }
        throw SyntaxError(here(1), std::string("unexpected character '") + c + "'");
    }

    Token lex_number() {
        std::size_t n = 0;
        while (pos_ + n < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_ + n])))
            ++n;
        Token t;
        t.kind = Tk::IntTok;
        t.text = text_.substr(pos_, n);
        t.span = here(n);
        try {
            t.ival = std::stoll(t.text);
        } catch (const std::out_of_range&) {
            throw SyntaxError(t.span, "integer literal out of 64-bit range");
        }
        advance(n);
        return t;
    }

    Token lex_ident() {
        std::size_t n = 0;
        while (pos_ + n < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_ + n])) ||
                text_[pos_ + n] == '_'))
            ++n;
        if (pos_ + n < text_.size() && text_[pos_ + n] == '\'') ++n; // primed name
        Token t;
        t.text = text_.substr(pos_, n);
        t.span = here(n);
        const auto& kws = keyword_map();
        auto it = kws.find(t.text);
        t.kind = it != kws.end() ? it->second : Tk::Ident;
        advance(n);
        return t;
    }

    Token lex_label() {
        advance(1); // '@'
        if (pos_ >= text_.size() ||
            !(std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            throw SyntaxError(here(1), "expected a label name after '@'");
        std::size_t n = 0;
        while (pos_ + n < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_ + n])) ||
                text_[pos_ + n] == '_' || text_[pos_ + n] == '.'))
            ++n;
        if (pos_ + n < text_.size() && text_[pos_ + n] == '\'') ++n;
        Token t;
        t.kind = Tk::Label;
        t.text = text_.substr(pos_, n);
        t.span = here(n);
        advance(n);
        return t;
    }

    Token lex_unicode() {
        for (const auto& [sym, kind] : unicode_table()) {
            if (text_.compare(pos_, sym.size(), sym) == 0) {
                Token t;
                t.kind = kind;
                t.text = sym;
                t.span = here(sym.size());
                advance(sym.size());
                return t;
            }
        }
        throw SyntaxError(here(1), "unexpected character (unsupported unicode symbol)");
    }

    std::string file_;
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool is_builtin_call(const std::string& name) {
    return name == "dom" || name == "ran" || name == "card" || name == "min" ||
           name == "max" || name == "finite" || name == "union" || name == "inter" ||
           name == "id" || name == "prj1" || name == "prj2" || name == "pow" ||
           name == "old" || name == "partition";
}

class Parser {
public:
    Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    // -- entry points --------------------------------------------------

    void parse_file(Project& project) {
        if (at(Tk::KwMachine))
            project.machines.push_back(parse_machine());
        else if (at(Tk::KwContext))
            project.contexts.push_back(parse_context());
        else
            fail("expected 'machine' or 'context'", {"machine", "context"});
        expect(Tk::End, "end of file");
    }

    FormulaPtr parse_single_formula() {
        FormulaPtr f = parse_pred();
        expect(Tk::End, "end of input");
        return f;
    }

    std::vector<std::pair<std::string, FormulaPtr>> parse_bindings_doc() {
        std::vector<std::pair<std::string, FormulaPtr>> out;
        while (!at(Tk::End)) {
            Token name = expect(Tk::Ident, "a constant name");
            expect(Tk::Eq, "'='");
            out.emplace_back(name.text, parse_pred());
        }
        return out;
    }

private:
    // -- token machinery ------------------------------------------------

    const Token& peek(std::size_t k = 0) const {
        const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
        return toks_[i];
    }

    bool at(Tk k) const { return peek().kind == k; }

    Token advance() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    bool accept(Tk k) {
        if (!at(k)) return false;
        advance();
        return true;
    }

    Token expect(Tk k, const std::string& what) {
        if (!at(k)) fail("expected " + what, {what});
        return advance();
    }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) {
        const Token& t = peek();
        std::string got = t.kind == Tk::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.span, msg + ", got " + got, std::move(expected));
    }

    std::vector<std::string> ident_list() {
        std::vector<std::string> out;
        while (at(Tk::Ident)) out.push_back(advance().text);
        if (out.empty()) fail("expected at least one identifier", {"identifier"});
        return out;
    }

    // -- machine / context ----------------------------------------------

    Machine parse_machine() {
        Machine m;
        m.span = peek().span;
        expect(Tk::KwMachine, "'machine'");
        m.name = expect(Tk::Ident, "a machine name").text;
        if (accept(Tk::KwRefines)) m.refines = expect(Tk::Ident, "a machine name").text;
        if (accept(Tk::KwSees)) m.sees = ident_list();
        if (accept(Tk::KwVariables)) m.variables = ident_list();
        if (accept(Tk::KwInvariants)) {
            while (at(Tk::Label)) {
                Labeled item;
                Token lbl = advance();
                item.label = lbl.text;
                item.span = lbl.span;
                item.theorem = accept(Tk::KwTheorem);
                item.formula = parse_pred();
                m.invariants.push_back(std::move(item));
            }
        }
        if (accept(Tk::KwVariant)) m.variant = parse_pred();
        if (accept(Tk::KwEvents))
            while (at(Tk::KwEvent)) m.events.push_back(parse_event());
        expect(Tk::KwEnd, "'end'");
        return m;
    }

    Context parse_context() {
        Context c;
        c.span = peek().span;
        expect(Tk::KwContext, "'context'");
        c.name = expect(Tk::Ident, "a context name").text;
        if (accept(Tk::KwExtends)) c.extends = ident_list();
        if (accept(Tk::KwSets)) c.sets = ident_list();
        if (accept(Tk::KwConstants)) c.constants = ident_list();
        if (accept(Tk::KwAxioms)) c.axioms = labeled_items();
        if (accept(Tk::KwTheorems)) c.theorems = labeled_items();
        expect(Tk::KwEnd, "'end'");
        return c;
    }

    std::vector<Labeled> labeled_items() {
        std::vector<Labeled> out;
        while (at(Tk::Label)) {
            Labeled item;
            Token lbl = advance();
            item.label = lbl.text;
            item.span = lbl.span;
            item.formula = parse_pred();
            out.push_back(std::move(item));
        }
        return out;
    }

    Event parse_event() {
        Event e;
        e.span = peek().span;
        expect(Tk::KwEvent, "'event'");
        e.name = expect(Tk::Ident, "an event name").text;
        if (accept(Tk::KwExtends)) {
            e.refines = {expect(Tk::Ident, "an event name").text};
            e.extends_abstract = true;
        } else if (accept(Tk::KwRefines)) {
            e.refines = ident_list();
        }
        if (accept(Tk::KwStatus)) {
            if (accept(Tk::KwOrdinary))
                e.status = EventStatus::Ordinary;
            else if (accept(Tk::KwConvergent))
                e.status = EventStatus::Convergent;
            else if (accept(Tk::KwAnticipated))
                e.status = EventStatus::Anticipated;
            else
                fail("expected an event status", {"ordinary", "convergent", "anticipated"});
        }
        if (accept(Tk::KwAny)) e.params = ident_list();
        if (accept(Tk::KwWhere)) e.guards = labeled_items();
        if (accept(Tk::KwWith)) {
            while (at(Tk::Label)) {
                Witness w;
                Token lbl = advance();
                w.name = lbl.text;
                w.span = lbl.span;
                w.predicate = parse_pred();
                e.witnesses.push_back(std::move(w));
            }
        }
        if (accept(Tk::KwThen)) {
            while (at(Tk::Label)) parse_action(e);
        }
        expect(Tk::KwEnd, "'end'");
        return e;
    }

    void parse_action(Event& e) {
        Token lbl = expect(Tk::Label, "an action label");
        std::vector<std::string> lhs;
        lhs.push_back(expect(Tk::Ident, "a variable name").text);
        FormulaPtr index;
        if (lhs.size() == 1 && at(Tk::LParen)) {
            advance();
            index = parse_pred();
            expect(Tk::RParen, "')'");
        }
        while (accept(Tk::Comma)) {
            if (index) fail("indexed assignment cannot have multiple targets");
            lhs.push_back(expect(Tk::Ident, "a variable name").text);
        }
        if (accept(Tk::Assign)) {
            std::vector<FormulaPtr> rhs;
            rhs.push_back(parse_pred());
            while (accept(Tk::Comma)) rhs.push_back(parse_pred());
            if (rhs.size() != lhs.size())
                throw SyntaxError(lbl.span, "assignment arity mismatch: " +
                                                std::to_string(lhs.size()) + " targets, " +
                                                std::to_string(rhs.size()) + " expressions");
            for (std::size_t i = 0; i < lhs.size(); ++i) {
                Action a;
                a.kind = Action::Kind::Deterministic;
                a.label = i == 0 ? lbl.text : lbl.text + "_" + std::to_string(i + 1);
                a.lhs = lhs[i];
                a.index = i == 0 ? index : nullptr;
                a.rhs = rhs[i];
                a.span = lbl.span;
                e.actions.push_back(std::move(a));
            }
        } else if (accept(Tk::NdAssign)) {
            if (index) fail("indexed assignment must use ':='");
            Action a;
            a.kind = Action::Kind::NonDeterministic;
            a.label = lbl.text;
            a.lhs_list = std::move(lhs);
            a.predicate = parse_pred();
            a.span = lbl.span;
            e.actions.push_back(std::move(a));
        } else {
            fail("expected ':=' or ':|'", {":=", ":|"});
        }
    }

    // -- formulas ---------------------------------------------------------
    // Binding, loosest to tightest: quantifiers; <=>; =>; or; &; not;
    // relational predicates; relation arrows; \/ and \; /\; the relation
    // combinators and **; |->; ..; + -; * / mod; ^; unary -; postfix
    // application, image and ~; atoms.

    FormulaPtr parse_pred() { return parse_quant(); }

    FormulaPtr parse_quant() {
        if (at(Tk::Bang) || at(Tk::Hash)) {
            Token q = advance();
            std::vector<std::string> binders;
            binders.push_back(expect(Tk::Ident, "a bound variable").text);
            while (accept(Tk::Comma))
                binders.push_back(expect(Tk::Ident, "a bound variable").text);
            expect(Tk::Dot, "'.'");
            FormulaPtr body = parse_quant();
            return mk_binder(q.kind == Tk::Bang ? NodeKind::Forall : NodeKind::Exists,
                             std::move(binders), {std::move(body)}, q.span);
        }
        return parse_iff();
    }

    FormulaPtr parse_iff() {
        FormulaPtr l = parse_impl();
        if (at(Tk::IffTok)) {
            Token op = advance();
            return mk_node(NodeKind::Iff, {l, parse_iff()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_impl() {
        FormulaPtr l = parse_or();
        if (at(Tk::ImpliesTok)) {
            Token op = advance();
            return mk_node(NodeKind::Implies, {l, parse_impl()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_or() {
        FormulaPtr l = parse_and();
        while (at(Tk::KwOr)) {
            Token op = advance();
            l = mk_node(NodeKind::Or, {l, parse_and()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_and() {
        FormulaPtr l = parse_not();
        while (at(Tk::Amp)) {
            Token op = advance();
            l = mk_node(NodeKind::And, {l, parse_not()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_not() {
        if (at(Tk::KwNot)) {
            Token op = advance();
            return mk_node(NodeKind::Not, {parse_not()}, op.span);
        }
        return parse_rel();
    }

    std::optional<NodeKind> rel_pred_kind(Tk k, bool& negate) {
        negate = false;
        switch (k) {
        case Tk::Eq: return NodeKind::Equal;
        case Tk::Neq: negate = true; return NodeKind::Equal;
        case Tk::Colon: return NodeKind::Member;
        case Tk::NotColon: negate = true; return NodeKind::Member;
        case Tk::SubsetTok: return NodeKind::Subset;
        case Tk::PSubsetTok: return NodeKind::ProperSubset;
        case Tk::LtTok: return NodeKind::Lt;
        case Tk::LeTok: return NodeKind::Le;
        case Tk::GtTok: return NodeKind::Gt;
        case Tk::GeTok: return NodeKind::Ge;
        default: return std::nullopt;
        }
    }

    FormulaPtr parse_rel() {
        FormulaPtr l = parse_arrow();
        bool negate = false;
        if (auto kind = rel_pred_kind(peek().kind, negate)) {
            Token op = advance();
            FormulaPtr r = parse_arrow();
            FormulaPtr node = mk_node(*kind, {l, r}, op.span);
            if (negate) node = mk_node(NodeKind::Not, {node}, op.span);
            bool dummy = false;
            if (rel_pred_kind(peek().kind, dummy))
                fail("relational operators cannot be chained; parenthesize");
            return node;
        }
        return l;
    }

    std::optional<RelKind> arrow_kind(Tk k) {
        switch (k) {
        case Tk::ArrowRel: return RelKind::Rel;
        case Tk::ArrowTrel: return RelKind::Trel;
        case Tk::ArrowSrel: return RelKind::Srel;
        case Tk::ArrowStrel: return RelKind::Strel;
        case Tk::ArrowPfun: return RelKind::Pfun;
        case Tk::ArrowTfun: return RelKind::Tfun;
        case Tk::ArrowPinj: return RelKind::Pinj;
        case Tk::ArrowTinj: return RelKind::Tinj;
        case Tk::ArrowPsur: return RelKind::Psur;
        case Tk::ArrowTsur: return RelKind::Tsur;
        case Tk::ArrowTbij: return RelKind::Tbij;
        default: return std::nullopt;
        }
    }

    FormulaPtr parse_arrow() {
        FormulaPtr l = parse_union();
        if (auto kind = arrow_kind(peek().kind)) {
            Token op = advance();
            return mk_relset(*kind, l, parse_union(), op.span);
        }
        return l;
    }

    FormulaPtr parse_union() {
        FormulaPtr l = parse_inter();
        for (;;) {
            if (at(Tk::UnionTok)) {
                Token op = advance();
                l = mk_node(NodeKind::Union, {l, parse_inter()}, op.span);
            } else if (at(Tk::DiffTok)) {
                Token op = advance();
                l = mk_node(NodeKind::Diff, {l, parse_inter()}, op.span);
            } else {
                return l;
            }
        }
    }

    FormulaPtr parse_inter() {
        FormulaPtr l = parse_combine();
        while (at(Tk::InterTok)) {
            Token op = advance();
            l = mk_node(NodeKind::Inter, {l, parse_combine()}, op.span);
        }
        return l;
    }

    std::optional<NodeKind> combine_kind(Tk k) {
        switch (k) {
        case Tk::DomResTok: return NodeKind::DomRes;
        case Tk::RanResTok: return NodeKind::RanRes;
        case Tk::DomSubTok: return NodeKind::DomSub;
        case Tk::RanSubTok: return NodeKind::RanSub;
        case Tk::OvlTok: return NodeKind::Ovl;
        case Tk::Semi: return NodeKind::Fcomp;
        case Tk::KwCirc: return NodeKind::Bcomp;
        case Tk::DprodTok: return NodeKind::Dprod;
        case Tk::PprodTok: return NodeKind::Pprod;
        case Tk::CrossTok: return NodeKind::Cross;
        default: return std::nullopt;
        }
    }

    FormulaPtr parse_combine() {
        FormulaPtr l = parse_maplet();
        while (auto kind = combine_kind(peek().kind)) {
            Token op = advance();
            l = mk_node(*kind, {l, parse_maplet()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_maplet() {
        FormulaPtr l = parse_interval();
        while (at(Tk::MapletTok)) {
            Token op = advance();
            l = mk_node(NodeKind::Maplet, {l, parse_interval()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_interval() {
        FormulaPtr l = parse_add();
        if (at(Tk::DotDot)) {
            Token op = advance();
            return mk_node(NodeKind::IntervalExpr, {l, parse_add()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_add() {
        FormulaPtr l = parse_mul();
        for (;;) {
            if (at(Tk::Plus)) {
                Token op = advance();
                l = mk_node(NodeKind::Add, {l, parse_mul()}, op.span);
            } else if (at(Tk::Minus)) {
                Token op = advance();
                l = mk_node(NodeKind::Sub, {l, parse_mul()}, op.span);
            } else {
                return l;
            }
        }
    }

    FormulaPtr parse_mul() {
        FormulaPtr l = parse_exp();
        for (;;) {
            if (at(Tk::Star)) {
                Token op = advance();
                l = mk_node(NodeKind::Mul, {l, parse_exp()}, op.span);
            } else if (at(Tk::Slash)) {
                Token op = advance();
                l = mk_node(NodeKind::Div, {l, parse_exp()}, op.span);
            } else if (at(Tk::KwMod)) {
                Token op = advance();
                l = mk_node(NodeKind::Mod, {l, parse_exp()}, op.span);
            } else {
                return l;
            }
        }
    }

    FormulaPtr parse_exp() {
        FormulaPtr l = parse_unary();
        if (at(Tk::Caret)) {
            Token op = advance();
            return mk_node(NodeKind::Exp, {l, parse_exp()}, op.span);
        }
        return l;
    }

    FormulaPtr parse_unary() {
        if (at(Tk::Minus)) {
            Token op = advance();
            FormulaPtr operand = parse_unary();
            if (operand->kind == NodeKind::IntLit && operand->int_val >= 0)
                return mk_int(-operand->int_val, op.span);
            return mk_node(NodeKind::Sub, {mk_int(0, op.span), operand}, op.span);
        }
        return parse_postfix();
    }

    FormulaPtr parse_postfix() {
        FormulaPtr e = parse_atom();
        for (;;) {
            if (at(Tk::LParen)) {
                Token op = advance();
                FormulaPtr arg = parse_pred();
                expect(Tk::RParen, "')'");
                e = mk_node(NodeKind::Apply, {e, arg}, op.span);
            } else if (at(Tk::LBracket)) {
                Token op = advance();
                FormulaPtr arg = parse_pred();
                expect(Tk::RBracket, "']'");
                e = mk_node(NodeKind::Image, {e, arg}, op.span);
            } else if (at(Tk::Tilde)) {
                Token op = advance();
                e = mk_node(NodeKind::Inverse, {e}, op.span);
            } else {
                return e;
            }
        }
    }

    FormulaPtr parse_builtin_call(const Token& name) {
        expect(Tk::LParen, "'('");
        std::vector<FormulaPtr> args;
        if (!at(Tk::RParen)) {
            args.push_back(parse_pred());
            while (accept(Tk::Comma)) args.push_back(parse_pred());
        }
        expect(Tk::RParen, "')'");
        auto check_arity = [&](std::size_t n) {
            if (args.size() != n)
                throw SyntaxError(name.span, name.text + " expects " + std::to_string(n) +
                                                 " argument(s), got " +
                                                 std::to_string(args.size()));
        };
        NodeKind kind;
        if (name.text == "dom") kind = NodeKind::Dom;
        else if (name.text == "ran") kind = NodeKind::Ran;
        else if (name.text == "card") kind = NodeKind::Card;
        else if (name.text == "min") kind = NodeKind::MinOf;
        else if (name.text == "max") kind = NodeKind::MaxOf;
        else if (name.text == "finite") kind = NodeKind::FinitePred;
        else if (name.text == "union") kind = NodeKind::GenUnion;
        else if (name.text == "inter") kind = NodeKind::GenInter;
        else if (name.text == "id") kind = NodeKind::IdOn;
        else if (name.text == "prj1") kind = NodeKind::Prj1;
        else if (name.text == "prj2") kind = NodeKind::Prj2;
        else if (name.text == "pow") kind = NodeKind::Pow;
        else if (name.text == "old") kind = NodeKind::Old;
        else kind = NodeKind::Partition;
        if (kind == NodeKind::Partition) {
            if (args.empty())
                throw SyntaxError(name.span, "partition expects at least one argument");
        } else {
            check_arity(1);
        }
        return mk_node(kind, std::move(args), name.span);
    }

    FormulaPtr parse_quantified_setop(const Token& name) {
        std::vector<std::string> binders;
        binders.push_back(expect(Tk::Ident, "a bound variable").text);
        while (accept(Tk::Comma))
            binders.push_back(expect(Tk::Ident, "a bound variable").text);
        expect(Tk::Dot, "'.'");
        FormulaPtr pred = parse_pred();
        expect(Tk::Bar, "'|'");
        FormulaPtr expr = parse_pred();
        return mk_binder(name.text == "UNION" ? NodeKind::QuantUnion : NodeKind::QuantInter,
                         std::move(binders), {std::move(pred), std::move(expr)}, name.span);
    }

    FormulaPtr parse_set_literal(const Token& open) {
        if (accept(Tk::RBrace)) return mk_node(NodeKind::SetExt, {}, open.span);
        // {x, y . P | E} is a comprehension; anything else is an extension.
        const std::size_t save = pos_;
        if (at(Tk::Ident)) {
            std::vector<std::string> binders;
            binders.push_back(advance().text);
            while (accept(Tk::Comma)) {
                if (!at(Tk::Ident)) break;
                binders.push_back(advance().text);
            }
            if (at(Tk::Dot)) {
                advance();
                FormulaPtr pred = parse_pred();
                expect(Tk::Bar, "'|'");
                FormulaPtr expr = parse_pred();
                expect(Tk::RBrace, "'}'");
                return mk_binder(NodeKind::SetComp, std::move(binders),
                                 {std::move(pred), std::move(expr)}, open.span);
            }
            pos_ = save;
        }
        std::vector<FormulaPtr> elems;
        elems.push_back(parse_pred());
        while (accept(Tk::Comma)) elems.push_back(parse_pred());
        expect(Tk::RBrace, "'}'");
        return mk_node(NodeKind::SetExt, std::move(elems), open.span);
    }

    FormulaPtr parse_atom() {
        const Token t = peek();
        switch (t.kind) {
        case Tk::IntTok:
            advance();
            return mk_int(t.ival, t.span);
        case Tk::KwTrue:
            advance();
            return mk_bool(true, t.span);
        case Tk::KwFalse:
            advance();
            return mk_bool(false, t.span);
        case Tk::EmptySetTok:
            advance();
            return mk_node(NodeKind::SetExt, {}, t.span);
        case Tk::Ident: {
            advance();
            if (is_builtin_call(t.text) && at(Tk::LParen)) return parse_builtin_call(t);
            if ((t.text == "UNION" || t.text == "INTER") && at(Tk::Ident))
                return parse_quantified_setop(t);
            if (is_builtin_call(t.text))
                throw SyntaxError(t.span, "'" + t.text + "' is reserved; expected '('");
            return mk_ident(t.text, t.span);
        }
        case Tk::LParen: {
            advance();
            FormulaPtr inner = parse_pred();
            expect(Tk::RParen, "')'");
            return inner;
        }
        case Tk::LBrace:
            advance();
            return parse_set_literal(t);
        default:
            fail("expected a formula", {"formula"});
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

Project parse_project(const std::vector<SourceFile>& files) {
    Project project;
    for (const SourceFile& f : files) {
        Lexer lexer(f.name, f.text);
        Parser parser(lexer.lex());
        parser.parse_file(project);
    }
    return project;
}

FormulaPtr parse_formula(const std::string& text, const std::string& file) {
    Lexer lexer(file, text);
    Parser parser(lexer.lex());
    return parser.parse_single_formula();
}

std::vector<std::pair<std::string, FormulaPtr>> parse_bindings(const std::string& text,
                                                               const std::string& file) {
    Lexer lexer(file, text);
    Parser parser(lexer.lex());
    return parser.parse_bindings_doc();
}

} // namespace ebforge
