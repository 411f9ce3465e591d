#include "pbnsynth/pbif.hpp"

#include <cctype>
#include <map>
#include <set>

#include "pbnsynth/errors.hpp"

namespace pbnsynth {

namespace {

enum class Tok {
    ident,
    number,
    lbrace,
    rbrace,
    lparen,
    rparen,
    lbracket,
    rbracket,
    pipe,
    comma,
    semicolon,
    colon,
    equals,
    plus,
    minus,
    star,
    caret,
    lt,
    le,
    gt,
    ge,
    end,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    Token const& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(std::string const& message) const {
        throw ParseError(message, current_.line, current_.column);
    }

private:
    void advance() {
        skip_space_and_comments();
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= text_.size()) {
            current_ = {Tok::end, "", line_, column_};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_' || text_[pos_] == '.' || text_[pos_] == '-')) {
                bump();
            }
            current_ = {Tok::ident, std::string(text_.substr(start, pos_ - start)), current_.line, current_.column};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                bump();
            }
            if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
                std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
                bump();
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    bump();
                }
            } else if (pos_ + 1 < text_.size() && text_[pos_] == '/' &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
                bump();
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    bump();
                }
            }
            current_ = {Tok::number, std::string(text_.substr(start, pos_ - start)), current_.line, current_.column};
            return;
        }
        switch (c) {
            case '{': one(Tok::lbrace); return;
            case '}': one(Tok::rbrace); return;
            case '(': one(Tok::lparen); return;
            case ')': one(Tok::rparen); return;
            case '[': one(Tok::lbracket); return;
            case ']': one(Tok::rbracket); return;
            case '|': one(Tok::pipe); return;
            case ',': one(Tok::comma); return;
            case ';': one(Tok::semicolon); return;
            case ':': one(Tok::colon); return;
            case '=': one(Tok::equals); return;
            case '+': one(Tok::plus); return;
            case '-': one(Tok::minus); return;
            case '*': one(Tok::star); return;
            case '^': one(Tok::caret); return;
            case '<':
                bump();
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    bump();
                    current_ = {Tok::le, "<=", current_.line, current_.column};
                } else {
                    current_ = {Tok::lt, "<", current_.line, current_.column};
                }
                return;
            case '>':
                bump();
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    bump();
                    current_ = {Tok::ge, ">=", current_.line, current_.column};
                } else {
                    current_ = {Tok::gt, ">", current_.line, current_.column};
                }
                return;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
        }
    }

    void one(Tok kind) {
        current_ = {kind, std::string(1, text_[pos_]), current_.line, current_.column};
        bump();
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    bump();
                }
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    bump();
                }
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_{Tok::end, "", 1, 1};
};

class ExprParser {
public:
    ExprParser(Lexer& lex, ParamSetPtr const& params, bool allow_pow)
        : lex_(lex), params_(params), allow_pow_(allow_pow) {}

    Polynomial parse() { return expression(); }

private:
    Polynomial expression() {
        Polynomial value = term();
        while (lex_.peek().kind == Tok::plus || lex_.peek().kind == Tok::minus) {
            bool minus = lex_.next().kind == Tok::minus;
            Polynomial rhs = term();
            if (minus) {
                value -= rhs;
            } else {
                value += rhs;
            }
        }
        return value;
    }

    Polynomial term() {
        Polynomial value = factor();
        while (lex_.peek().kind == Tok::star) {
            lex_.next();
            value *= factor();
        }
        return value;
    }

    Polynomial factor() {
        if (lex_.peek().kind == Tok::minus) {
            lex_.next();
            return -factor();
        }
        Polynomial base = primary();
        if (lex_.peek().kind == Tok::caret) {
            if (!allow_pow_) {
                lex_.fail("'^' is not part of the model expression grammar");
            }
            Token caret = lex_.next();
            if (lex_.peek().kind != Tok::number) {
                lex_.fail("expected an integer exponent after '^'");
            }
            Token expo = lex_.next();
            long e = 0;
            try {
                e = std::stol(expo.text);
            } catch (...) {
                e = -1;
            }
            if (e < 0 || expo.text.find_first_of("./") != std::string::npos) {
                throw ParseError("expected a nonnegative integer exponent", caret.line, caret.column);
            }
            Polynomial out = Polynomial::constant(params_, 1);
            for (long i = 0; i < e; ++i) {
                out *= base;
            }
            return out;
        }
        return base;
    }

    Polynomial primary() {
        Token t = lex_.peek();
        switch (t.kind) {
            case Tok::number:
                lex_.next();
                return Polynomial::constant(params_, rational_from_string(t.text));
            case Tok::ident: {
                lex_.next();
                auto index = params_->index_of(t.text);
                if (!index) {
                    throw ParseError("undeclared parameter '" + t.text + "'", t.line, t.column);
                }
                return Polynomial::variable(params_, *index);
            }
            case Tok::lparen: {
                lex_.next();
                Polynomial inner = expression();
                expect(Tok::rparen, "')'");
                return inner;
            }
            default:
                lex_.fail("expected a number, parameter or '('");
        }
    }

    void expect(Tok kind, std::string const& what) {
        if (lex_.peek().kind != kind) {
            lex_.fail("expected " + what);
        }
        lex_.next();
    }

    Lexer& lex_;
    ParamSetPtr const& params_;
    bool allow_pow_;
};

Rational default_lower() { return Rational(1, 1000000); }
Rational default_upper() { return Rational(999999, 1000000); }

class PbifParser {
public:
    explicit PbifParser(std::string_view text) : lex_(text) {}

    Pbn parse() {
        expect_keyword("network");
        if (lex_.peek().kind != Tok::ident && lex_.peek().kind != Tok::number) {
            lex_.fail("expected a network name");
        }
        lex_.next();
        expect(Tok::lbrace, "'{'");
        skip_properties();
        expect(Tok::rbrace, "'}'");

        while (lex_.peek().kind != Tok::end) {
            Token t = lex_.peek();
            if (t.kind != Tok::ident) {
                lex_.fail("expected 'parameters', 'variable' or 'probability'");
            }
            if (t.text == "parameters") {
                parse_parameters();
            } else if (t.text == "variable") {
                parse_variable();
            } else if (t.text == "probability") {
                parse_probability();
            } else {
                lex_.fail("unknown block '" + t.text + "'");
            }
        }
        return build();
    }

private:
    void parse_parameters() {
        Token block = lex_.next();
        if (params_) {
            throw ParseError("duplicate parameters block", block.line, block.column);
        }
        if (!variables_.empty()) {
            throw ParseError("parameters block must precede variable blocks", block.line, block.column);
        }
        expect(Tok::lbrace, "'{'");
        std::vector<Parameter> params;
        while (lex_.peek().kind != Tok::rbrace) {
            Token name = expect(Tok::ident, "a parameter name");
            Rational lo = default_lower();
            Rational hi = default_upper();
            if (lex_.peek().kind == Tok::ident && lex_.peek().text == "in") {
                lex_.next();
                expect(Tok::lbracket, "'['");
                lo = number("a lower bound");
                expect(Tok::comma, "','");
                hi = number("an upper bound");
                expect(Tok::rbracket, "']'");
            }
            if (lo < 0 || hi > 1 || !(lo < hi)) {
                throw ParseError("parameter '" + name.text + "' needs bounds 0 <= lower < upper <= 1", name.line,
                                 name.column);
            }
            expect(Tok::semicolon, "';'");
            params.push_back({name.text, std::move(lo), std::move(hi)});
        }
        lex_.next();  // '}'
        params_ = make_parameter_set(std::move(params));
    }

    void parse_variable() {
        lex_.next();
        Token name = expect_name("a variable name");
        if (var_index_.count(name.text)) {
            throw ParseError("duplicate variable '" + name.text + "'", name.line, name.column);
        }
        expect(Tok::lbrace, "'{'");
        skip_properties();
        expect_keyword("type");
        expect_keyword("discrete");
        expect(Tok::lbracket, "'['");
        Token count = expect(Tok::number, "a domain size");
        expect(Tok::rbracket, "']'");
        expect(Tok::lbrace, "'{'");
        std::vector<std::string> labels;
        while (true) {
            Token label = expect_name("a value label");
            labels.push_back(label.text);
            if (lex_.peek().kind == Tok::comma) {
                lex_.next();
                continue;
            }
            break;
        }
        expect(Tok::rbrace, "'}'");
        expect(Tok::semicolon, "';'");
        skip_properties();
        expect(Tok::rbrace, "'}'");
        if (std::to_string(labels.size()) != count.text) {
            throw ParseError("variable '" + name.text + "' declares " + count.text + " values but lists " +
                                 std::to_string(labels.size()),
                             name.line, name.column);
        }
        var_index_[name.text] = variables_.size();
        variables_.push_back({name.text, std::move(labels)});
    }

    void parse_probability() {
        Token block = lex_.next();
        ensure_params();
        expect(Tok::lparen, "'('");
        Token owner_tok = expect_name("a variable name");
        std::size_t owner = lookup_variable(owner_tok);
        std::vector<std::size_t> parents;
        if (lex_.peek().kind == Tok::pipe) {
            lex_.next();
            while (true) {
                Token parent_tok = expect_name("a parent variable name");
                parents.push_back(lookup_variable(parent_tok));
                if (lex_.peek().kind == Tok::comma) {
                    lex_.next();
                    continue;
                }
                break;
            }
        }
        expect(Tok::rparen, "')'");
        if (cpts_.count(owner)) {
            throw ParseError("duplicate probability block for '" + owner_tok.text + "'", block.line, block.column);
        }

        std::size_t row_count = 1;
        for (auto p : parents) {
            row_count *= variables_[p].domain.size();
        }
        std::vector<std::vector<Polynomial>> rows(row_count);
        expect(Tok::lbrace, "'{'");
        skip_properties();
        while (lex_.peek().kind != Tok::rbrace) {
            if (lex_.peek().kind == Tok::ident && lex_.peek().text == "table") {
                Token table = lex_.next();
                if (!parents.empty()) {
                    throw ParseError("'table' rows are only valid without parents", table.line, table.column);
                }
                if (!rows[0].empty()) {
                    throw ParseError("duplicate table row", table.line, table.column);
                }
                rows[0] = parse_entries(owner, table);
            } else {
                Token open = expect(Tok::lparen, "'(' or 'table'");
                if (parents.empty()) {
                    throw ParseError("conditional row in a parentless table", open.line, open.column);
                }
                std::vector<std::size_t> parent_values;
                for (std::size_t i = 0; i < parents.size(); ++i) {
                    if (i > 0) {
                        expect(Tok::comma, "','");
                    }
                    Token label = expect_name("a parent value label");
                    parent_values.push_back(lookup_value(parents[i], label));
                }
                expect(Tok::rparen, "')'");
                std::size_t index = 0;
                for (std::size_t i = 0; i < parents.size(); ++i) {
                    index = index * variables_[parents[i]].domain.size() + parent_values[i];
                }
                if (!rows[index].empty()) {
                    throw ParseError("duplicate row for this parent valuation", open.line, open.column);
                }
                rows[index] = parse_entries(owner, open);
            }
            skip_properties();
        }
        lex_.next();  // '}'
        cpts_[owner] = {owner, std::move(parents), std::move(rows)};
    }

    std::vector<Polynomial> parse_entries(std::size_t owner, Token const& at) {
        std::size_t expected = variables_[owner].domain.size();
        std::vector<Polynomial> entries;
        for (std::size_t i = 0; i < expected; ++i) {
            if (i > 0) {
                expect(Tok::comma, "','");
            }
            ExprParser expr(lex_, params_, /*allow_pow=*/false);
            entries.push_back(expr.parse());
        }
        if (lex_.peek().kind == Tok::comma) {
            throw ParseError("row has more than " + std::to_string(expected) + " entries", lex_.peek().line,
                             lex_.peek().column);
        }
        expect(Tok::semicolon, "';'");
        (void)at;
        return entries;
    }

    Pbn build() {
        ensure_params();
        if (variables_.empty()) {
            throw ParseError("model declares no variables", 1, 1);
        }
        std::vector<Cpt> cpts;
        cpts.reserve(variables_.size());
        for (std::size_t v = 0; v < variables_.size(); ++v) {
            auto it = cpts_.find(v);
            if (it == cpts_.end()) {
                // Reported by validate() as a missing-row violation.
                cpts.push_back({v, {}, std::vector<std::vector<Polynomial>>(1)});
            } else {
                cpts.push_back(std::move(it->second));
            }
        }
        return Pbn(params_, std::move(variables_), std::move(cpts));
    }

    void ensure_params() {
        if (!params_) {
            params_ = make_parameter_set({});
        }
    }

    std::size_t lookup_variable(Token const& tok) {
        auto it = var_index_.find(tok.text);
        if (it == var_index_.end()) {
            throw ParseError("undeclared variable '" + tok.text + "'", tok.line, tok.column);
        }
        return it->second;
    }

    std::size_t lookup_value(std::size_t variable, Token const& tok) {
        auto const& domain = variables_[variable].domain;
        for (std::size_t i = 0; i < domain.size(); ++i) {
            if (domain[i] == tok.text) {
                return i;
            }
        }
        throw ParseError("'" + tok.text + "' is not a value of variable '" + variables_[variable].name + "'",
                         tok.line, tok.column);
    }

    void skip_properties() {
        while (lex_.peek().kind == Tok::ident && lex_.peek().text == "property") {
            while (lex_.peek().kind != Tok::semicolon && lex_.peek().kind != Tok::end) {
                lex_.next();
            }
            expect(Tok::semicolon, "';'");
        }
    }

    Token expect(Tok kind, std::string const& what) {
        if (lex_.peek().kind != kind) {
            lex_.fail("expected " + what);
        }
        return lex_.next();
    }

    Token expect_name(std::string const& what) {
        if (lex_.peek().kind != Tok::ident && lex_.peek().kind != Tok::number) {
            lex_.fail("expected " + what);
        }
        return lex_.next();
    }

    void expect_keyword(std::string const& word) {
        if (lex_.peek().kind != Tok::ident || lex_.peek().text != word) {
            lex_.fail("expected '" + word + "'");
        }
        lex_.next();
    }

    Rational number(std::string const& what) {
        Token t = expect(Tok::number, what);
        return rational_from_string(t.text);
    }

    Lexer lex_;
    ParamSetPtr params_;
    std::vector<RandomVariable> variables_;
    std::map<std::string, std::size_t> var_index_;
    std::map<std::size_t, Cpt> cpts_;
};

}  // namespace

Pbn parse_pbif(std::string_view text) {
    PbifParser parser(text);
    return parser.parse();
}

Polynomial parse_polynomial(std::string_view text, ParamSetPtr const& params, bool allow_pow) {
    Lexer lex(text);
    ExprParser expr(lex, params, allow_pow);
    Polynomial p = expr.parse();
    if (lex.peek().kind != Tok::end) {
        lex.fail("trailing input after expression");
    }
    return p;
}

std::string render_pbif(Pbn const& bn, std::string_view network_name) {
    std::string out = "network " + std::string(network_name) + " {\n}\n";
    auto const& params = *bn.parameter_set();
    if (!params.empty()) {
        out += "parameters {\n";
        for (auto const& p : params.all()) {
            out += "  " + p.name + " in [" + rational_str(p.lower) + ", " + rational_str(p.upper) + "];\n";
        }
        out += "}\n";
    }
    for (auto const& var : bn.variables()) {
        out += "variable " + var.name + " {\n  type discrete [ " + std::to_string(var.domain.size()) + " ] { ";
        for (std::size_t i = 0; i < var.domain.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            out += var.domain[i];
        }
        out += " };\n}\n";
    }
    for (std::size_t v = 0; v < bn.variable_count(); ++v) {
        auto const& cpt = bn.cpt(v);
        out += "probability ( " + bn.variable(v).name;
        if (!cpt.parents.empty()) {
            out += " | ";
            for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                out += bn.variable(cpt.parents[i]).name;
            }
        }
        out += " ) {\n";
        for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
            if (cpt.parents.empty()) {
                out += "  table ";
            } else {
                auto valuation = bn.parent_valuation(v, r);
                out += "  (";
                for (std::size_t i = 0; i < valuation.size(); ++i) {
                    if (i > 0) {
                        out += ", ";
                    }
                    out += bn.variable(cpt.parents[i]).domain[valuation[i]];
                }
                out += ") ";
            }
            for (std::size_t e = 0; e < cpt.rows[r].size(); ++e) {
                if (e > 0) {
                    out += ", ";
                }
                out += cpt.rows[r][e].render(PowerStyle::repeated);
            }
            out += ";\n";
        }
        out += "}\n";
    }
    return out;
}

namespace {

Assignment parse_assignment_list(Lexer& lex, Pbn const& bn, std::string const& what) {
    Assignment out;
    while (true) {
        Token var_tok = lex.peek();
        if (var_tok.kind != Tok::ident && var_tok.kind != Tok::number) {
            lex.fail("expected a variable name in " + what);
        }
        lex.next();
        auto var = bn.variable_index(var_tok.text);
        if (!var) {
            throw ParseError("unknown variable '" + var_tok.text + "'", var_tok.line, var_tok.column);
        }
        if (lex.peek().kind != Tok::equals) {
            lex.fail("expected '='");
        }
        lex.next();
        Token val_tok = lex.peek();
        if (val_tok.kind != Tok::ident && val_tok.kind != Tok::number) {
            lex.fail("expected a value label");
        }
        lex.next();
        auto val = bn.value_index(*var, val_tok.text);
        if (!val) {
            throw ParseError("'" + val_tok.text + "' is not a value of variable '" + var_tok.text + "'",
                             val_tok.line, val_tok.column);
        }
        try {
            out.set(*var, *val);
        } catch (Error const&) {
            throw ParseError("variable '" + var_tok.text + "' assigned twice", var_tok.line, var_tok.column);
        }
        if (lex.peek().kind == Tok::comma) {
            lex.next();
            continue;
        }
        return out;
    }
}

bool same_variable_set(Assignment const& a, Assignment const& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.pairs().size(); ++i) {
        if (a.pairs()[i].first != b.pairs()[i].first) {
            return false;
        }
    }
    return true;
}

}  // namespace

Query parse_query(std::string_view text, Pbn const& bn) {
    Lexer lex(text);
    Token head = lex.peek();
    if (head.kind != Tok::ident) {
        lex.fail("expected 'P', 'RATIO' or 'DIFF'");
    }
    Query q;
    if (head.text == "P") {
        q.kind = QueryKind::probability;
    } else if (head.text == "RATIO") {
        q.kind = QueryKind::ratio;
    } else if (head.text == "DIFF") {
        q.kind = QueryKind::difference;
    } else {
        lex.fail("expected 'P', 'RATIO' or 'DIFF'");
    }
    lex.next();
    if (lex.peek().kind != Tok::lparen) {
        lex.fail("expected '('");
    }
    lex.next();
    q.hypothesis = parse_assignment_list(lex, bn, "the hypothesis");
    if (q.kind == QueryKind::ratio) {
        if (lex.peek().kind != Tok::colon) {
            lex.fail("expected ':'");
        }
        lex.next();
        q.alternative = parse_assignment_list(lex, bn, "the alternative hypothesis");
    } else if (q.kind == QueryKind::difference) {
        if (lex.peek().kind != Tok::minus) {
            lex.fail("expected '-'");
        }
        lex.next();
        q.alternative = parse_assignment_list(lex, bn, "the alternative hypothesis");
    }
    if (q.alternative && !same_variable_set(q.hypothesis, *q.alternative)) {
        throw ParseError("the alternative must assign the same variables as the hypothesis", head.line, head.column);
    }
    if (lex.peek().kind == Tok::pipe) {
        lex.next();
        q.evidence = parse_assignment_list(lex, bn, "the evidence");
    }
    if (lex.peek().kind != Tok::rparen) {
        lex.fail("expected ')'");
    }
    lex.next();
    switch (lex.peek().kind) {
        case Tok::lt: q.cmp = Cmp::lt; break;
        case Tok::le: q.cmp = Cmp::le; break;
        case Tok::gt: q.cmp = Cmp::gt; break;
        case Tok::ge: q.cmp = Cmp::ge; break;
        default: lex.fail("expected a comparison (<, <=, >, >=)");
    }
    lex.next();
    bool negative = false;
    if (lex.peek().kind == Tok::minus) {
        negative = true;
        lex.next();
    }
    Token threshold = lex.peek();
    if (threshold.kind != Tok::number) {
        lex.fail("expected a threshold");
    }
    lex.next();
    q.threshold = rational_from_string(threshold.text);
    if (negative) {
        q.threshold = -q.threshold;
    }
    if (lex.peek().kind != Tok::end) {
        lex.fail("trailing input after the query");
    }
    switch (q.kind) {
        case QueryKind::probability:
            if (q.threshold < 0 || q.threshold > 1) {
                throw ParseError("probability threshold out of [0,1]", threshold.line, threshold.column);
            }
            break;
        case QueryKind::ratio:
            if (q.threshold < 0) {
                throw ParseError("ratio threshold must be nonnegative", threshold.line, threshold.column);
            }
            break;
        case QueryKind::difference:
            if (q.threshold < -1 || q.threshold > 1) {
                throw ParseError("difference threshold out of [-1,1]", threshold.line, threshold.column);
            }
            break;
    }
    return q;
}

}  // namespace pbnsynth
