#pragma once

#include <charconv>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "postview/sql_ast.hpp"
#include "postview/text.hpp"

namespace postview::sql {

class SqlError : public Error {
public:
    enum class Kind { Syntax, Unsupported };

    SqlError(Kind kind, std::string message, std::size_t line, std::size_t column, std::size_t offset,
             std::string construct = {})
        : Error(format(kind, message, line, column)),
          kind_(kind),
          line_(line),
          column_(column),
          offset_(offset),
          construct_(std::move(construct)) {}

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    std::size_t offset() const { return offset_; }
    /// Name of the unsupported construct, for Kind::Unsupported.
    const std::string& construct() const { return construct_; }

private:
    static std::string format(Kind kind, const std::string& msg, std::size_t line, std::size_t column) {
        return std::string(kind == Kind::Syntax ? "syntax error" : "unsupported construct") + " at " +
               std::to_string(line) + ":" + std::to_string(column) + ": " + msg;
    }

    Kind kind_;
    std::size_t line_, column_, offset_;
    std::string construct_;
};

namespace detail {

enum class Tok { Ident, QuotedIdent, Keyword, Int, Float, String, Symbol, End };

struct Token {
    Tok type = Tok::End;
    std::string text;  // keywords upper-cased; symbols verbatim
    std::size_t offset = 0, line = 1, column = 1;
};

inline const std::set<std::string>& keywords() {
    static const std::set<std::string> k = {"SELECT", "DISTINCT", "FROM", "WHERE", "GROUP", "BY",    "HAVING",
                                            "ORDER",  "ASC",      "DESC", "LIMIT", "AND",   "OR",    "NOT",
                                            "LIKE",   "IN",       "EXISTS", "AS",  "NULL",  "TRUE",  "FALSE", "IS"};
    return k;
}

// Recognized so they fail with a construct name instead of a bare syntax error.
inline const std::set<std::string>& unsupported_keywords() {
    static const std::set<std::string> k = {
        "JOIN",  "INNER", "LEFT",   "RIGHT",  "OUTER",  "FULL",   "CROSS", "ON",     "USING",  "UNION",
        "INTERSECT", "EXCEPT", "WITH", "CASE", "WHEN", "THEN",  "ELSE",   "END",    "OVER",   "PARTITION",
        "WINDOW", "INSERT", "UPDATE", "DELETE", "CREATE", "DROP", "ALTER", "OFFSET", "BETWEEN",
        "CAST",  "ESCAPE", "GLOB", "REGEXP", "VALUES"};
    return k;
}

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto error = [&](const std::string& msg) { return SqlError(SqlError::Kind::Syntax, msg, line, col, i); };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
            while (i < src.size() && src[i] != '\n') advance();
            continue;
        }
        Token t;
        t.offset = i;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (text::is_alnum(src[j]) || src[j] == '_')) ++j;
            std::string word(src.substr(i, j - i));
            const std::string upper = text::to_upper(word);
            if (keywords().count(upper) || unsupported_keywords().count(upper)) {
                t.type = Tok::Keyword;
                t.text = upper;
            } else {
                t.type = Tok::Ident;
                t.text = std::move(word);
            }
            advance(j - i);
        } else if (c == '"') {
            advance();
            while (true) {
                if (i >= src.size()) throw error("unterminated quoted identifier");
                if (src[i] == '"') {
                    if (i + 1 < src.size() && src[i + 1] == '"') {
                        t.text.push_back('"');
                        advance(2);
                        continue;
                    }
                    advance();
                    break;
                }
                t.text.push_back(src[i]);
                advance();
            }
            if (t.text.empty()) throw error("empty quoted identifier");
            t.type = Tok::QuotedIdent;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            bool is_float = false;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                is_float = true;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    is_float = true;
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            t.type = is_float ? Tok::Float : Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (c == '\'') {
            advance();
            while (true) {
                if (i >= src.size()) throw SqlError(SqlError::Kind::Syntax, "unterminated string literal", t.line,
                                                    t.column, t.offset);
                if (src[i] == '\'') {
                    if (i + 1 < src.size() && src[i + 1] == '\'') {
                        t.text.push_back('\'');
                        advance(2);
                        continue;
                    }
                    advance();
                    break;
                }
                t.text.push_back(src[i]);
                advance();
            }
            t.type = Tok::String;
        } else {
            static const char* two[] = {"<=", ">=", "!=", "<>", "=="};
            std::string sym;
            for (const char* s : two)
                if (src.substr(i, 2) == s) sym = s;
            if (sym.empty()) {
                if (std::string_view("(),.*=<>+-/;").find(c) == std::string_view::npos)
                    throw error(std::string("unexpected character '") + c + "'");
                sym = std::string(1, c);
            }
            t.type = Tok::Symbol;
            t.text = sym;
            advance(sym.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.type = Tok::End;
    end.offset = src.empty() ? 0 : src.size() - 1;
    end.line = line;
    end.column = col > 1 ? col - 1 : 1;
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(lex(src)) {}

    QueryAst parse_statement() {
        QueryAst q = parse_query();
        accept_symbol(";");
        if (peek().type != Tok::End) fail_at(peek(), "unexpected '" + peek().text + "' after query");
        return q;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
        if (t.type == Tok::Keyword && unsupported_keywords().count(t.text))
            throw SqlError(SqlError::Kind::Unsupported, t.text + " is not supported", t.line, t.column, t.offset,
                           t.text);
        throw SqlError(SqlError::Kind::Syntax, msg, t.line, t.column, t.offset);
    }
    [[noreturn]] void unsupported(const Token& t, const std::string& construct) const {
        throw SqlError(SqlError::Kind::Unsupported, construct + " is not supported", t.line, t.column, t.offset,
                       construct);
    }

    bool is_keyword(const char* kw, std::size_t ahead = 0) const {
        return peek(ahead).type == Tok::Keyword && peek(ahead).text == kw;
    }
    bool is_symbol(const char* s, std::size_t ahead = 0) const {
        return peek(ahead).type == Tok::Symbol && peek(ahead).text == s;
    }
    bool accept_keyword(const char* kw) {
        if (!is_keyword(kw)) return false;
        next();
        return true;
    }
    bool accept_symbol(const char* s) {
        if (!is_symbol(s)) return false;
        next();
        return true;
    }
    void expect_keyword(const char* kw) {
        if (!accept_keyword(kw)) fail_at(peek(), std::string("expected ") + kw + describe_found());
    }
    void expect_symbol(const char* s) {
        if (!accept_symbol(s)) fail_at(peek(), std::string("expected '") + s + "'" + describe_found());
    }
    std::string describe_found() const {
        if (peek().type == Tok::End) return " but reached end of input";
        return " but found '" + peek().text + "'";
    }

    bool is_ident() const { return peek().type == Tok::Ident || peek().type == Tok::QuotedIdent; }

    std::string expect_ident(const char* what) {
        if (!is_ident()) fail_at(peek(), std::string("expected ") + what + describe_found());
        return next().text;
    }

    QueryAst parse_query() {
        QueryAst q;
        if (!is_keyword("SELECT")) fail_at(peek(), "expected SELECT" + describe_found());
        next();
        q.distinct = accept_keyword("DISTINCT");
        do {
            q.select_items.push_back(parse_select_item());
        } while (accept_symbol(","));
        expect_keyword("FROM");
        do {
            q.from.push_back(parse_table_ref());
        } while (accept_symbol(","));
        if (accept_keyword("WHERE")) q.where = parse_expr();
        if (accept_keyword("GROUP")) {
            expect_keyword("BY");
            do {
                q.group_by.push_back(parse_expr());
            } while (accept_symbol(","));
        }
        if (accept_keyword("HAVING")) q.having = parse_expr();
        if (accept_keyword("ORDER")) {
            expect_keyword("BY");
            do {
                OrderItem item{parse_expr(), false};
                if (accept_keyword("DESC"))
                    item.descending = true;
                else
                    accept_keyword("ASC");
                q.order_by.push_back(std::move(item));
            } while (accept_symbol(","));
        }
        if (accept_keyword("LIMIT")) {
            const Token& t = peek();
            if (t.type != Tok::Int) fail_at(t, "LIMIT expects a nonnegative integer" + describe_found());
            next();
            q.limit = parse_int(t);
        }
        return q;
    }

    SelectItem parse_select_item() {
        SelectItem item;
        if (accept_symbol("*")) {
            item.expr = star();
            return item;
        }
        item.expr = parse_expr();
        if (accept_keyword("AS"))
            item.alias = expect_ident("alias");
        else if (is_ident())
            item.alias = next().text;
        return item;
    }

    TableRef parse_table_ref() {
        TableRef ref;
        if (accept_symbol("(")) {
            if (!is_keyword("SELECT")) fail_at(peek(), "expected subquery" + describe_found());
            ref.subquery = Box<QueryAst>(parse_query());
            expect_symbol(")");
        } else {
            ref.view = expect_ident("view name");
            if (is_symbol("(")) unsupported(peek(), "table-valued function " + ref.view);
        }
        if (accept_keyword("AS"))
            ref.alias = expect_ident("alias");
        else if (is_ident())
            ref.alias = next().text;
        return ref;
    }

    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        Expr first = parse_and();
        if (!is_keyword("OR")) return first;
        std::vector<Expr> parts{std::move(first)};
        while (accept_keyword("OR")) parts.push_back(parse_and());
        return logical(ExprKind::Or, std::move(parts));
    }

    Expr parse_and() {
        Expr first = parse_not();
        if (!is_keyword("AND")) return first;
        std::vector<Expr> parts{std::move(first)};
        while (accept_keyword("AND")) parts.push_back(parse_not());
        return logical(ExprKind::And, std::move(parts));
    }

    Expr parse_not() {
        if (accept_keyword("NOT")) return negation(parse_not());
        return parse_predicate();
    }

    Expr parse_predicate() {
        Expr left = parse_additive();
        const bool row_value = left.kind == ExprKind::InSubquery && !left.subquery;
        if (peek().type == Tok::Symbol) {
            const std::string& s = peek().text;
            std::optional<CompareOp> op;
            if (s == "=" || s == "==") op = CompareOp::Eq;
            else if (s == "!=" || s == "<>") op = CompareOp::Ne;
            else if (s == "<") op = CompareOp::Lt;
            else if (s == "<=") op = CompareOp::Le;
            else if (s == ">") op = CompareOp::Gt;
            else if (s == ">=") op = CompareOp::Ge;
            if (op) {
                if (row_value) fail_at(peek(), "row value must be followed by IN");
                next();
                return cmp(*op, std::move(left), parse_additive());
            }
        }
        if (accept_keyword("IS")) {
            if (row_value) fail_at(peek(), "row value must be followed by IN");
            const bool is_not = accept_keyword("NOT");
            expect_keyword("NULL");
            Expr test = is_null(std::move(left));
            return is_not ? negation(std::move(test)) : test;
        }
        bool negated = false;
        if (is_keyword("NOT") && (is_keyword("LIKE", 1) || is_keyword("IN", 1))) {
            next();
            negated = true;
        }
        Expr result;
        if (accept_keyword("LIKE")) {
            if (row_value) fail_at(peek(), "row value must be followed by IN");
            const Token& t = peek();
            if (t.type != Tok::String) fail_at(t, "LIKE expects a string pattern" + describe_found());
            next();
            result = like(std::move(left), t.text);
            if (is_keyword("ESCAPE")) unsupported(peek(), "ESCAPE");
        } else if (is_keyword("IN")) {
            const Token& in_tok = next();
            expect_symbol("(");
            if (!is_keyword("SELECT")) unsupported(in_tok, "IN value list");
            QueryAst sub = parse_query();
            expect_symbol(")");
            std::vector<Expr> lhs = row_value ? std::move(left.args) : std::vector<Expr>{std::move(left)};
            result = in_subquery(std::move(lhs), std::move(sub));
        } else {
            if (row_value) fail_at(peek(), "row value must be followed by IN");
            return left;
        }
        return negated ? negation(std::move(result)) : result;
    }

    static bool is_row_marker(const Expr& e) { return e.kind == ExprKind::InSubquery && !e.subquery; }

    Expr operand(Expr e, const Token& at) const {
        if (is_row_marker(e)) fail_at(at, "row value must be followed by IN");
        return e;
    }

    Expr parse_additive() {
        Expr left = parse_multiplicative();
        while (is_symbol("+") || is_symbol("-")) {
            const Token& op_tok = next();
            const ArithOp op = op_tok.text == "+" ? ArithOp::Add : ArithOp::Sub;
            left = operand(std::move(left), op_tok);
            left = arith(op, std::move(left), operand(parse_multiplicative(), op_tok));
        }
        return left;
    }

    Expr parse_multiplicative() {
        Expr left = parse_unary();
        while (is_symbol("*") || is_symbol("/")) {
            const Token& op_tok = next();
            const ArithOp op = op_tok.text == "*" ? ArithOp::Mul : ArithOp::Div;
            left = operand(std::move(left), op_tok);
            left = arith(op, std::move(left), operand(parse_unary(), op_tok));
        }
        return left;
    }

    Expr parse_unary() {
        if (is_symbol("-")) {
            next();
            if (peek().type == Tok::Int || peek().type == Tok::Float) {
                const Token& t = next();
                if (t.type == Tok::Int) {
                    // parse "-N" directly so INT64_MIN stays representable
                    std::int64_t v{};
                    const std::string txt = "-" + t.text;
                    auto [p, ec] = std::from_chars(txt.data(), txt.data() + txt.size(), v);
                    if (ec != std::errc{} || p != txt.data() + txt.size()) fail_at(t, "integer literal out of range");
                    return lit(v);
                }
                return lit(-parse_float(t));
            }
            const Token& at = peek();
            Expr e;
            e.kind = ExprKind::Negate;
            e.args.push_back(operand(parse_unary(), at));
            return e;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = peek();
        switch (t.type) {
            case Tok::Int: next(); return lit(parse_int(t));
            case Tok::Float: next(); return lit(parse_float(t));
            case Tok::String: next(); return lit(std::string(t.text));
            case Tok::Keyword:
                if (t.text == "NULL") { next(); return lit(Value{}); }
                if (t.text == "TRUE") { next(); return lit(true); }
                if (t.text == "FALSE") { next(); return lit(false); }
                if (t.text == "EXISTS") {
                    next();
                    expect_symbol("(");
                    QueryAst sub = parse_query();
                    expect_symbol(")");
                    return exists(std::move(sub));
                }
                fail_at(t, "unexpected keyword " + t.text);
            case Tok::Symbol:
                if (t.text == "(") {
                    next();
                    if (is_keyword("SELECT")) unsupported(t, "scalar subquery");
                    Expr inner = parse_expr();
                    if (accept_symbol(",")) {
                        std::vector<Expr> row{std::move(inner)};
                        do {
                            row.push_back(parse_expr());
                        } while (accept_symbol(","));
                        expect_symbol(")");
                        Expr marker;
                        marker.kind = ExprKind::InSubquery;
                        marker.args = std::move(row);
                        return marker;
                    }
                    expect_symbol(")");
                    return inner;
                }
                fail_at(t, "unexpected '" + t.text + "'");
            case Tok::Ident:
            case Tok::QuotedIdent: return parse_name();
            case Tok::End: fail_at(t, "unexpected end of input");
        }
        fail_at(t, "unexpected token");
    }

    Expr parse_name() {
        const Token& first = next();
        if (first.type == Tok::Ident && is_symbol("(")) {
            const std::string fn = text::to_upper(first.text);
            next();
            if (fn == "CLOSE_ENOUGH") {
                const Token& p = peek();
                if (p.type != Tok::String) fail_at(p, "CLOSE_ENOUGH expects a string pattern" + describe_found());
                next();
                expect_symbol(",");
                if (!is_ident()) fail_at(peek(), "CLOSE_ENOUGH expects a column" + describe_found());
                Expr target = parse_column_ref(next());
                expect_symbol(")");
                return close_enough(p.text, std::move(target));
            }
            std::optional<AggFn> agg_fn;
            if (fn == "COUNT") agg_fn = AggFn::Count;
            else if (fn == "SUM") agg_fn = AggFn::Sum;
            else if (fn == "AVG") agg_fn = AggFn::Avg;
            else if (fn == "MIN") agg_fn = AggFn::Min;
            else if (fn == "MAX") agg_fn = AggFn::Max;
            if (!agg_fn) unsupported(first, "function " + fn);
            if (is_keyword("DISTINCT")) unsupported(peek(), fn + "(DISTINCT ...)");
            Expr call;
            if (*agg_fn == AggFn::Count && accept_symbol("*")) {
                call = agg(AggFn::CountStar);
            } else {
                call = agg(*agg_fn, parse_expr());
            }
            expect_symbol(")");
            if (is_keyword("OVER")) unsupported(peek(), "OVER");
            return call;
        }
        return parse_column_ref(first);
    }

    Expr parse_column_ref(const Token& first) {
        if (accept_symbol(".")) {
            if (is_symbol("*")) unsupported(peek(), "qualified star");
            return col(expect_ident("column name"), first.text);
        }
        return col(first.text);
    }

    std::int64_t parse_int(const Token& t) const {
        std::int64_t v{};
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size()) fail_at(t, "integer literal out of range");
        return v;
    }

    double parse_float(const Token& t) const {
        double v{};
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size()) fail_at(t, "bad float literal");
        return v;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one SELECT statement of the supported subset.
inline QueryAst parse(std::string_view sql_text) { return detail::Parser(sql_text).parse_statement(); }

}  // namespace postview::sql
