// SPDX-License-Identifier: Apache-2.0
#include "qviz/sql/parser.hpp"

#include <charconv>
#include <sstream>

#include "qviz/sql/lexer.hpp"

namespace qviz::sql {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view source) : source_(source), tokens_(tokenize(source)) {}

  SelectQuery parse_statement() {
    if (tokens_.empty()) {
      throw Error(ErrorCode::ParseError, "empty query", SourceSpan{0, 0}, {"select"});
    }
    SelectQuery query = parse_query();
    if (peek_kind(TokenKind::Semicolon)) ++pos_;
    if (!at_end()) {
      reject_trailing();
      fail({"end of query"});
    }
    return query;
  }

 private:
  // --- token helpers -------------------------------------------------------

  [[nodiscard]] bool at_end() const { return pos_ >= tokens_.size(); }

  [[nodiscard]] const Token* current() const { return at_end() ? nullptr : &tokens_[pos_]; }

  [[nodiscard]] const Token* lookahead(std::size_t k) const {
    return pos_ + k < tokens_.size() ? &tokens_[pos_ + k] : nullptr;
  }

  [[nodiscard]] bool peek_kind(TokenKind kind) const {
    return !at_end() && tokens_[pos_].kind == kind;
  }

  [[nodiscard]] bool peek_keyword(std::string_view word) const {
    return !at_end() && tokens_[pos_].kind == TokenKind::Keyword && tokens_[pos_].text == word;
  }

  [[nodiscard]] SourceSpan here() const {
    if (!at_end()) return tokens_[pos_].span;
    return SourceSpan{source_.size(), source_.size()};
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = at_end() ? "end of input"
                                 : "'" + std::string(tokens_[pos_].span.slice(source_)) + "'";
    std::string message = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) message += (i + 1 == expected.size()) ? " or " : ", ";
      message += expected[i];
    }
    message += ", found " + found;
    throw Error(ErrorCode::ParseError, std::move(message), here(), std::move(expected));
  }

  const Token& expect_keyword(std::string_view word) {
    if (!peek_keyword(word)) fail({"'" + std::string(word) + "'"});
    return tokens_[pos_++];
  }

  const Token& expect(TokenKind kind) {
    if (!peek_kind(kind)) fail({std::string(to_string(kind))});
    return tokens_[pos_++];
  }

  [[nodiscard]] SourceSpan previous_span() const { return tokens_[pos_ - 1].span; }

  // --- subset boundary -----------------------------------------------------

  /// Raises UnsupportedFeature if the current token starts a construct
  /// outside the subset.
  void reject_unsupported() const {
    const Token* tok = current();
    if (tok == nullptr || tok->kind != TokenKind::Keyword) return;
    const std::string& w = tok->text;
    if (w == "or") throw Error::unsupported("OR", tok->span);
    if (w == "group") throw Error::unsupported("GROUP BY", tok->span);
    if (w == "having") throw Error::unsupported("HAVING", tok->span);
    if (w == "order") throw Error::unsupported("ORDER BY", tok->span);
    if (w == "limit" || w == "offset") throw Error::unsupported("LIMIT", tok->span);
    if (w == "union") throw Error::unsupported("UNION", tok->span);
    if (w == "intersect") throw Error::unsupported("INTERSECT", tok->span);
    if (w == "except") throw Error::unsupported("EXCEPT", tok->span);
    if (w == "join" || w == "inner" || w == "cross" || w == "natural") {
      throw Error::unsupported("JOIN", tok->span);
    }
    if (w == "left" || w == "right" || w == "full" || w == "outer") {
      throw Error::unsupported("outer join", tok->span);
    }
    if (w == "is" || w == "null") throw Error::unsupported("NULL", tok->span);
    if (w == "like") throw Error::unsupported("LIKE", tok->span);
    if (w == "between") throw Error::unsupported("BETWEEN", tok->span);
    if (w == "case") throw Error::unsupported("CASE", tok->span);
    if (w == "with") throw Error::unsupported("WITH", tok->span);
  }

  void reject_trailing() const { reject_unsupported(); }

  // --- grammar -------------------------------------------------------------

  SelectQuery parse_query() {
    reject_unsupported();
    SelectQuery query;
    const Token& select = expect_keyword("select");
    query.span.start = select.span.start;
    query.selectSpan.start = select.span.start;

    if (peek_keyword("distinct")) {
      ++pos_;
      query.distinct = true;
    } else if (peek_keyword("all")) {
      ++pos_;
    }

    if (peek_kind(TokenKind::Star)) {
      ++pos_;
      query.star = true;
    } else {
      query.select.push_back(parse_select_item());
      while (peek_kind(TokenKind::Comma)) {
        ++pos_;
        query.select.push_back(parse_select_item());
      }
    }
    query.selectSpan.end = previous_span().end;

    reject_unsupported();
    expect_keyword("from");
    query.from.push_back(parse_from_item());
    while (peek_kind(TokenKind::Comma)) {
      ++pos_;
      query.from.push_back(parse_from_item());
    }
    reject_unsupported();

    if (peek_keyword("where")) {
      ++pos_;
      parse_conjunction(query.where);
    }
    reject_unsupported();
    query.span.end = previous_span().end;
    return query;
  }

  SelectItem parse_select_item() {
    reject_unsupported();
    if (peek_kind(TokenKind::Identifier) && lookahead(1) != nullptr &&
        lookahead(1)->kind == TokenKind::LParen) {
      throw Error::unsupported("aggregates", current()->span);
    }
    if (peek_kind(TokenKind::Integer) || peek_kind(TokenKind::String)) {
      throw Error::unsupported("constant select item", current()->span);
    }
    SelectItem item;
    item.attr = parse_attr_ref();
    item.span = item.attr.span;
    if (peek_keyword("as")) {
      ++pos_;
      item.outputName = expect(TokenKind::Identifier).text;
      item.span.end = previous_span().end;
    } else if (peek_kind(TokenKind::Identifier)) {
      item.outputName = tokens_[pos_++].text;
      item.span.end = previous_span().end;
    }
    return item;
  }

  AttrRef parse_attr_ref() {
    const Token& first = expect(TokenKind::Identifier);
    AttrRef ref;
    ref.span = first.span;
    if (peek_kind(TokenKind::Dot)) {
      ++pos_;
      if (peek_kind(TokenKind::Star)) throw Error::unsupported("qualified *", current()->span);
      const Token& second = expect(TokenKind::Identifier);
      ref.qualifier = first.text;
      ref.name = second.text;
      ref.span.end = second.span.end;
    } else {
      ref.name = first.text;
    }
    return ref;
  }

  FromItem parse_from_item() {
    reject_unsupported();
    if (peek_kind(TokenKind::LParen)) throw Error::unsupported("derived table", here());
    const Token& rel = expect(TokenKind::Identifier);
    FromItem item;
    item.id = next_from_id_++;
    item.relation = rel.text;
    item.displayName = std::string(rel.span.slice(source_));
    if (!item.displayName.empty() && item.displayName.front() == '"') {
      item.displayName = item.displayName.substr(1, item.displayName.size() - 2);
    }
    item.alias = rel.text;
    item.span = rel.span;
    if (peek_keyword("as")) {
      ++pos_;
      item.alias = expect(TokenKind::Identifier).text;
      item.explicitAlias = true;
    } else if (peek_kind(TokenKind::Identifier)) {
      item.alias = tokens_[pos_++].text;
      item.explicitAlias = true;
    }
    item.span.end = previous_span().end;
    return item;
  }

  void parse_conjunction(std::vector<Conjunct>& out) {
    parse_conjunct(out);
    while (true) {
      reject_unsupported();
      if (!peek_keyword("and")) break;
      ++pos_;
      parse_conjunct(out);
    }
  }

  void parse_conjunct(std::vector<Conjunct>& out) {
    reject_unsupported();
    const SourceSpan start = here();

    if (peek_kind(TokenKind::LParen)) {
      const Token* next = lookahead(1);
      if (next != nullptr && next->kind == TokenKind::Keyword && next->text == "select") {
        throw Error::unsupported("scalar subquery", start);
      }
      ++pos_;
      parse_conjunction(out);
      expect(TokenKind::RParen);
      return;
    }

    bool negated = false;
    if (peek_keyword("not")) {
      ++pos_;
      negated = true;
      if (!peek_keyword("exists")) {
        throw Error::unsupported("NOT over a comparison", SourceSpan{start.start, here().end});
      }
    }
    if (peek_keyword("exists")) {
      ++pos_;
      ExistsPredicate pred;
      pred.negated = negated;
      pred.subquery = parse_subquery();
      pred.span = SourceSpan{start.start, previous_span().end};
      out.emplace_back(std::move(pred));
      return;
    }

    Operand left = parse_operand();
    reject_unsupported();

    bool notIn = false;
    if (peek_keyword("not")) {
      ++pos_;
      if (!peek_keyword("in")) fail({"'in'"});
      notIn = true;
    }
    if (peek_keyword("in")) {
      const SourceSpan inSpan = here();
      ++pos_;
      auto* attr = std::get_if<AttrRef>(&left);
      if (attr == nullptr) throw Error::unsupported("constant IN test", start);
      if (!peek_kind(TokenKind::LParen)) fail({"'('"});
      const Token* next = lookahead(1);
      if (next == nullptr || next->kind != TokenKind::Keyword || next->text != "select") {
        throw Error::unsupported("IN value list", inSpan);
      }
      InPredicate pred;
      pred.negated = notIn;
      pred.test = std::move(*attr);
      pred.subquery = parse_subquery();
      pred.span = SourceSpan{start.start, previous_span().end};
      if (pred.subquery->star || pred.subquery->select.size() != 1) {
        throw Error(ErrorCode::ParseError, "IN subquery must select exactly one attribute",
                    pred.subquery->selectSpan, {"exactly one select item"});
      }
      out.emplace_back(std::move(pred));
      return;
    }

    if (!peek_kind(TokenKind::Operator)) fail({"comparison operator", "'in'", "'not in'"});
    const Token& opTok = tokens_[pos_++];
    CompareOp op = parse_compare_op(opTok.text);
    if (peek_keyword("all") || (peek_kind(TokenKind::Identifier) &&
                                (current()->text == "any" || current()->text == "some") &&
                                lookahead(1) != nullptr &&
                                lookahead(1)->kind == TokenKind::LParen)) {
      throw Error::unsupported("quantified comparison", here());
    }
    if (peek_kind(TokenKind::LParen)) throw Error::unsupported("scalar subquery", here());
    Operand right = parse_operand();

    Comparison cmp;
    cmp.span = SourceSpan{start.start, previous_span().end};
    if (auto* l = std::get_if<AttrRef>(&left)) {
      cmp.left = std::move(*l);
      cmp.op = op;
      cmp.right = std::move(right);
    } else if (auto* r = std::get_if<AttrRef>(&right)) {
      cmp.left = std::move(*r);
      cmp.op = mirrored(op);
      cmp.right = std::move(left);
    } else {
      throw Error::unsupported("comparison between constants", cmp.span);
    }
    out.emplace_back(std::move(cmp));
  }

  Operand parse_operand() {
    reject_unsupported();
    if (peek_kind(TokenKind::Integer)) {
      const Token& tok = tokens_[pos_++];
      std::int64_t value = 0;
      const auto* first = tok.text.data();
      const auto* last = first + tok.text.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::ParseError, "integer literal out of range", tok.span,
                    {"64-bit integer"});
      }
      return Literal{value, tok.span};
    }
    if (peek_kind(TokenKind::String)) {
      const Token& tok = tokens_[pos_++];
      return Literal{tok.text, tok.span};
    }
    if (peek_kind(TokenKind::Identifier)) {
      const Token* next = lookahead(1);
      if (next != nullptr && next->kind == TokenKind::LParen) {
        throw Error::unsupported("aggregates", current()->span);
      }
      return parse_attr_ref();
    }
    fail({"attribute", "integer", "string"});
  }

  Box<SelectQuery> parse_subquery() {
    expect(TokenKind::LParen);
    SelectQuery sub = parse_query();
    expect(TokenKind::RParen);
    return Box<SelectQuery>(std::move(sub));
  }

  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int next_from_id_ = 0;
};

// --- printing ----------------------------------------------------------------

void print_attr(std::ostream& out, const AttrRef& ref) {
  if (!ref.qualifier.empty()) out << ref.qualifier << '.';
  out << ref.name;
}

void print_query(std::ostream& out, const SelectQuery& q, int indent);

void print_subquery(std::ostream& out, const SelectQuery& q, int indent) {
  out << "(\n";
  print_query(out, q, indent + 1);
  out << ")";
}

void print_query(std::ostream& out, const SelectQuery& q, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  out << pad << "select ";
  if (q.distinct) out << "distinct ";
  if (q.star) {
    out << '*';
  } else {
    for (std::size_t i = 0; i < q.select.size(); ++i) {
      if (i > 0) out << ", ";
      print_attr(out, q.select[i].attr);
      if (!q.select[i].outputName.empty()) out << " as " << q.select[i].outputName;
    }
  }
  out << '\n' << pad << "from ";
  for (std::size_t i = 0; i < q.from.size(); ++i) {
    if (i > 0) out << ", ";
    out << q.from[i].displayName;
    if (q.from[i].explicitAlias) out << ' ' << q.from[i].alias;
  }
  for (std::size_t i = 0; i < q.where.size(); ++i) {
    out << '\n' << pad << (i == 0 ? "where " : "and ");
    const Conjunct& c = q.where[i];
    if (const auto* cmp = std::get_if<Comparison>(&c)) {
      print_attr(out, cmp->left);
      out << ' ' << to_string(cmp->op) << ' ';
      if (const auto* a = std::get_if<AttrRef>(&cmp->right)) print_attr(out, *a);
      else out << to_literal(std::get<Literal>(cmp->right).value);
    } else if (const auto* ex = std::get_if<ExistsPredicate>(&c)) {
      out << (ex->negated ? "not exists " : "exists ");
      print_subquery(out, *ex->subquery, indent);
    } else {
      const auto& in = std::get<InPredicate>(c);
      print_attr(out, in.test);
      out << (in.negated ? " not in " : " in ");
      print_subquery(out, *in.subquery, indent);
    }
  }
}

bool same_attr(const AttrRef& a, const AttrRef& b) {
  return a.qualifier == b.qualifier && a.name == b.name && a.binding == b.binding;
}

bool same_operand(const Operand& a, const Operand& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<AttrRef>(&a)) return same_attr(*x, std::get<AttrRef>(b));
  return std::get<Literal>(a).value == std::get<Literal>(b).value;
}

bool same_conjunct(const Conjunct& a, const Conjunct& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<Comparison>(&a)) {
    const auto& y = std::get<Comparison>(b);
    return same_attr(x->left, y.left) && x->op == y.op && same_operand(x->right, y.right);
  }
  if (const auto* x = std::get_if<ExistsPredicate>(&a)) {
    const auto& y = std::get<ExistsPredicate>(b);
    return x->negated == y.negated && same_structure(*x->subquery, *y.subquery);
  }
  const auto& x = std::get<InPredicate>(a);
  const auto& y = std::get<InPredicate>(b);
  return x.negated == y.negated && same_attr(x.test, y.test) &&
         same_structure(*x.subquery, *y.subquery);
}

}  // namespace

bool same_structure(const SelectQuery& a, const SelectQuery& b) {
  if (a.distinct != b.distinct || a.star != b.star) return false;
  if (a.select.size() != b.select.size() || a.from.size() != b.from.size() ||
      a.where.size() != b.where.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.select.size(); ++i) {
    if (!same_attr(a.select[i].attr, b.select[i].attr) ||
        a.select[i].outputName != b.select[i].outputName) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.from.size(); ++i) {
    const FromItem& x = a.from[i];
    const FromItem& y = b.from[i];
    if (x.id != y.id || x.relation != y.relation || x.displayName != y.displayName ||
        x.alias != y.alias || x.explicitAlias != y.explicitAlias) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.where.size(); ++i) {
    if (!same_conjunct(a.where[i], b.where[i])) return false;
  }
  return true;
}

SelectQuery parse(std::string_view source) { return Parser(source).parse_statement(); }

std::string to_sql(const SelectQuery& query) {
  std::ostringstream out;
  print_query(out, query, 0);
  out << '\n';
  return out.str();
}

}  // namespace qviz::sql
