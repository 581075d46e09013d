// Copyright 2026 The cpsched Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cpsched/xcsp3.hpp"

#include "cpsched/error.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace cpsched::xcsp3 {

namespace pt = boost::property_tree;

std::string domain_text(const flat::Domain &d) {
  std::string out;
  for (const auto &r : d.ranges()) {
    if (!out.empty())
      out += ' ';
    out += std::to_string(r.lb);
    if (r.ub != r.lb)
      out += ".." + std::to_string(r.ub);
  }
  return out;
}

std::string expr_text(const flat::Model &m, const flat::Expr &e) {
  switch (e.op()) {
  case flat::Op::Const: return std::to_string(e.value());
  case flat::Op::Var: return m.vars.at(e.var()).name;
  default: break;
  }
  std::string out(flat::op_name(e.op()));
  out += '(';
  for (std::size_t i = 0; i < e.args().size(); ++i) {
    if (i != 0)
      out += ',';
    out += expr_text(m, e.args()[i]);
  }
  out += ')';
  return out;
}

namespace {

std::string names(const flat::Model &m, const std::vector<flat::VarIndex> &vs) {
  std::string out;
  for (auto v : vs) {
    if (!out.empty())
      out += ' ';
    out += m.vars[v].name;
  }
  return out;
}

std::string operands(const flat::Model &m, const std::vector<flat::Operand> &os) {
  std::string out;
  for (const auto &o : os) {
    if (!out.empty())
      out += ' ';
    out += o.var ? m.vars[*o.var].name : std::to_string(o.constant);
  }
  return out;
}

std::string tuples_text(const std::vector<std::vector<Value>> &ts, bool unary) {
  std::string out;
  for (const auto &t : ts) {
    if (unary) {
      if (!out.empty())
        out += ' ';
      out += std::to_string(t[0]);
      continue;
    }
    out += '(';
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i != 0)
        out += ',';
      out += std::to_string(t[i]);
    }
    out += ')';
  }
  return out;
}

std::string join(const std::vector<Value> &xs) {
  std::string out;
  for (Value x : xs) {
    if (!out.empty())
      out += ' ';
    out += std::to_string(x);
  }
  return out;
}

} // namespace

std::string emit(const flat::Model &m) {
  std::ostringstream os;
  os << "<instance format=\"XCSP3\" type=\"" << (m.objective ? "COP" : "CSP") << "\">\n";
  os << "  <variables>\n";
  for (const auto &v : m.vars)
    os << "    <var id=\"" << v.name << "\"> " << domain_text(v.domain) << " </var>\n";
  os << "  </variables>\n";
  os << "  <constraints>\n";
  for (const auto &c : m.constraints) {
    if (const auto *x = std::get_if<flat::Intension>(&c)) {
      os << "    <intension> " << expr_text(m, x->expr) << " </intension>\n";
    } else if (const auto *x = std::get_if<flat::Extension>(&c)) {
      const char *tag = x->positive ? "supports" : "conflicts";
      os << "    <extension>\n"
         << "      <list> " << names(m, x->vars) << " </list>\n"
         << "      <" << tag << "> " << tuples_text(x->tuples, x->vars.size() == 1)
         << " </" << tag << ">\n"
         << "    </extension>\n";
    } else if (const auto *x = std::get_if<flat::NoOverlap>(&c)) {
      os << "    <noOverlap>\n"
         << "      <origins> " << names(m, x->origins) << " </origins>\n"
         << "      <lengths> " << operands(m, x->lengths) << " </lengths>\n"
         << "    </noOverlap>\n";
    } else if (const auto *x = std::get_if<flat::Cumulative>(&c)) {
      os << "    <cumulative>\n"
         << "      <origins> " << names(m, x->origins) << " </origins>\n"
         << "      <lengths> " << operands(m, x->lengths) << " </lengths>\n"
         << "      <heights> " << operands(m, x->heights) << " </heights>\n"
         << "      <condition> (le," << x->cap << ") </condition>\n"
         << "    </cumulative>\n";
    } else {
      const auto &el = std::get<flat::Element>(c);
      os << "    <element>\n";
      if (el.matrix)
        os << "      <matrix> " << tuples_text(el.table, false) << " </matrix>\n";
      else
        os << "      <list> " << join(el.table.front()) << " </list>\n";
      os << "      <index> " << names(m, el.index) << " </index>\n"
         << "      <value> " << m.vars[el.value].name << " </value>\n"
         << "    </element>\n";
    }
  }
  os << "  </constraints>\n";
  if (m.objective) {
    const char *tag = m.objective->sense == flat::Sense::Minimize ? "minimize" : "maximize";
    os << "  <objectives>\n"
       << "    <" << tag << "> " << m.vars[m.objective->var].name << " </" << tag << ">\n"
       << "  </objectives>\n";
  }
  os << "</instance>\n";
  return os.str();
}

// --- parsing -----------------------------------------------------------------

namespace {

[[noreturn]] void malformed(const std::string &what) {
  throw Error(ErrorCode::MalformedDocument, what);
}

std::vector<std::string> words(const std::string &text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  std::string w;
  while (is >> w)
    out.push_back(w);
  return out;
}

Value integer(std::string_view s) {
  Value v = 0;
  const auto *end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end)
    malformed("not an integer: '" + std::string(s) + "'");
  return v;
}

flat::Domain parse_domain(const std::string &text) {
  std::vector<IntDomain> ranges;
  for (const auto &w : words(text)) {
    const auto dots = w.find("..");
    if (dots == std::string::npos)
      ranges.push_back(integer(w));
    else
      ranges.push_back({integer(std::string_view(w).substr(0, dots)),
                        integer(std::string_view(w).substr(dots + 2))});
  }
  std::vector<Value> values;
  for (const auto &r : ranges) {
    if (r.empty())
      malformed("empty range in domain '" + text + "'");
    for (Value v = r.lb; v <= r.ub; ++v)
      values.push_back(v);
  }
  return flat::Domain::of_values(std::move(values));
}

std::vector<std::vector<Value>> parse_tuples(const std::string &text, bool unary) {
  std::vector<std::vector<Value>> out;
  if (unary) {
    for (const auto &w : words(text))
      out.push_back({integer(w)});
    return out;
  }
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  for (skip(); i < text.size(); skip()) {
    if (text[i] != '(')
      malformed("expected '(' in tuple list");
    const auto close = text.find(')', i);
    if (close == std::string::npos)
      malformed("unterminated tuple");
    std::vector<Value> t;
    std::string_view body(text.data() + i + 1, close - i - 1);
    while (!body.empty()) {
      const auto comma = body.find(',');
      t.push_back(integer(body.substr(0, comma)));
      body = comma == std::string_view::npos ? std::string_view() : body.substr(comma + 1);
    }
    out.push_back(std::move(t));
    i = close + 1;
  }
  return out;
}

class ExprParser {
public:
  ExprParser(const flat::Model &m, std::string_view text) : m_(m), s_(text) {}

  flat::Expr parse() {
    flat::Expr e = term();
    skip();
    if (i_ != s_.size())
      malformed("trailing text in intension");
    return e;
  }

private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }

  flat::Expr term() {
    skip();
    const std::size_t begin = i_;
    if (i_ < s_.size() && (s_[i_] == '-' || std::isdigit(static_cast<unsigned char>(s_[i_])))) {
      ++i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
        ++i_;
      return flat::Expr(integer(s_.substr(begin, i_ - begin)));
    }
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
      ++i_;
    const std::string_view word = s_.substr(begin, i_ - begin);
    if (word.empty())
      malformed("unexpected character in intension");
    skip();
    if (i_ < s_.size() && s_[i_] == '(') {
      const auto op = flat::op_from_name(word);
      if (!op)
        malformed("unknown operator '" + std::string(word) + "'");
      ++i_;
      std::vector<flat::Expr> args;
      for (;;) {
        args.push_back(term());
        skip();
        if (i_ >= s_.size())
          malformed("unterminated call");
        if (s_[i_] == ')') {
          ++i_;
          break;
        }
        if (s_[i_] != ',')
          malformed("expected ',' in intension");
        ++i_;
      }
      // Keep the tree exactly as written so re-emission is stable.
      auto n = std::make_shared<flat::ExprNode>();
      n->op = *op;
      n->args = std::move(args);
      return flat::Expr(std::move(n));
    }
    const auto v = m_.find(word);
    if (!v)
      malformed("undeclared variable '" + std::string(word) + "'");
    return flat::var(*v);
  }

  const flat::Model &m_;
  std::string_view s_;
  std::size_t i_ = 0;
};

flat::VarIndex lookup(const flat::Model &m, const std::string &name) {
  const auto v = m.find(name);
  if (!v)
    malformed("undeclared variable '" + name + "'");
  return *v;
}

std::vector<flat::VarIndex> var_list(const flat::Model &m, const std::string &text) {
  std::vector<flat::VarIndex> out;
  for (const auto &w : words(text))
    out.push_back(lookup(m, w));
  return out;
}

std::vector<flat::Operand> operand_list(const flat::Model &m, const std::string &text) {
  std::vector<flat::Operand> out;
  for (const auto &w : words(text)) {
    if (w[0] == '-' || std::isdigit(static_cast<unsigned char>(w[0])))
      out.push_back(flat::Operand::of_const(integer(w)));
    else
      out.push_back(flat::Operand::of_var(lookup(m, w)));
  }
  return out;
}

const pt::ptree &child(const pt::ptree &node, const std::string &name) {
  const auto it = node.find(name);
  if (it == node.not_found())
    malformed("missing <" + name + ">");
  return it->second;
}

std::string text(const pt::ptree &node, const std::string &name) {
  return child(node, name).data();
}

} // namespace

flat::Model parse(std::string_view doc) {
  pt::ptree tree;
  try {
    std::istringstream is{std::string(doc)};
    pt::read_xml(is, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error &e) {
    malformed(e.what());
  }
  const auto root = tree.find("instance");
  if (root == tree.not_found() || tree.size() != 1)
    malformed("expected a single <instance> root");
  const auto &inst = root->second;
  if (inst.get<std::string>("<xmlattr>.format", "") != "XCSP3")
    malformed("instance format is not XCSP3");

  flat::Model m;
  for (const auto &[tag, node] : inst) {
    if (tag == "<xmlattr>")
      continue;
    if (tag == "variables") {
      for (const auto &[vtag, var] : node) {
        if (vtag != "var")
          throw Error(ErrorCode::UnknownElement, "<" + vtag + "> in <variables>");
        const auto id = var.get<std::string>("<xmlattr>.id", "");
        if (id.empty())
          malformed("<var> without id");
        auto dom = parse_domain(var.data());
        if (dom.empty())
          malformed(id + ": empty domain");
        const bool boolean = dom == flat::Domain(IntDomain{0, 1});
        if (m.find(id))
          malformed("duplicate variable " + id);
        m.add_var(id, std::move(dom), boolean);
      }
    } else if (tag == "constraints") {
      for (const auto &[ctag, c] : node) {
        if (ctag == "intension") {
          m.post(flat::Intension{ExprParser(m, c.data()).parse()});
        } else if (ctag == "extension") {
          flat::Extension x;
          x.vars = var_list(m, text(c, "list"));
          const bool positive = c.find("supports") != c.not_found();
          x.positive = positive;
          x.tuples = parse_tuples(text(c, positive ? "supports" : "conflicts"),
                                  x.vars.size() == 1);
          for (const auto &t : x.tuples)
            if (t.size() != x.vars.size())
              malformed("tuple arity differs from <list>");
          m.post(std::move(x));
        } else if (ctag == "noOverlap") {
          flat::NoOverlap x;
          x.origins = var_list(m, text(c, "origins"));
          x.lengths = operand_list(m, text(c, "lengths"));
          if (x.lengths.size() != x.origins.size())
            malformed("noOverlap: origins and lengths differ in size");
          m.post(std::move(x));
        } else if (ctag == "cumulative") {
          flat::Cumulative x;
          x.origins = var_list(m, text(c, "origins"));
          x.lengths = operand_list(m, text(c, "lengths"));
          x.heights = operand_list(m, text(c, "heights"));
          if (x.lengths.size() != x.origins.size() || x.heights.size() != x.origins.size())
            malformed("cumulative: list sizes differ");
          std::string cond;
          for (char ch : text(c, "condition"))
            if (!std::isspace(static_cast<unsigned char>(ch)))
              cond += ch;
          if (cond.rfind("(le,", 0) != 0 || cond.back() != ')')
            malformed("cumulative condition must be (le,k)");
          x.cap = integer(std::string_view(cond).substr(4, cond.size() - 5));
          m.post(std::move(x));
        } else if (ctag == "element") {
          flat::Element x;
          x.matrix = c.find("matrix") != c.not_found();
          if (x.matrix) {
            x.table = parse_tuples(text(c, "matrix"), false);
          } else {
            std::vector<Value> row;
            for (const auto &w : words(text(c, "list")))
              row.push_back(integer(w));
            x.table = {row};
          }
          x.index = var_list(m, text(c, "index"));
          if (x.index.size() != (x.matrix ? 2U : 1U))
            malformed("element: wrong number of indices");
          x.value = lookup(m, words(text(c, "value")).at(0));
          m.post(std::move(x));
        } else {
          throw Error(ErrorCode::UnknownElement, "<" + ctag + "> in <constraints>");
        }
      }
    } else if (tag == "objectives") {
      for (const auto &[otag, o] : node) {
        if (otag != "minimize" && otag != "maximize")
          throw Error(ErrorCode::UnknownElement, "<" + otag + "> in <objectives>");
        const auto ws = words(o.data());
        if (ws.size() != 1)
          malformed("objective must name one variable");
        m.objective = flat::Objective{
            otag == "minimize" ? flat::Sense::Minimize : flat::Sense::Maximize, lookup(m, ws[0])};
      }
    } else {
      throw Error(ErrorCode::UnknownElement, "<" + tag + "> in <instance>");
    }
  }
  return m;
}

} // namespace cpsched::xcsp3
