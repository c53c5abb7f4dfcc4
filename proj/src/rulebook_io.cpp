#include "pars/rulebook_io.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace pars {

namespace {

constexpr std::string_view kMagic = "pars-rulebook v1";

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

std::string bound_to_string(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return format_g17(v);
}

void write_atom(std::string& out, const CategoryIn& p) {
  out += "in " + std::to_string(p.feature) + " " + std::to_string(p.values.size());
  for (const auto& v : p.values) out += " " + quote(v);
}

void write_atom(std::string& out, const NumericInterval& p) {
  out += "interval " + std::to_string(p.feature) + " " + bound_to_string(p.lo) + " " +
         bound_to_string(p.hi) + " " + std::to_string(p.lo_closed ? 1 : 0) + " " +
         std::to_string(p.hi_closed ? 1 : 0);
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  std::string next_word() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of document");
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string next_string() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '"') fail("expected a quoted string");
    std::size_t start = pos_++;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '\\') {
        pos_ += 2;
        continue;
      }
      if (text_[pos_] == '"') {
        ++pos_;
        auto literal = text_.substr(start, pos_ - start);
        try {
          return nlohmann::json::parse(literal).get<std::string>();
        } catch (const nlohmann::json::exception&) {
          fail("malformed string literal");
        }
      }
      ++pos_;
    }
    fail("unterminated string literal");
    return {};
  }

  double next_double() {
    const std::string word = next_word();
    if (word == "inf") return std::numeric_limits<double>::infinity();
    if (word == "-inf") return -std::numeric_limits<double>::infinity();
    auto v = parse_number(word);
    if (!v) fail("expected a number, got '" + word + "'");
    return *v;
  }

  long long next_int() {
    const std::string word = next_word();
    try {
      std::size_t used = 0;
      long long v = std::stoll(word, &used);
      if (used != word.size()) throw std::invalid_argument(word);
      return v;
    } catch (const std::exception&) {
      fail("expected an integer, got '" + word + "'");
      return 0;
    }
  }

  std::uint64_t next_u64() {
    const std::string word = next_word();
    try {
      std::size_t used = 0;
      std::uint64_t v = std::stoull(word, &used);
      if (used != word.size()) throw std::invalid_argument(word);
      return v;
    } catch (const std::exception&) {
      fail("expected an unsigned integer, got '" + word + "'");
      return 0;
    }
  }

  void expect(std::string_view word) {
    const std::string got = next_word();
    if (got != word) fail("expected '" + std::string(word) + "', got '" + got + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    throw Error("rulebook parse error at line " + std::to_string(line) + ": " + message);
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

CategoryIn read_category(Tokenizer& tok, std::size_t n_features) {
  CategoryIn p;
  p.feature = static_cast<std::size_t>(tok.next_u64());
  if (p.feature >= n_features) tok.fail("feature index out of range");
  const auto n_values = static_cast<std::size_t>(tok.next_u64());
  if (n_values == 0) tok.fail("category predicate with no values");
  for (std::size_t i = 0; i < n_values; ++i) p.values.push_back(tok.next_string());
  if (!std::is_sorted(p.values.begin(), p.values.end()))
    tok.fail("category values must be sorted");
  return p;
}

NumericInterval read_interval(Tokenizer& tok, std::size_t n_features) {
  NumericInterval p;
  p.feature = static_cast<std::size_t>(tok.next_u64());
  if (p.feature >= n_features) tok.fail("feature index out of range");
  p.lo = tok.next_double();
  p.hi = tok.next_double();
  p.lo_closed = tok.next_int() != 0;
  p.hi_closed = tok.next_int() != 0;
  return p;
}

}  // namespace

std::string serialize_rulebook(const RuleBook& rb) {
  std::string out(kMagic);
  out += '\n';
  out += "config theta " + format_g17(rb.config.theta) + " gamma " +
         format_g17(rb.config.gamma) + " lambda " + format_g17(rb.config.lambda) +
         " max-antecedents " + std::to_string(rb.config.max_antecedents) + " discretizer " +
         to_string(rb.config.discretizer) + " seed " + std::to_string(rb.config.seed) + "\n";

  out += "features " + std::to_string(rb.schema.size()) + "\n";
  for (std::size_t i = 0; i < rb.schema.size(); ++i) {
    const auto& f = rb.schema.features[i];
    out += "feature " + std::to_string(i) + " " + to_string(f.kind) + " " + quote(f.name) + "\n";
  }

  out += "predicates " + std::to_string(rb.predicates.size()) + "\n";
  for (const auto& p : rb.predicates) {
    out += "predicate " + std::to_string(p.id) + " ";
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Disjunction>) {
            out += "or " + std::to_string(body.parts.size());
            for (const auto& part : body.parts) {
              out += " ";
              std::visit([&](const auto& atom) { write_atom(out, atom); }, part);
            }
          } else {
            write_atom(out, body);
          }
        },
        p.body);
    out += '\n';
  }

  out += "rules " + std::to_string(rb.rules.size()) + "\n";
  for (const auto& r : rb.rules) {
    out += "rule " + std::to_string(r.antecedent.size());
    for (PredicateId id : r.antecedent) out += " " + std::to_string(id);
    out += " -> " + std::to_string(r.consequent) + " " + format_g17(r.support) + " " +
           format_g17(r.confidence) + " " + format_g17(r.score) + "\n";
  }
  out += "end\n";
  return out;
}

RuleBook parse_rulebook(std::string_view text) {
  Tokenizer tok(text);
  tok.expect("pars-rulebook");
  tok.expect("v1");

  RuleBook rb;
  tok.expect("config");
  tok.expect("theta");
  rb.config.theta = tok.next_double();
  tok.expect("gamma");
  rb.config.gamma = tok.next_double();
  tok.expect("lambda");
  rb.config.lambda = tok.next_double();
  tok.expect("max-antecedents");
  rb.config.max_antecedents = static_cast<int>(tok.next_int());
  tok.expect("discretizer");
  {
    const std::string word = tok.next_word();
    auto d = discretizer_from_string(word);
    if (!d) tok.fail("unknown discretizer '" + word + "'");
    rb.config.discretizer = *d;
  }
  tok.expect("seed");
  rb.config.seed = tok.next_u64();
  rb.config.validate();

  tok.expect("features");
  const auto n_features = static_cast<std::size_t>(tok.next_u64());
  for (std::size_t i = 0; i < n_features; ++i) {
    tok.expect("feature");
    if (static_cast<std::size_t>(tok.next_u64()) != i) tok.fail("feature indices must be dense");
    const std::string kind_word = tok.next_word();
    auto kind = feature_kind_from_string(kind_word);
    if (!kind) tok.fail("unknown feature kind '" + kind_word + "'");
    rb.schema.features.push_back({tok.next_string(), *kind});
  }
  rb.schema.validate();

  tok.expect("predicates");
  const auto n_predicates = static_cast<std::size_t>(tok.next_u64());
  for (std::size_t i = 0; i < n_predicates; ++i) {
    tok.expect("predicate");
    if (static_cast<std::size_t>(tok.next_u64()) != i)
      tok.fail("predicate ids must be dense and ordered");
    const std::string tag = tok.next_word();
    Predicate p;
    p.id = static_cast<PredicateId>(i);
    if (tag == "in") {
      p.body = read_category(tok, n_features);
    } else if (tag == "interval") {
      p.body = read_interval(tok, n_features);
    } else if (tag == "or") {
      Disjunction dis;
      const auto n_parts = static_cast<std::size_t>(tok.next_u64());
      if (n_parts < 2) tok.fail("disjunction needs at least two parts");
      for (std::size_t part = 0; part < n_parts; ++part) {
        const std::string part_tag = tok.next_word();
        if (part_tag == "in")
          dis.parts.emplace_back(read_category(tok, n_features));
        else if (part_tag == "interval")
          dis.parts.emplace_back(read_interval(tok, n_features));
        else
          tok.fail("unknown predicate part '" + part_tag + "'");
      }
      p.body = std::move(dis);
    } else {
      tok.fail("unknown predicate form '" + tag + "'");
    }
    rb.predicates.push_back(std::move(p));
  }

  tok.expect("rules");
  const auto n_rules = static_cast<std::size_t>(tok.next_u64());
  auto check_id = [&](long long id) {
    if (id < 0 || static_cast<std::size_t>(id) >= n_predicates)
      tok.fail("rule references unknown predicate id " + std::to_string(id));
    return static_cast<PredicateId>(id);
  };
  for (std::size_t i = 0; i < n_rules; ++i) {
    tok.expect("rule");
    Par rule;
    const auto n_ant = static_cast<std::size_t>(tok.next_u64());
    for (std::size_t a = 0; a < n_ant; ++a) rule.antecedent.push_back(check_id(tok.next_int()));
    if (!std::is_sorted(rule.antecedent.begin(), rule.antecedent.end()))
      tok.fail("rule antecedent ids must be sorted");
    tok.expect("->");
    rule.consequent = check_id(tok.next_int());
    rule.support = tok.next_double();
    rule.confidence = tok.next_double();
    rule.score = tok.next_double();
    if (!rb.rules.empty() && rule.score > rb.rules.back().score)
      tok.fail("rules must be sorted by score descending");
    rb.rules.push_back(std::move(rule));
  }
  tok.expect("end");
  return rb;
}

void save_rulebook(const RuleBook& rb, const std::string& path) {
  write_text_file(path, serialize_rulebook(rb));
}

RuleBook load_rulebook(const std::string& path) {
  try {
    return parse_rulebook(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace pars
