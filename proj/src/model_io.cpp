#include "gmap/model_io.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gmap {

namespace {

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  std::string cur;
  int cur_line = 1;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        out.push_back({cur, cur_line});
        cur.clear();
      }
      if (c == '\n') ++line;
    } else {
      if (cur.empty()) cur_line = line;
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back({cur, cur_line});
  return out;
}

class Reader {
 public:
  explicit Reader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ == tokens_.size(); }
  const Token& peek() const {
    if (done()) throw ParseError("unexpected end of file");
    return tokens_[pos_];
  }
  Token next(const std::string& what) {
    if (done())
      throw ParseError("unexpected end of file while reading " + what);
    return tokens_[pos_++];
  }

  void expect(const std::string& word) {
    Token t = next("keyword " + word);
    if (t.text != word)
      throw ParseError("line " + std::to_string(t.line) + ": expected '" +
                       word + "', got '" + t.text + "'");
  }

  long long integer(const std::string& what) {
    Token t = next(what);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(t.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.text.size())
      throw ParseError("line " + std::to_string(t.line) + ": expected " +
                       what + " (an integer), got '" + t.text + "'");
    return v;
  }

  double real(const std::string& what) {
    Token t = next(what);
    if (t.text == "-inf") return kNegInf;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.text.size())
      throw ParseError("line " + std::to_string(t.line) + ": expected " +
                       what + " (a real or -inf), got '" + t.text + "'");
    return v;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::vector<int> read_scope(Reader& r, int m, const std::string& label) {
  const auto k = r.integer(label + " scope size");
  std::vector<int> scope;
  for (long long i = 0; i < k; ++i) {
    auto v = r.integer(label + " scope id");
    if (v < 0 || v >= m)
      throw ParseError(label + ": variable id " + std::to_string(v) +
                       " out of range");
    scope.push_back(static_cast<int>(v));
  }
  return scope;
}

}  // namespace

std::string format_double(double v) {
  if (v == kNegInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Model parse_model_text(const std::string& text, HSpec* h) {
  Reader r(tokenize(text));
  r.expect("GMAP");
  {
    auto v = r.integer("format version");
    if (v != 1) throw ParseError("unsupported format version");
  }
  r.expect("VARS");
  const auto m = r.integer("variable count");
  if (m < 1) throw ParseError("need at least one variable");
  std::vector<int> cards;
  for (long long i = 0; i < m; ++i) {
    auto c = r.integer("cardinality");
    if (c < 1) throw ParseError("cardinality must be >= 1");
    cards.push_back(static_cast<int>(c));
  }

  r.expect("FACTORS");
  const auto nf = r.integer("factor count");
  std::vector<EnergyFactor> energy;
  for (long long t = 0; t < nf; ++t) {
    EnergyFactor f;
    f.scope = read_scope(r, static_cast<int>(m), "factor " + std::to_string(t));
    const std::size_t len = joint_size(f.scope, cards);
    for (std::size_t i = 0; i < len; ++i)
      f.values.push_back(
          r.real("factor " + std::to_string(t) + " table value"));
    energy.push_back(std::move(f));
  }

  std::vector<StatisticFactor> stats;
  std::vector<AccumOp> accum;
  if (!r.done() && r.peek().text == "STATS") {
    r.expect("STATS");
    const auto p = r.integer("statistic dimension");
    if (p < 0) throw ParseError("statistic dimension must be >= 0");
    for (long long d = 0; d < p; ++d) {
      Token t = r.next("accumulation op");
      if (t.text == "ADD")
        accum.push_back(AccumOp::Add);
      else if (t.text == "MAX")
        accum.push_back(AccumOp::Max);
      else
        throw ParseError("line " + std::to_string(t.line) +
                         ": accumulation op must be ADD or MAX, got '" +
                         t.text + "'");
    }
    const auto ng = r.integer("statistic factor count");
    for (long long t = 0; t < ng; ++t) {
      StatisticFactor g;
      g.scope = read_scope(r, static_cast<int>(m),
                           "statistic factor " + std::to_string(t));
      g.dim = static_cast<int>(p);
      const std::size_t len = joint_size(g.scope, cards);
      for (std::size_t i = 0; i < len; ++i) {
        AuxVec e;
        for (long long d = 0; d < p; ++d)
          e.push_back(r.integer("statistic factor " + std::to_string(t) +
                                " entry"));
        g.values.push_back(std::move(e));
      }
      stats.push_back(std::move(g));
    }
  }

  HSpec spec;
  if (!r.done() && r.peek().text == "H") {
    r.expect("H");
    spec.present = true;
    spec.mode = r.next("combinator mode").text;
    while (!r.done()) {
      const std::string key = r.peek().text;
      if (key == "loss") {
        r.next("loss keyword");
        spec.loss = r.next("loss name").text;
      } else if (key == "truth") {
        r.next("truth keyword");
        for (long long i = 0; i < m; ++i)
          spec.truth.push_back(static_cast<int>(r.integer("truth state")));
      } else if (key == "positive") {
        r.next("positive keyword");
        const auto k = r.integer("positive label count");
        for (long long i = 0; i < k; ++i)
          spec.positive.push_back(
              static_cast<int>(r.integer("positive label")));
      } else if (key == "equals") {
        r.next("equals keyword");
        for (std::size_t d = 0; d < accum.size(); ++d)
          spec.equals.push_back(r.integer("equals entry"));
      } else {
        break;
      }
    }
  }
  if (!r.done()) {
    const Token& t = r.peek();
    throw ParseError("line " + std::to_string(t.line) +
                     ": trailing garbage '" + t.text + "'");
  }
  if (h) *h = std::move(spec);
  return Model(std::move(cards), std::move(energy), std::move(stats),
               std::move(accum));
}

Model load_model(const std::string& path, HSpec* h) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str(), h);
}

std::string write_model(const Model& model) {
  std::ostringstream out;
  out << "GMAP 1\n";
  out << "VARS " << model.num_variables() << "\n";
  for (int i = 0; i < model.num_variables(); ++i)
    out << model.cardinality(i) << (i + 1 == model.num_variables() ? "\n" : " ");
  out << "FACTORS " << model.energy_factors().size() << "\n";
  for (const auto& f : model.energy_factors()) {
    out << f.scope.size();
    for (int v : f.scope) out << " " << v;
    out << "\n";
    for (std::size_t i = 0; i < f.values.size(); ++i)
      out << format_double(f.values[i])
          << (i + 1 == f.values.size() ? "\n" : " ");
  }
  if (model.statistic_dim() > 0 || !model.statistic_factors().empty()) {
    out << "STATS " << model.statistic_dim() << "\n";
    for (int d = 0; d < model.statistic_dim(); ++d)
      out << (model.accumulation()[d] == AccumOp::Add ? "ADD" : "MAX")
          << (d + 1 == model.statistic_dim() ? "\n" : " ");
    out << model.statistic_factors().size() << "\n";
    for (const auto& g : model.statistic_factors()) {
      out << g.scope.size();
      for (int v : g.scope) out << " " << v;
      out << "\n";
      for (std::size_t i = 0; i < g.values.size(); ++i) {
        for (std::size_t d = 0; d < g.values[i].size(); ++d)
          out << g.values[i][d] << (d + 1 == g.values[i].size() ? "" : " ");
        out << (i + 1 == g.values.size() ? "\n" : " ");
        if (g.values[i].empty() && i + 1 != g.values.size()) out << " ";
      }
      if (g.values.empty()) out << "\n";
    }
  }
  return out.str();
}

std::string format_solution(const Solution& sol, bool diagnostics) {
  std::ostringstream out;
  if (sol.status == SolveStatus::Infeasible) {
    out << "INFEASIBLE\n";
  } else {
    out << "p* " << format_double(sol.value) << "\n";
    out << "F " << format_double(sol.energy) << "\n";
    out << "G";
    for (long long v : sol.statistics) out << " " << v;
    out << "\n";
    out << "y";
    for (int s : sol.assignment) out << " " << s;
    out << "\n";
  }
  if (diagnostics) {
    out << "messages " << sol.diagnostics.messages_sent << "\n";
    out << "max_l_states " << sol.diagnostics.max_l_states << "\n";
  }
  return out.str();
}

std::string solution_json(const Solution& sol, bool diagnostics) {
  nlohmann::json j;
  j["status"] =
      sol.status == SolveStatus::Optimal ? "optimal" : "infeasible";
  if (sol.status == SolveStatus::Optimal) {
    j["p_star"] = sol.value;
    j["F"] = sol.energy;
    j["G"] = sol.statistics;
    j["y"] = sol.assignment;
  }
  if (diagnostics) {
    j["messages"] = sol.diagnostics.messages_sent;
    j["max_l_states"] = sol.diagnostics.max_l_states;
  }
  return j.dump(2) + "\n";
}

}  // namespace gmap
