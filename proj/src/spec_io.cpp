#include "infocascade/spec_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace infocascade {

namespace {

struct Entry {
  std::size_t line = 0;
  bool is_array = false;
  std::string scalar;
  std::vector<double> numbers;
};

struct Section {
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

using Sections = std::map<std::string, Section>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, std::size_t line, const std::string& field) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw SpecParseError("'" + tok + "' is not a number", line, field);
  return v;
}

std::vector<double> parse_array(const std::string& body, std::size_t line, const std::string& field) {
  std::vector<double> out;
  std::string tok;
  auto flush = [&] {
    const auto t = trim(tok);
    if (!t.empty()) out.push_back(parse_number(t, line, field));
    tok.clear();
  };
  for (char c : body) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r')
      flush();
    else
      tok.push_back(c);
  }
  flush();
  return out;
}

Sections tokenize(const std::string& text) {
  Sections sections;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  std::string current;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SpecParseError("unterminated section header", lineno, line);
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw SpecParseError("empty section name", lineno, "");
      auto [it, fresh] = sections.try_emplace(current);
      if (!fresh) throw SpecParseError("duplicate section", lineno, current);
      it->second.line = lineno;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecParseError("expected 'key = value'", lineno, current);
    if (current.empty()) throw SpecParseError("key outside of any section", lineno, "");
    const std::string key = trim(line.substr(0, eq));
    const std::string field = current + "." + key;
    std::string value = trim(line.substr(eq + 1));
    Entry entry;
    entry.line = lineno;
    if (!value.empty() && value.front() == '[') {
      std::string body = value.substr(1);
      const std::size_t start = lineno;
      while (body.find(']') == std::string::npos) {
        if (!std::getline(in, raw)) throw SpecParseError("unterminated array", start, field);
        ++lineno;
        body += "\n" + raw.substr(0, raw.find('#'));
      }
      const auto close = body.find(']');
      if (!trim(body.substr(close + 1)).empty())
        throw SpecParseError("unexpected text after array", lineno, field);
      entry.is_array = true;
      entry.numbers = parse_array(body.substr(0, close), start, field);
    } else {
      if (value.empty()) throw SpecParseError("missing value", lineno, field);
      entry.scalar = value;
    }
    if (!sections[current].entries.emplace(key, std::move(entry)).second)
      throw SpecParseError("duplicate key", lineno, field);
  }
  return sections;
}

class Reader {
 public:
  Reader(const Sections& sections, std::string name)
      : section_(sections.at(name)), name_(std::move(name)) {}

  bool has(const std::string& key) const { return section_.entries.count(key) != 0; }

  const Entry& entry(const std::string& key) const {
    auto it = section_.entries.find(key);
    if (it == section_.entries.end())
      throw SpecParseError("missing required key", section_.line, name_ + "." + key);
    used_.insert(key);
    return it->second;
  }

  std::size_t count(const std::string& key) const {
    const Entry& e = entry(key);
    const std::string f = name_ + "." + key;
    if (e.is_array) throw SpecParseError("expected an integer", e.line, f);
    std::size_t v = 0;
    const auto* end = e.scalar.data() + e.scalar.size();
    const auto res = std::from_chars(e.scalar.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
      throw SpecParseError("'" + e.scalar + "' is not a non-negative integer", e.line, f);
    return v;
  }

  double real(const std::string& key) const {
    const Entry& e = entry(key);
    if (e.is_array) throw SpecParseError("expected a number", e.line, name_ + "." + key);
    return parse_number(e.scalar, e.line, name_ + "." + key);
  }

  bool flag(const std::string& key) const {
    const Entry& e = entry(key);
    if (e.scalar == "true") return true;
    if (e.scalar == "false") return false;
    throw SpecParseError("expected true or false", e.line, name_ + "." + key);
  }

  std::vector<double> array(const std::string& key, std::size_t expected) const {
    const Entry& e = entry(key);
    const std::string f = name_ + "." + key;
    if (!e.is_array) throw SpecParseError("expected an array", e.line, f);
    if (expected != 0 && e.numbers.size() != expected) {
      std::ostringstream os;
      os << "expected " << expected << " entries, found " << e.numbers.size();
      throw SpecParseError(os.str(), e.line, f);
    }
    return e.numbers;
  }

  void reject_unknown() const {
    for (const auto& [key, e] : section_.entries)
      if (!used_.count(key)) throw SpecParseError("unknown key", e.line, name_ + "." + key);
  }

  std::size_t line() const { return section_.line; }

 private:
  const Section& section_;
  std::string name_;
  mutable std::set<std::string> used_;
};

std::string indexed(const std::string& base, std::size_t i) { return base + "." + std::to_string(i); }

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_rows(std::string& out, const std::vector<double>& data, std::size_t width) {
  out += "data = [";
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (k != 0) out += (k % width == 0) ? ",\n  " : ", ";
    append_number(out, data[k]);
  }
  out += "]\n";
}

void append_array(std::string& out, const std::string& key, const std::vector<double>& data) {
  out += key + " = [";
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (k != 0) out += ", ";
    append_number(out, data[k]);
  }
  out += "]\n";
}

}  // namespace

std::string SpecParseError::format(const std::string& message, std::size_t line,
                                   const std::string& field) {
  std::ostringstream os;
  os << "line " << line;
  if (!field.empty()) os << " (" << field << ")";
  os << ": " << message;
  return os.str();
}

JointPublicBelief SpecDocument::root_belief() const {
  return root ? *root : JointPublicBelief::point_mass_prior(game);
}

void SpecDocument::set_horizon(std::size_t horizon) {
  if (horizon == 0) throw SpecError("horizon must be positive");
  if (investment) {
    investment->horizon = horizon;
    game = build_spec(*investment);
  } else {
    game.horizon = horizon;
  }
}

SpecDocument parse_spec(const std::string& text) {
  const Sections sections = tokenize(text);
  SpecDocument doc;

  for (const auto& [name, sec] : sections) {
    const auto dot = name.find('.');
    const std::string base = name.substr(0, dot);
    static const std::set<std::string> indexed_kinds{"player", "transition", "observation",
                                                     "reward", "root"};
    const bool ok = (dot == std::string::npos && (base == "game" || base == "investment")) ||
                    (dot != std::string::npos && indexed_kinds.count(base) &&
                     name.find_first_not_of("0123456789", dot + 1) == std::string::npos &&
                     dot + 1 < name.size());
    if (!ok) throw SpecParseError("unknown section", sec.line, name);
  }

  if (sections.count("investment")) {
    for (const auto& [name, sec] : sections)
      if (name != "investment" && name.rfind("root.", 0) != 0)
        throw SpecParseError("the investment shorthand cannot be combined with explicit tables",
                             sec.line, name);
    Reader r(sections, "investment");
    InvestmentParams p;
    if (r.has("players")) p.players = r.count("players");
    if (r.has("horizon")) p.horizon = r.count("horizon");
    if (r.has("lambda")) p.lambda = r.real("lambda");
    if (r.has("p0")) p.p0 = r.real("p0");
    if (r.has("p1")) p.p1 = r.real("p1");
    if (r.has("prior")) p.prior = r.real("prior");
    r.reject_unknown();
    try {
      doc.game = build_spec(p);
    } catch (const ParameterError& e) {
      throw SpecParseError(e.what(), r.line(), "investment");
    }
    doc.investment = p;
  } else {
    if (!sections.count("game")) throw SpecParseError("missing [game] section", 1, "game");
    Reader g(sections, "game");
    GameSpec& spec = doc.game;
    spec.num_players = g.count("players");
    spec.horizon = g.count("horizon");
    if (g.has("static_states")) spec.static_states = g.flag("static_states");
    g.reject_unknown();
    if (spec.num_players == 0) throw SpecParseError("players must be positive", g.line(), "game.players");
    if (spec.horizon == 0) throw SpecParseError("horizon must be positive", g.line(), "game.horizon");

    for (std::size_t i = 0; i < spec.num_players; ++i) {
      const auto name = indexed("player", i);
      if (!sections.count(name)) throw SpecParseError("missing section", g.line(), name);
      Reader r(sections, name);
      PlayerSpaces s{r.count("states"), r.count("observations"), r.count("actions")};
      if (s.states == 0 || s.observations == 0 || s.actions == 0)
        throw SpecParseError("space sizes must be positive", r.line(), name);
      spec.spaces.push_back(s);
      spec.prior.push_back(r.array("prior", s.states));
      r.reject_unknown();
    }
    for (const auto& [name, sec] : sections) {
      const auto dot = name.find('.');
      if (dot == std::string::npos) continue;
      if (std::stoul(name.substr(dot + 1)) >= spec.num_players)
        throw SpecParseError("player index out of range", sec.line, name);
    }
    const std::size_t na = spec.joint_actions();
    const std::size_t nx = spec.joint_states();
    for (std::size_t i = 0; i < spec.num_players; ++i) {
      const auto& s = spec.spaces[i];
      auto table = [&](const std::string& kind, std::size_t size) {
        const auto name = indexed(kind, i);
        if (!sections.count(name)) throw SpecParseError("missing section", g.line(), name);
        Reader r(sections, name);
        auto data = r.array("data", size);
        r.reject_unknown();
        return data;
      };
      spec.transition.push_back(table("transition", na * s.states * s.states));
      spec.observation.push_back(table("observation", na * s.states * s.observations));
      spec.reward.push_back(table("reward", nx * na));
    }
  }

  bool any_root = false;
  for (std::size_t i = 0; i < doc.game.num_players; ++i)
    any_root = any_root || sections.count(indexed("root", i));
  if (any_root) {
    JointPublicBelief root = JointPublicBelief::point_mass_prior(doc.game);
    for (std::size_t i = 0; i < doc.game.num_players; ++i) {
      const auto name = indexed("root", i);
      if (!sections.count(name)) continue;
      Reader r(sections, name);
      const std::size_t n = doc.game.spaces[i].states;
      const auto weights = r.array("weights", 0);
      const auto beliefs = r.array("beliefs", weights.size() * n);
      r.reject_unknown();
      std::vector<Atom> atoms;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        PrivateBelief b{std::vector<double>(beliefs.begin() + k * n, beliefs.begin() + (k + 1) * n)};
        double sum = 0.0;
        for (double v : b.probs) {
          if (!(v >= 0.0 && v <= 1.0)) throw SpecParseError("belief entry outside [0,1]", r.line(), name);
          sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw SpecParseError("belief does not sum to 1", r.line(), name);
        if (!(weights[k] >= 0.0)) throw SpecParseError("negative weight", r.line(), name);
        atoms.push_back({std::move(b), weights[k]});
      }
      double total = 0.0;
      for (const auto& a : atoms) total += a.weight;
      if (std::abs(total - 1.0) > 1e-12) throw SpecParseError("weights do not sum to 1", r.line(), name);
      root.per_player[i] = normalized(std::move(atoms));
    }
    doc.root = std::move(root);
  }
  return doc;
}

SpecDocument load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open spec file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string write_spec(const SpecDocument& doc) {
  std::string out;
  if (doc.investment) {
    const auto& p = *doc.investment;
    out += "[investment]\n";
    out += "players = " + std::to_string(p.players) + "\n";
    out += "horizon = " + std::to_string(p.horizon) + "\n";
    out += "lambda = ";
    append_number(out, p.lambda);
    out += "\np0 = ";
    append_number(out, p.p0);
    out += "\np1 = ";
    append_number(out, p.p1);
    out += "\nprior = ";
    append_number(out, p.prior);
    out += "\n";
  } else {
    const GameSpec& s = doc.game;
    out += "[game]\n";
    out += "players = " + std::to_string(s.num_players) + "\n";
    out += "horizon = " + std::to_string(s.horizon) + "\n";
    out += std::string("static_states = ") + (s.static_states ? "true" : "false") + "\n";
    for (std::size_t i = 0; i < s.num_players; ++i) {
      const auto& sp = s.spaces[i];
      out += "\n[" + indexed("player", i) + "]\n";
      out += "states = " + std::to_string(sp.states) + "\n";
      out += "observations = " + std::to_string(sp.observations) + "\n";
      out += "actions = " + std::to_string(sp.actions) + "\n";
      append_array(out, "prior", s.prior[i]);
    }
    for (std::size_t i = 0; i < s.num_players; ++i) {
      out += "\n[" + indexed("transition", i) + "]\n";
      append_rows(out, s.transition[i], s.spaces[i].states);
      out += "\n[" + indexed("observation", i) + "]\n";
      append_rows(out, s.observation[i], s.spaces[i].observations);
      out += "\n[" + indexed("reward", i) + "]\n";
      append_rows(out, s.reward[i], s.joint_actions());
    }
  }
  if (doc.root) {
    for (std::size_t i = 0; i < doc.root->num_players(); ++i) {
      out += "\n[" + indexed("root", i) + "]\n";
      std::vector<double> beliefs, weights;
      for (const auto& a : (*doc.root)[i].atoms()) {
        beliefs.insert(beliefs.end(), a.belief.probs.begin(), a.belief.probs.end());
        weights.push_back(a.weight);
      }
      append_array(out, "beliefs", beliefs);
      append_array(out, "weights", weights);
    }
  }
  return out;
}

}  // namespace infocascade
