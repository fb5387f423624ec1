#include "ricyl/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ricyl::io {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// line:col of a byte offset
std::string locate(const std::string& text, std::size_t pos) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

double as_double(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError(where + ": expected a number");
}

}  // namespace

json parse_sectioned_text(const std::string& text, const std::string& origin) {
  json out = json::object();
  json* sec = &out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    std::string at = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + ": unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError(at + ": empty section name");
      sec = &out;
      std::stringstream parts(name);
      std::string part;
      while (std::getline(parts, part, '.')) sec = &(*sec)[trim(part)];
      if (!sec->is_object()) *sec = json::object();
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + ": expected 'key = value'");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) throw ConfigError(at + ": empty key");
    json val;
    try {
      val = json::parse(v);
    } catch (const json::parse_error&) {
      if (v.find_first_of("[{\"") == 0) throw ConfigError(at + ": malformed value for '" + k + "'");
      val = v;
    }
    (*sec)[k] = val;
  }
  return out;
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();
  std::string t = trim(text);
  if (!t.empty() && t[0] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ":" + locate(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
  }
  return parse_sectioned_text(text, path);
}

const json& at_path(const json& j, const std::string& path) {
  const json* cur = &j;
  std::stringstream parts(path);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!cur->is_object() || !cur->contains(part)) throw ConfigError("missing field '" + path + "'");
    cur = &(*cur)[part];
  }
  return *cur;
}

double get_double(const json& j, const std::string& path) { return as_double(at_path(j, path), path); }

int get_int(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_doubles(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

TorusCrossSection cross_section_from_json(const json& j) {
  int d = get_int(j, "cross_section.dim");
  auto L = get_doubles(j, "cross_section.lengths");
  int cutoff = get_int(j, "cross_section.cutoff");
  try {
    TorusCrossSection cs(d, L, cutoff);
    cs.validate();
    return cs;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("cross_section: ") + e.what());
  }
}

json cross_section_to_json(const TorusCrossSection& cs) {
  return {{"dim", cs.dim}, {"lengths", cs.lengths}, {"cutoff", cs.freq_cutoff}};
}

RadialProfile profile_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": profile must be an array of terms");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    const json& t = j[i];
    if (!t.is_object()) throw ConfigError(w + ": term must be an object");
    Term term;
    term.c = get_double(t, "c");
    if (t.contains("p")) {
      if (!t["p"].is_number_integer() || t["p"].get<int>() < 0) throw ConfigError(w + ".p: expected integer >= 0");
      term.p = t["p"].get<int>();
    }
    if (t.contains("rate")) term.rate = as_double(t["rate"], w + ".rate");
    if (t.contains("lo")) term.lo = as_double(t["lo"], w + ".lo");
    if (t.contains("hi")) term.hi = as_double(t["hi"], w + ".hi");
    if (!std::isfinite(term.c) || !std::isfinite(term.rate)) throw ConfigError(w + ": non-finite coefficient");
    terms.push_back(term);
  }
  return RadialProfile(std::move(terms));
}

namespace {
json bound(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}
}  // namespace

json profile_to_json(const RadialProfile& p) {
  json out = json::array();
  for (const auto& t : p.terms()) {
    json o = {{"c", t.c}, {"p", t.p}, {"rate", t.rate}};
    if (!std::isinf(t.lo)) o["lo"] = bound(t.lo);
    if (!std::isinf(t.hi)) o["hi"] = bound(t.hi);
    out.push_back(o);
  }
  return out;
}

namespace {

FourierKey key_from_json(const json& t, int d, const std::string& w, int* sign) {
  const json& kj = at_path(t, "k");
  if (!kj.is_array() || (int)kj.size() != d) throw ConfigError(w + ".k: expected " + std::to_string(d) + " integers");
  std::vector<int> k;
  for (const auto& v : kj) {
    if (!v.is_number_integer()) throw ConfigError(w + ".k: expected integers");
    k.push_back(v.get<int>());
  }
  Phase ph = Phase::Cos;
  if (t.contains("phase")) {
    try {
      ph = phase_from_string(get_string(t, "phase"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(w + ".phase: " + e.what());
    }
  }
  int s = 1;
  k = canonicalize(k, &s);
  if (ph == Phase::Sin && std::all_of(k.begin(), k.end(), [](int v) { return v == 0; }))
    throw ConfigError(w + ": the zero frequency has no sin phase");
  *sign = ph == Phase::Sin ? s : 1;
  return {k, ph};
}

int component_from_json(const json& c, int rank, int n, const std::string& w) {
  std::vector<int> idx;
  if (c.is_number_integer()) idx.push_back(c.get<int>());
  else if (c.is_array())
    for (const auto& v : c) idx.push_back(v.get<int>());
  else
    throw ConfigError(w + ".component: expected index or index pair");
  for (int i : idx)
    if (i < 0 || i >= n) throw ConfigError(w + ".component: index out of range");
  if (rank == 0) {
    if (!(idx.size() == 1 && idx[0] == 0)) throw ConfigError(w + ".component: scalars have component 0");
    return 0;
  }
  if (rank == 1) {
    if (idx.size() != 1) throw ConfigError(w + ".component: 1-forms take a single index");
    return idx[0];
  }
  if (idx.size() != 2) throw ConfigError(w + ".component: 2-tensors take an index pair");
  return sym_index(idx[0], idx[1], n);
}

}  // namespace

ModeExpansion expansion_from_json(const json& j, const std::vector<double>& lengths, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  int rank = get_int(j, "rank");
  if (rank < 0 || rank > 2) throw ConfigError(where + ".rank: must be 0, 1 or 2");
  int d = (int)lengths.size();
  ModeExpansion f(lengths, rank);
  if (j.contains("terms")) {
    const json& ts = j["terms"];
    if (!ts.is_array()) throw ConfigError(where + ".terms: expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::string w = where + ".terms[" + std::to_string(i) + "]";
      int sign = 1;
      FourierKey key = key_from_json(ts[i], d, w, &sign);
      int comp = component_from_json(ts[i].contains("component") ? ts[i]["component"] : json(0), rank, d + 1, w);
      f.add(key, comp, profile_from_json(at_path(ts[i], "profile"), w + ".profile") * (double)sign);
    }
  }
  if (j.contains("modes")) {
    const json& ms = j["modes"];
    if (!ms.is_array()) throw ConfigError(where + ".modes: expected an array");
    TorusCrossSection cs(d, lengths, 1);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::string w = where + ".modes[" + std::to_string(i) + "]";
      int sign = 1;
      FourierKey key = key_from_json(ms[i], d, w, &sign);
      Mode m;
      try {
        m.kind = kind_from_string(get_string(ms[i], "kind"));
      } catch (const InvalidArgument& e) {
        throw ConfigError(w + ".kind: " + e.what());
      }
      m.k = key.k;
      m.phase = key.phase;
      m.mu = cs.eigenvalue(m.k);
      m.pol_index = ms[i].contains("pol_index") ? ms[i]["pol_index"].get<int>() : 0;
      auto kap = cs.wavevector(m.k);
      std::vector<std::vector<double>> pols;
      switch (m.kind) {
        case ModeKind::Scalar: pols = {{}}; break;
        case ModeKind::CoclosedOneForm: pols = coclosed_polarizations(kap); break;
        case ModeKind::TTTensor: pols = tt_polarizations(kap); break;
        default: throw ConfigError(w + ".kind: only Scalar, CoclosedOneForm and TT modes can be listed");
      }
      if (m.pol_index < 0 || m.pol_index >= (int)pols.size())
        throw ConfigError(w + ".pol_index: out of range (" + std::to_string(pols.size()) + " polarizations)");
      m.polarization = pols[m.pol_index];
      if (m.rank() != rank) throw ConfigError(w + ": mode rank does not match expansion rank");
      f.add_mode(m, profile_from_json(at_path(ms[i], "profile"), w + ".profile") * (double)sign);
    }
  }
  return f;
}

json expansion_to_json(const ModeExpansion& f) {
  json terms = json::array();
  int n = f.n();
  for (const auto& [key, comps] : f.terms()) {
    for (int c = 0; c < (int)comps.size(); ++c) {
      if (comps[c].is_zero()) continue;
      json comp;
      if (f.rank() == 0) comp = 0;
      else if (f.rank() == 1) comp = c;
      else {
        for (int i = 0; i < n; ++i)
          for (int k = i; k < n; ++k)
            if (sym_index(i, k, n) == c) comp = {i, k};
      }
      terms.push_back({{"k", key.k}, {"phase", to_string(key.phase)}, {"component", comp},
                       {"profile", profile_to_json(comps[c])}});
    }
  }
  return {{"rank", f.rank()}, {"lengths", f.lengths()}, {"terms", terms}};
}

json mode_to_json(const Mode& m) {
  return {{"kind", to_string(m.kind)}, {"k", m.k},         {"phase", to_string(m.phase)},
          {"mu", m.mu},                {"pol_index", m.pol_index}, {"polarization", m.polarization}};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

std::vector<std::vector<int>> parse_int_rows(const std::string& s) {
  std::vector<std::vector<int>> rows;
  std::stringstream rs(s);
  std::string row;
  while (std::getline(rs, row, ';')) {
    if (trim(row).empty()) continue;
    std::vector<int> r;
    std::stringstream cs(row);
    std::string tok;
    while (std::getline(cs, tok, ',')) {
      try {
        std::size_t used = 0;
        r.push_back(std::stoi(trim(tok), &used));
        if (used != trim(tok).size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError("cannot parse integer '" + tok + "'");
      }
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream cs(s);
  std::string tok;
  while (std::getline(cs, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(trim(tok), &used));
      if (used != trim(tok).size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + tok + "'");
    }
  }
  return out;
}

}  // namespace ricyl::io
