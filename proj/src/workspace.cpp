#include "dgalg/workspace.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace dga {

namespace {

using Tokens = std::vector<std::string>;

Tokens split(const std::string& line) {
  std::istringstream is(line.substr(0, line.find('#')));
  Tokens t;
  std::string w;
  while (is >> w) t.push_back(w);
  return t;
}

bool is_rational(const std::string& s) {
  static const std::regex re(R"(^[+-]?[0-9]+(/[0-9]+)?$)");
  return std::regex_match(s, re);
}

Q rational(const std::string& s, int line) {
  try {
    return parse_q(s);
  } catch (const std::exception& e) {
    throw ParseError(line, e.what());
  }
}

int integer(const std::string& s, int line) {
  static const std::regex re(R"(^[+-]?[0-9]{1,9}$)");
  if (!std::regex_match(s, re)) throw ParseError(line, "expected an integer, got '" + s + "'");
  return std::stoi(s);
}

// name:deg
std::pair<std::string, int> name_deg(const std::string& tok, int line) {
  auto c = tok.rfind(':');
  if (c == std::string::npos || c == 0) throw ParseError(line, "expected name:degree, got '" + tok + "'");
  return {tok.substr(0, c), integer(tok.substr(c + 1), line)};
}

// Linear combination "2*x - 1/2*y + z". A bare rational is a multiple of `scalar` when given.
Vec terms(const Tokens& t, size_t from, const GradedSpace& sp, std::optional<size_t> scalar, int line) {
  Vec v(sp.dim());
  int sign = 1;
  if (from >= t.size()) throw ParseError(line, "empty right-hand side (write 0 for zero)");
  for (size_t k = from; k < t.size(); ++k) {
    std::string tok = t[k];
    if (tok == "+") continue;
    if (tok == "-") {
      sign = -sign;
      continue;
    }
    Q coef = sign;
    sign = 1;
    if (tok.size() > 1 && (tok[0] == '-' || tok[0] == '+') && !is_rational(tok)) {
      if (tok[0] == '-') coef = -coef;
      tok = tok.substr(1);
    }
    std::string name = tok;
    auto star = tok.find('*');
    if (star != std::string::npos) {
      coef *= rational(tok.substr(0, star), line);
      name = tok.substr(star + 1);
    }
    if (auto i = sp.find(name)) {
      v[*i] += coef;
    } else if (is_rational(name)) {
      Q c = coef * rational(name, line);
      if (sgn(c) == 0) continue;
      if (!scalar) throw ParseError(line, "bare scalar '" + name + "' is only allowed for algebra elements");
      v[*scalar] += c;
    } else {
      throw ParseError(line, "unknown basis element '" + name + "'");
    }
  }
  return v;
}

size_t basis_index(const GradedSpace& sp, const std::string& name, int line) {
  auto i = sp.find(name);
  if (!i) throw ParseError(line, "unknown basis element '" + name + "'");
  return *i;
}

void expect_eq(const Tokens& t, size_t pos, int line) {
  if (t.size() <= pos || t[pos] != "=") throw ParseError(line, "expected '=' after '" + t[0] + "' entry");
}

struct Line {
  int no;
  Tokens t;
};

struct Block {
  std::string kind, name, over;
  int line = 0;
  std::vector<Line> body;
};

template <class F>
auto semantic(const Block& b, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const SemanticError&) {
    throw;
  } catch (const std::exception& e) {
    throw SemanticError("line " + std::to_string(b.line) + ": " + b.kind + " " + b.name + ": " + e.what());
  }
}

CdgaPtr build_cdga(const Block& b) {
  std::vector<std::string> names;
  std::vector<int> degs;
  std::optional<std::string> unit_name;
  bool have_basis = false;
  for (auto& [no, t] : b.body)
    if (t[0] == "basis") {
      if (have_basis) throw ParseError(no, "basis declared twice");
      have_basis = true;
      for (size_t k = 1; k < t.size(); ++k) {
        auto [n, d] = name_deg(t[k], no);
        names.push_back(n);
        degs.push_back(d);
      }
    }
  if (!have_basis) throw ParseError(b.line, "cdga " + b.name + " has no basis line");
  GradedSpace sp(names, degs);
  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (names[i] == names[j]) throw ParseError(b.line, "duplicate basis name '" + names[i] + "'");
  const size_t n = sp.dim();
  std::optional<size_t> unit;
  std::map<std::pair<size_t, size_t>, Vec> prod;
  Mat d(n, n);
  for (auto& [no, t] : b.body) {
    const std::string& key = t[0];
    if (key == "basis") continue;
    if (key == "unit") {
      if (t.size() != 2) throw ParseError(no, "unit takes one basis name");
      unit = basis_index(sp, t[1], no);
    } else if (key == "mul") {
      if (t.size() < 5) throw ParseError(no, "expected: mul x y = ...");
      expect_eq(t, 3, no);
      size_t i = basis_index(sp, t[1], no), j = basis_index(sp, t[2], no);
      if (prod.count({i, j})) throw ParseError(no, "product " + t[1] + " " + t[2] + " given twice");
      prod[{i, j}] = terms(t, 4, sp, unit, no);
    } else if (key == "d") {
      if (t.size() < 4) throw ParseError(no, "expected: d x = ...");
      expect_eq(t, 2, no);
      d.set_col(basis_index(sp, t[1], no), terms(t, 3, sp, unit, no));
    } else {
      throw ParseError(no, "unknown cdga entry '" + key + "'");
    }
  }
  if (!unit) throw ParseError(b.line, "cdga " + b.name + " has no unit line");
  // unit products, then graded-commutative mirror of every given entry
  for (size_t i = 0; i < n; ++i) {
    prod.try_emplace({*unit, i}, unit_vec(n, i));
    prod.try_emplace({i, *unit}, unit_vec(n, i));
  }
  auto given = prod;
  for (auto& [ij, v] : given)
    prod.try_emplace({ij.second, ij.first}, scale(v, sign_of((long long)sp.deg(ij.first) * sp.deg(ij.second))));
  Mat mult(n, n * n);
  for (auto& [ij, v] : prod) mult.set_col(ij.first * n + ij.second, v);
  return semantic(b, [&] { return std::make_shared<const Cdga>(b.name, sp, mult, *unit, d); });
}

std::vector<FreeGen> free_gens(const Tokens& t, int no) {
  std::vector<FreeGen> g;
  for (size_t k = 1; k < t.size(); ++k) {
    auto [n, d] = name_deg(t[k], no);
    g.push_back({n, d});
  }
  if (g.empty()) throw ParseError(no, "free needs at least one generator");
  return g;
}

// d entries of a free module, as dgen matrices
std::vector<Mat> free_differential(const CdgaPtr& A, const std::vector<FreeGen>& gens, const std::vector<Line>& ds) {
  const size_t n = A->dim(), m = gens.size();
  Bimodule shape = free_module(A, gens, std::vector<Mat>(m, Mat(n, m)), "");
  std::vector<Mat> dgen(m, Mat(n, m));
  for (auto& [no, t] : ds) {
    if (t.size() < 4) throw ParseError(no, "expected: d e = ...");
    expect_eq(t, 2, no);
    size_t l = m;
    for (size_t k = 0; k < m; ++k)
      if (gens[k].name == t[1]) l = k;
    if (l == m) throw ParseError(no, "d entries of a free module are given on generators; '" + t[1] + "' is not one");
    Vec v = terms(t, 3, shape.space, std::nullopt, no);
    for (size_t mm = 0; mm < m; ++mm)
      for (size_t i = 0; i < n; ++i) dgen[l](i, mm) = v[mm * n + i];
  }
  return dgen;
}

Bimodule build_module(const Block& b, const CdgaPtr& A) {
  std::optional<std::vector<FreeGen>> gens;
  std::optional<GradedSpace> sp;
  for (auto& [no, t] : b.body) {
    if (t[0] == "free") {
      if (gens || sp) throw ParseError(no, "module basis declared twice");
      gens = free_gens(t, no);
    } else if (t[0] == "basis") {
      if (gens || sp) throw ParseError(no, "module basis declared twice");
      std::vector<std::string> names;
      std::vector<int> degs;
      for (size_t k = 1; k < t.size(); ++k) {
        auto [n, d] = name_deg(t[k], no);
        names.push_back(n);
        degs.push_back(d);
      }
      sp = GradedSpace(names, degs);
    }
  }
  if (!gens && !sp) throw ParseError(b.line, "module " + b.name + " needs a 'free' or 'basis' line");
  if (gens) {
    std::vector<Line> ds;
    for (auto& l : b.body) {
      if (l.t[0] == "d")
        ds.push_back(l);
      else if (l.t[0] != "free")
        throw ParseError(l.no, "free modules take only 'free' and 'd' entries");
    }
    return semantic(b, [&] { return free_module(A, *gens, free_differential(A, *gens, ds), b.name); });
  }
  const size_t n = A->dim(), N = sp->dim();
  std::vector<Mat> left(n, Mat(N, N)), right(n, Mat(N, N));
  left[A->unit()] = Mat::identity(N);
  right[A->unit()] = Mat::identity(N);
  bool has_right = false;
  Mat d(N, N);
  for (auto& [no, t] : b.body) {
    const std::string& key = t[0];
    if (key == "basis") continue;
    if (key == "act" || key == "ract") {
      if (t.size() < 5) throw ParseError(no, "expected: " + key + " a k = ...");
      expect_eq(t, 3, no);
      size_t a = basis_index(A->space(), t[1], no), k = basis_index(*sp, t[2], no);
      Vec v = terms(t, 4, *sp, std::nullopt, no);
      (key == "act" ? left : right)[a].set_col(k, v);
      has_right |= key == "ract";
    } else if (key == "d") {
      if (t.size() < 4) throw ParseError(no, "expected: d k = ...");
      expect_eq(t, 2, no);
      d.set_col(basis_index(*sp, t[1], no), terms(t, 3, *sp, std::nullopt, no));
    } else {
      throw ParseError(no, "unknown module entry '" + key + "'");
    }
  }
  return semantic(b, [&] {
    if (!has_right) return symmetric_bimodule(A, *sp, left, d, b.name);
    for (size_t a = 0; a < n; ++a) {
      check_homogeneous(*sp, *sp, A->deg(a), left[a], "left action");
      check_homogeneous(*sp, *sp, A->deg(a), right[a], "right action");
    }
    check_homogeneous(*sp, *sp, 1, d, "module differential");
    Bimodule k;
    k.A = A;
    k.space = *sp;
    k.left = left;
    k.right = right;
    k.d = d;
    k.tag = b.name;
    return k;
  });
}

AnchoredModule build_anchored(const Block& b, const CdgaPtr& A) {
  std::optional<std::vector<FreeGen>> gens;
  std::vector<Line> ds, anchors;
  for (auto& l : b.body) {
    if (l.t[0] == "free") {
      if (gens) throw ParseError(l.no, "generators declared twice");
      gens = free_gens(l.t, l.no);
    } else if (l.t[0] == "d") {
      ds.push_back(l);
    } else if (l.t[0] == "anchor") {
      anchors.push_back(l);
    } else {
      throw ParseError(l.no, "unknown anchored entry '" + l.t[0] + "'");
    }
  }
  if (!gens) throw ParseError(b.line, "anchored " + b.name + " needs a 'free' line");
  const size_t n = A->dim();
  std::vector<Mat> rho(gens->size(), Mat(n, n));
  for (auto& [no, t] : anchors) {
    if (t.size() < 5) throw ParseError(no, "expected: anchor e a = ...");
    expect_eq(t, 3, no);
    size_t l = gens->size();
    for (size_t k = 0; k < gens->size(); ++k)
      if ((*gens)[k].name == t[1]) l = k;
    if (l == gens->size()) throw ParseError(no, "'" + t[1] + "' is not a generator of " + b.name);
    rho[l].set_col(basis_index(A->space(), t[2], no), terms(t, 4, A->space(), A->unit(), no));
  }
  return semantic(b, [&] {
    for (size_t l = 0; l < gens->size(); ++l)
      check_homogeneous(A->space(), A->space(), (*gens)[l].deg, rho[l], ("anchor of " + (*gens)[l].name).c_str());
    return free_anchored(A, *gens, free_differential(A, *gens, ds), rho, b.name);
  });
}

}  // namespace

Options parse_flags(const std::vector<std::string>& a, int line) {
  Options o;
  for (size_t k = 0; k < a.size(); ++k) {
    auto need = [&](size_t n) {
      if (k + n >= a.size()) throw ParseError(line, "flag " + a[k] + " needs " + std::to_string(n) + " value(s)");
    };
    const std::string& f = a[k];
    if (f == "--order") {
      need(1);
      o.order = integer(a[++k], line);
    } else if (f == "--window") {
      need(2);
      int lo = integer(a[k + 1], line), hi = integer(a[k + 2], line);
      o.window = Window{lo, hi};
      k += 2;
    } else if (f == "--module") {
      need(1);
      o.module = a[++k];
    } else if (f == "--anchored") {
      need(1);
      o.anchored = a[++k];
    } else if (f == "--cdga") {
      need(1);
      o.cdga = a[++k];
    } else if (f == "--seed") {
      need(1);
      int s = integer(a[++k], line);
      if (s < 0) throw ParseError(line, "seed must be nonnegative");
      o.seed = (unsigned long)s;
    } else {
      throw ParseError(line, "unknown flag '" + f + "'");
    }
  }
  return o;
}

const WsCdga* Workspace::find_cdga(const std::string& n) const {
  for (auto& c : cdgas)
    if (c.name == n) return &c;
  return nullptr;
}
const WsModule* Workspace::find_module(const std::string& n) const {
  for (auto& c : modules)
    if (c.name == n) return &c;
  return nullptr;
}
const WsAnchored* Workspace::find_anchored(const std::string& n) const {
  for (auto& c : anchored)
    if (c.name == n) return &c;
  return nullptr;
}

Workspace parse_workspace(const std::string& text, const std::string& label) {
  Workspace ws;
  ws.label = label;
  std::istringstream is(text);
  std::string raw;
  int no = 0;
  std::optional<Block> cur;
  auto taken = [&](const std::string& n) {
    return ws.find_cdga(n) || ws.find_module(n) || ws.find_anchored(n);
  };
  while (std::getline(is, raw)) {
    ++no;
    Tokens t = split(raw);
    if (t.empty()) continue;
    if (cur) {
      if (t[0] != "end") {
        if (t[0] == "cdga" || t[0] == "module" || t[0] == "anchored" || t[0] == "task")
          throw ParseError(no, "'" + t[0] + "' inside " + cur->kind + " " + cur->name + " (missing 'end'?)");
        cur->body.push_back({no, t});
        continue;
      }
      if (t.size() != 1) throw ParseError(no, "'end' takes no arguments");
      Block b = std::move(*cur);
      cur.reset();
      if (b.kind == "cdga") {
        ws.cdgas.push_back({b.name, build_cdga(b), b.line});
        continue;
      }
      const WsCdga* over = ws.find_cdga(b.over);
      if (!over) throw ParseError(b.line, "unknown cdga '" + b.over + "'");
      if (b.kind == "module")
        ws.modules.push_back({b.name, b.over, build_module(b, over->A), b.line});
      else
        ws.anchored.push_back({b.name, b.over, build_anchored(b, over->A), b.line});
      continue;
    }
    if (t[0] == "cdga") {
      if (t.size() != 2) throw ParseError(no, "expected: cdga NAME");
      if (taken(t[1])) throw ParseError(no, "name '" + t[1] + "' already declared");
      cur = Block{"cdga", t[1], "", no, {}};
    } else if (t[0] == "module" || t[0] == "anchored") {
      if (t.size() != 4 || t[2] != "over") throw ParseError(no, "expected: " + t[0] + " NAME over CDGA");
      if (taken(t[1])) throw ParseError(no, "name '" + t[1] + "' already declared");
      cur = Block{t[0], t[1], t[3], no, {}};
    } else if (t[0] == "task") {
      if (t.size() < 3) throw ParseError(no, "expected: task NAME COMMAND [flags]");
      for (auto& k : ws.tasks)
        if (k.name == t[1]) throw ParseError(no, "task '" + t[1] + "' already declared");
      ws.tasks.push_back({t[1], t[2], parse_flags(Tokens(t.begin() + 3, t.end()), no), no});
    } else if (t[0] == "end") {
      throw ParseError(no, "'end' without an open block");
    } else {
      throw ParseError(no, "unknown declaration '" + t[0] + "'");
    }
  }
  if (cur) throw ParseError(no, cur->kind + " " + cur->name + " opened on line " + std::to_string(cur->line) +
                                    " is not closed");
  return ws;
}

Workspace load_workspace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_workspace(ss.str(), path);
}

}  // namespace dga
