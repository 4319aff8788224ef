#include "crn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace crn {

Complex::Complex(std::vector<std::pair<int, std::int64_t>> terms) : terms_(std::move(terms)) {
  std::sort(terms_.begin(), terms_.end());
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].second < 1)
      throw ValidationError("complex stoichiometry must be >= 1");
    if (terms_[i].first < 0)
      throw ValidationError("negative species index in complex");
    if (i > 0 && terms_[i].first == terms_[i - 1].first)
      throw ValidationError("duplicate species in complex");
  }
}

std::int64_t Complex::count(int species) const {
  for (const auto& [s, n] : terms_)
    if (s == species) return n;
  return 0;
}

int Complex::max_species_index() const {
  return terms_.empty() ? -1 : terms_.back().first;
}

std::string Complex::to_string(const std::vector<Species>& species) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    if (terms_[i].second != 1) os << terms_[i].second << ' ';
    os << species.at(static_cast<size_t>(terms_[i].first)).name;
  }
  return os.str();
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species_names,
                                 std::vector<Reaction> reactions)
    : reactions_(std::move(reactions)) {
  if (reactions_.empty()) throw ValidationError("a network needs at least one reaction");
  species_.reserve(species_names.size());
  for (size_t i = 0; i < species_names.size(); ++i) {
    if (species_names[i].empty()) throw ValidationError("empty species name");
    if (!name_index_.emplace(species_names[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate species name '" + species_names[i] + "'");
    species_.push_back({static_cast<int>(i), std::move(species_names[i])});
  }
  const int d = num_species();
  auto to_dense = [d](const Complex& c) {
    State v(static_cast<size_t>(d), 0);
    for (const auto& [s, n] : c.terms()) v[static_cast<size_t>(s)] = n;
    return v;
  };
  for (const Reaction& r : reactions_) {
    if (!(r.kappa > 0.0) || !std::isfinite(r.kappa))
      throw ValidationError("rate constant must be positive and finite");
    if (r.source == r.product)
      throw ValidationError("reaction source and product complexes must differ");
    if (r.source.max_species_index() >= d || r.product.max_species_index() >= d)
      throw ValidationError("complex references a species index out of range");
  }
  auto intern = [this](const Complex& c) {
    for (size_t i = 0; i < complexes_.size(); ++i)
      if (complexes_[i] == c) return static_cast<int>(i);
    complexes_.push_back(c);
    return static_cast<int>(complexes_.size() - 1);
  };
  for (const Reaction& r : reactions_) {
    int a = intern(r.source);
    int b = intern(r.product);
    reaction_cplx_.emplace_back(a, b);
    State src = to_dense(r.source);
    State prod = to_dense(r.product);
    State diff(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
      diff[static_cast<size_t>(i)] = prod[static_cast<size_t>(i)] - src[static_cast<size_t>(i)];
    source_counts_.push_back(std::move(src));
    net_change_.push_back(std::move(diff));
  }
}

std::vector<std::string> ReactionNetwork::species_names() const {
  std::vector<std::string> out;
  out.reserve(species_.size());
  for (const Species& s : species_) out.push_back(s.name);
  return out;
}

int ReactionNetwork::species_index(const std::string& name) const {
  auto it = name_index_.find(name);
  return it == name_index_.end() ? -1 : it->second;
}

int ReactionNetwork::complex_index(const Complex& c) const {
  for (size_t i = 0; i < complexes_.size(); ++i)
    if (complexes_[i] == c) return static_cast<int>(i);
  return -1;
}

std::vector<double> ReactionNetwork::kappas() const {
  std::vector<double> out;
  out.reserve(reactions_.size());
  for (const Reaction& r : reactions_) out.push_back(r.kappa);
  return out;
}

namespace {

// ---- exact linear algebra over small integer matrices ----------------------

struct Rat {
  __int128 num = 0;
  __int128 den = 1;

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    if (num == 0) den = 1;
  }
};

Rat rat(std::int64_t v) { return Rat{v, 1}; }

Rat operator*(Rat a, Rat b) {
  Rat r{a.num * b.num, a.den * b.den};
  r.normalize();
  return r;
}
Rat operator-(Rat a, Rat b) {
  Rat r{a.num * b.den - b.num * a.den, a.den * b.den};
  r.normalize();
  return r;
}
Rat operator/(Rat a, Rat b) {
  if (b.num == 0) throw NumericalError("rational division by zero");
  Rat r{a.num * b.den, a.den * b.num};
  r.normalize();
  return r;
}
bool is_zero(const Rat& a) { return a.num == 0; }

// Reduced row echelon form in place; returns pivot column per pivot row.
std::vector<int> rref(std::vector<std::vector<Rat>>& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t pr = r;
    while (pr < rows && is_zero(m[pr][c])) ++pr;
    if (pr == rows) continue;
    std::swap(m[r], m[pr]);
    Rat inv = m[r][c];
    for (size_t j = c; j < cols; ++j) m[r][j] = m[r][j] / inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(m[i][c])) continue;
      Rat f = m[i][c];
      for (size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
    }
    pivots.push_back(static_cast<int>(c));
    ++r;
  }
  return pivots;
}

std::int64_t to_i64(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw NumericalError("integer overflow in exact elimination");
  return static_cast<std::int64_t>(v);
}

// Integer null-space basis of an integer matrix (rows x cols), canonical form:
// content 1, first nonzero entry positive, one vector per free column.
std::vector<std::vector<std::int64_t>> integer_nullspace(
    const std::vector<std::vector<std::int64_t>>& a, size_t cols) {
  std::vector<std::vector<Rat>> m;
  m.reserve(a.size());
  for (const auto& row : a) {
    std::vector<Rat> r(cols);
    for (size_t j = 0; j < cols; ++j) r[j] = rat(row[j]);
    m.push_back(std::move(r));
  }
  std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;

  std::vector<std::vector<std::int64_t>> basis;
  for (size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    // free column f: x_f = 1, other free vars 0, pivots from rref rows
    std::vector<Rat> v(cols, rat(0));
    v[f] = rat(1);
    for (size_t pr = 0; pr < pivots.size(); ++pr) {
      size_t pc = static_cast<size_t>(pivots[pr]);
      v[pc] = rat(0) - m[pr][f];
    }
    __int128 lcm = 1;
    for (const Rat& x : v) {
      __int128 d = x.den;
      __int128 g = lcm;
      __int128 b = d;
      while (b) {
        __int128 t = g % b;
        g = b;
        b = t;
      }
      lcm = lcm / g * d;
    }
    std::vector<std::int64_t> iv(cols);
    __int128 content = 0;
    for (size_t j = 0; j < cols; ++j) {
      __int128 val = v[j].num * (lcm / v[j].den);
      iv[j] = to_i64(val);
      __int128 av = val < 0 ? -val : val;
      __int128 g = content, b = av;
      while (b) {
        __int128 t = g % b;
        g = b;
        b = t;
      }
      content = g;
    }
    if (content > 1)
      for (auto& x : iv) x = to_i64(x / to_i64(content));
    for (auto& x : iv) {
      if (x == 0) continue;
      if (x < 0)
        for (auto& y : iv) y = -y;
      break;
    }
    basis.push_back(std::move(iv));
  }
  return basis;
}

int exact_rank(const std::vector<std::vector<std::int64_t>>& a, size_t cols) {
  std::vector<std::vector<Rat>> m;
  m.reserve(a.size());
  for (const auto& row : a) {
    std::vector<Rat> r(cols);
    for (size_t j = 0; j < cols; ++j) r[j] = rat(row[j]);
    m.push_back(std::move(r));
  }
  return static_cast<int>(rref(m).size());
}

// ---- graph machinery on complexes ------------------------------------------

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

// Iterative Tarjan; returns SCC id per node.
std::vector<int> strongly_connected(const std::vector<std::vector<int>>& adj, int& scc_count) {
  int n = static_cast<int>(adj.size());
  std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0),
      comp(static_cast<size_t>(n), -1);
  std::vector<bool> on_stack(static_cast<size_t>(n), false);
  std::vector<int> stack;
  int next_index = 0;
  scc_count = 0;

  struct Frame {
    int v;
    size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<size_t>(root)] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<size_t>(root)] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < adj[static_cast<size_t>(f.v)].size()) {
        int w = adj[static_cast<size_t>(f.v)][f.edge++];
        if (index[static_cast<size_t>(w)] == -1) {
          index[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<size_t>(w)] = true;
          call.push_back({w, 0});
        } else if (on_stack[static_cast<size_t>(w)]) {
          low[static_cast<size_t>(f.v)] = std::min(low[static_cast<size_t>(f.v)], index[static_cast<size_t>(w)]);
        }
      } else {
        if (low[static_cast<size_t>(f.v)] == index[static_cast<size_t>(f.v)]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<size_t>(w)] = false;
            comp[static_cast<size_t>(w)] = scc_count;
            if (w == f.v) break;
          }
          ++scc_count;
        }
        int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[static_cast<size_t>(call.back().v)] =
              std::min(low[static_cast<size_t>(call.back().v)], low[static_cast<size_t>(v)]);
      }
    }
  }
  return comp;
}

}  // namespace

std::vector<std::vector<int>> linkage_classes(const ReactionNetwork& net) {
  int nc = static_cast<int>(net.complexes().size());
  UnionFind uf(nc);
  for (int k = 0; k < net.num_reactions(); ++k) {
    auto [a, b] = net.reaction_complexes(k);
    uf.unite(a, b);
  }
  std::vector<std::vector<int>> classes;
  std::unordered_map<int, size_t> root_class;
  for (int c = 0; c < nc; ++c) {
    int r = uf.find(c);
    auto it = root_class.find(r);
    if (it == root_class.end()) {
      root_class.emplace(r, classes.size());
      classes.push_back({c});
    } else {
      classes[it->second].push_back(c);
    }
  }
  return classes;
}

bool is_weakly_reversible(const ReactionNetwork& net) {
  int nc = static_cast<int>(net.complexes().size());
  std::vector<std::vector<int>> adj(static_cast<size_t>(nc));
  for (int k = 0; k < net.num_reactions(); ++k) {
    auto [a, b] = net.reaction_complexes(k);
    adj[static_cast<size_t>(a)].push_back(b);
  }
  int scc_count = 0;
  std::vector<int> comp = strongly_connected(adj, scc_count);
  for (const auto& cls : linkage_classes(net)) {
    int c0 = comp[static_cast<size_t>(cls.front())];
    for (int c : cls)
      if (comp[static_cast<size_t>(c)] != c0) return false;
  }
  return true;
}

StructureReport analyze_structure(const ReactionNetwork& net) {
  StructureReport rep;
  rep.num_complexes = static_cast<int>(net.complexes().size());
  rep.linkage_classes = linkage_classes(net);
  rep.num_linkage_classes = static_cast<int>(rep.linkage_classes.size());
  rep.weakly_reversible = is_weakly_reversible(net);

  const int d = net.num_species();
  const int kk = net.num_reactions();
  // stoichiometric matrix: d rows, K columns (nu' - nu)
  std::vector<std::vector<std::int64_t>> stoich(static_cast<size_t>(d),
                                                std::vector<std::int64_t>(static_cast<size_t>(kk), 0));
  for (int k = 0; k < kk; ++k) {
    const State& xi = net.net_change(k);
    for (int i = 0; i < d; ++i) stoich[static_cast<size_t>(i)][static_cast<size_t>(k)] = xi[static_cast<size_t>(i)];
  }
  rep.stoich_dimension = exact_rank(stoich, static_cast<size_t>(kk));
  rep.deficiency = rep.num_complexes - rep.num_linkage_classes - rep.stoich_dimension;

  // conservation vectors: null space of the transpose, N^T w = 0
  std::vector<std::vector<std::int64_t>> stoich_t(static_cast<size_t>(kk),
                                                  std::vector<std::int64_t>(static_cast<size_t>(d), 0));
  for (int k = 0; k < kk; ++k)
    for (int i = 0; i < d; ++i)
      stoich_t[static_cast<size_t>(k)][static_cast<size_t>(i)] =
          stoich[static_cast<size_t>(i)][static_cast<size_t>(k)];
  rep.conservation_basis = integer_nullspace(stoich_t, static_cast<size_t>(d));
  return rep;
}

}  // namespace crn
