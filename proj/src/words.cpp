#include "mtorus/words.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace mtorus {

std::vector<Letter> reduce(std::span<const Letter> letters) {
  std::vector<Letter> out;
  out.reserve(letters.size());
  for (Letter l : letters) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

Word::Word(std::initializer_list<Letter> letters)
    : letters_(reduce(std::span<const Letter>(letters.begin(), letters.size()))) {
  if (std::find(letters_.begin(), letters_.end(), 0) != letters_.end()) {
    throw Error("letter 0 is not a generator");
  }
}

Word::Word(std::vector<Letter> letters) : letters_(reduce(letters)) {
  if (std::find(letters_.begin(), letters_.end(), 0) != letters_.end()) {
    throw Error("letter 0 is not a generator");
  }
}

Word Word::inverse() const {
  Word w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
    w.letters_.push_back(-*it);
  }
  return w;
}

Word Word::power(int n) const {
  Word base = n < 0 ? inverse() : *this;
  Word out;
  for (int i = 0; i < std::abs(n); ++i) out *= base;
  return out;
}

int Word::max_generator() const noexcept {
  int m = 0;
  for (Letter l : letters_) m = std::max(m, std::abs(l));
  return m;
}

std::vector<long> Word::abelianization(int rank) const {
  std::vector<long> v(rank, 0);
  for (Letter l : letters_) {
    if (std::abs(l) <= rank) v[std::abs(l) - 1] += (l > 0 ? 1 : -1);
  }
  return v;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string s;
  for (Letter l : letters_) {
    int g = std::abs(l) - 1;
    if (g < 26) {
      s += static_cast<char>((l > 0 ? 'a' : 'A') + g);
    } else {
      s += (l > 0 ? "x" : "X") + std::to_string(g + 1);
    }
  }
  return s;
}

std::string Word::to_string(const std::vector<std::string>& names) const {
  if (letters_.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += ' ';
    Letter l = letters_[i];
    s += names.at(std::abs(l) - 1);
    if (l < 0) s += "^-1";
  }
  return s;
}

Word operator*(const Word& u, const Word& v) {
  Word w = u;
  w *= v;
  return w;
}

Word& Word::operator*=(const Word& v) {
  for (Letter l : v.letters_) {
    if (!letters_.empty() && letters_.back() == -l) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }
  return *this;
}

bool operator<(const Word& u, const Word& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    int a = letter_key(u[i]);
    int b = letter_key(v[i]);
    if (a != b) return a < b;
  }
  return false;
}

CyclicSplit cyclic_split(const Word& w) {
  const auto& l = w.vec();
  std::size_t i = 0;
  std::size_t j = l.size();
  while (j - i >= 2 && l[i] == -l[j - 1]) {
    ++i;
    --j;
  }
  CyclicSplit s;
  s.prefix = Word(std::vector<Letter>(l.begin(), l.begin() + i));
  s.core = Word(std::vector<Letter>(l.begin() + i, l.begin() + j));
  return s;
}

Word rotate(const Word& w, std::size_t k) {
  const auto& l = w.vec();
  if (l.empty()) return w;
  k %= l.size();
  std::vector<Letter> r(l.begin() + k, l.end());
  r.insert(r.end(), l.begin(), l.begin() + k);
  return Word(std::move(r));
}

namespace {

// Compares rotation i of a against rotation j of b, both of length n.
int compare_rotations(const std::vector<Letter>& a, std::size_t i,
                      const std::vector<Letter>& b, std::size_t j) {
  const std::size_t n = a.size();
  for (std::size_t t = 0; t < n; ++t) {
    int x = letter_key(a[(i + t) % n]);
    int y = letter_key(b[(j + t) % n]);
    if (x != y) return x < y ? -1 : 1;
  }
  return 0;
}

std::size_t least_rotation_index(const std::vector<Letter>& l) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < l.size(); ++k) {
    if (compare_rotations(l, k, l, best) < 0) best = k;
  }
  return best;
}

}  // namespace

Word least_rotation(const Word& cyclically_reduced) {
  return rotate(cyclically_reduced, least_rotation_index(cyclically_reduced.vec()));
}

CyclicWord::CyclicWord(const Word& w, bool unoriented) : unoriented_(unoriented) {
  Word core = cyclic_split(w).core;
  word_ = least_rotation(core);
  if (unoriented) {
    Word inv = least_rotation(core.inverse());
    if (compare_rotations(inv.vec(), 0, word_.vec(), 0) < 0) word_ = inv;
  }
}

bool is_conjugate(const Word& u, const Word& v, bool unoriented) {
  return CyclicWord(u, unoriented) == CyclicWord(v, unoriented);
}

std::optional<Word> conjugator(const Word& u, const Word& v) {
  CyclicSplit su = cyclic_split(u);
  CyclicSplit sv = cyclic_split(v);
  if (su.core.size() != sv.core.size()) return std::nullopt;
  const auto& a = su.core.vec();
  const auto& b = sv.core.vec();
  const std::size_t n = a.size();
  if (n == 0) return Word{};
  for (std::size_t k = 0; k < n; ++k) {
    if (compare_rotations(a, k, b, 0) == 0) {
      // b = t s with a = s t, s = a[0..k): b = s^-1 a s.
      Word s(std::vector<Letter>(a.begin(), a.begin() + k));
      // v = q b q^-1 = q s^-1 p^-1 u p s q^-1.
      return sv.prefix * s.inverse() * su.prefix.inverse();
    }
  }
  return std::nullopt;
}

Endomorphism::Endomorphism(int rank, std::vector<Word> images)
    : rank_(rank), images_(std::move(images)) {
  if (rank < 1) throw Error("rank must be positive");
  if (static_cast<int>(images_.size()) != rank) {
    throw Error("expected " + std::to_string(rank) + " images, got " +
                std::to_string(images_.size()));
  }
  for (const auto& w : images_) {
    if (w.max_generator() > rank) throw Error("image uses generator beyond rank");
  }
}

Endomorphism Endomorphism::identity(int rank) {
  std::vector<Word> im;
  for (int i = 1; i <= rank; ++i) im.push_back(Word::generator(i));
  return Endomorphism(rank, std::move(im));
}

Endomorphism Endomorphism::conjugation_by(int rank, const Word& x) {
  std::vector<Word> im;
  for (int i = 1; i <= rank; ++i) im.push_back(x.inverse() * Word::generator(i) * x);
  return Endomorphism(rank, std::move(im));
}

Word Endomorphism::apply(const Word& w) const {
  Word out;
  for (Letter l : w.letters()) {
    const Word& im = images_.at(std::abs(l) - 1);
    out *= (l > 0 ? im : im.inverse());
  }
  return out;
}

Endomorphism Endomorphism::power(int n) const {
  if (n < 0) throw Error("negative power of an endomorphism");
  Endomorphism result = identity(rank_);
  Endomorphism base = *this;
  while (n > 0) {
    if (n & 1) result = compose(result, base);
    base = compose(base, base);
    n >>= 1;
  }
  return result;
}

Endomorphism compose(const Endomorphism& phi, const Endomorphism& psi) {
  if (phi.rank() != psi.rank()) throw Error("rank mismatch in compose");
  std::vector<Word> im;
  im.reserve(psi.rank());
  for (const Word& w : psi.images()) im.push_back(phi.apply(w));
  return Endomorphism(phi.rank(), std::move(im));
}

namespace {

// Primitive root of a cyclically reduced word: s with c = s^k, k maximal.
Word cyclic_root(const Word& c) {
  const auto& l = c.vec();
  const std::size_t n = l.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = l[i] == l[i - d];
    if (ok) return Word(std::vector<Letter>(l.begin(), l.begin() + d));
  }
  return c;
}

}  // namespace

std::optional<Word> common_conjugator(const Endomorphism& phi, const Endomorphism& psi) {
  if (phi.rank() != psi.rank()) throw Error("rank mismatch");
  // Pick the first generator with nontrivial image to fix x up to centralizer.
  int g0 = 0;
  for (int g = 1; g <= psi.rank(); ++g) {
    if (!psi.image(g).empty()) {
      g0 = g;
      break;
    }
  }
  if (g0 == 0) {
    for (int g = 1; g <= phi.rank(); ++g)
      if (!phi.image(g).empty()) return std::nullopt;
    return Word{};
  }
  const Word& u = psi.image(g0);
  auto x0 = conjugator(u, phi.image(g0));
  if (!x0) return std::nullopt;
  CyclicSplit su = cyclic_split(u);
  Word r = su.prefix * cyclic_root(su.core) * su.prefix.inverse();  // generates C(u)

  auto works = [&](const Word& x) {
    for (int g = 1; g <= phi.rank(); ++g) {
      if (x * psi.image(g) * x.inverse() != phi.image(g)) return false;
    }
    return true;
  };
  // x = x0 r^j; |j| is bounded by the lengths involved.
  std::size_t total = 0;
  for (int g = 1; g <= phi.rank(); ++g) total += phi.image(g).size() + psi.image(g).size();
  int bound = static_cast<int>(total + x0->size()) / std::max<int>(1, static_cast<int>(r.size())) + 2;
  for (int j = 0; j <= bound; ++j) {
    for (int s : {j, -j}) {
      Word x = *x0 * r.power(s);
      if (works(x)) return x;
      if (j == 0) break;
    }
  }
  return std::nullopt;
}

namespace {

// x with phi(g) = x g x^-1 for every generator. From phi(a) = p a p^-1 and
// phi(b) = q b q^-1 we get x = p a^m = q b^n, so p^-1 q = a^m b^-n.
std::optional<Word> inner_conjugator(const Endomorphism& phi) {
  if (phi.rank() < 2) return common_conjugator(phi, Endomorphism::identity(phi.rank()));
  CyclicSplit s1 = cyclic_split(phi.image(1)), s2 = cyclic_split(phi.image(2));
  if (s1.core != Word{1} || s2.core != Word{2}) return std::nullopt;
  const Word y = s1.prefix.inverse() * s2.prefix;
  std::size_t i = 0;
  int m = 0;
  while (i < y.size() && (y[i] == 1 || y[i] == -1) && (m == 0 || (y[i] > 0) == (m > 0))) m += y[i++];
  for (std::size_t j = i; j < y.size(); ++j)
    if (y[j] != y[i] || (y[j] != 2 && y[j] != -2)) return std::nullopt;
  const Word x = s1.prefix * Word::generator(1).power(m);
  const Word xi = x.inverse();
  for (int g = 1; g <= phi.rank(); ++g)
    if (x * Word::generator(g) * xi != phi.image(g)) return std::nullopt;
  return x;
}

}  // namespace

std::optional<InnerPower> inner_power(const Endomorphism& phi, int max_k) {
  const int r = phi.rank();
  // Abelianization of phi^k; an inner power needs it to be the identity.
  std::vector<std::vector<long>> m(r), mk;
  for (int j = 0; j < r; ++j) {
    auto col = phi.image(j + 1).abelianization(r);
    for (int i = 0; i < r; ++i) m[i].push_back(col[i]);
  }
  mk = m;
  Endomorphism it = phi;
  const std::size_t length_cap = 1000000;
  for (int k = 1; k <= max_k; ++k) {
    bool identity = true;
    long largest = 0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        identity = identity && mk[i][j] == (i == j ? 1 : 0);
        largest = std::max(largest, std::abs(mk[i][j]));
      }
    // Entries of a finite-order integer matrix power stay small.
    if (largest > (1L << 40)) return std::nullopt;
    if (identity) {
      if (auto x = inner_conjugator(it)) return InnerPower{k, *x};
    }
    if (k == max_k) break;
    std::size_t total = 0;
    for (const Word& w : it.images()) total += w.size();
    if (total > length_cap) return std::nullopt;
    it = compose(phi, it);
    std::vector<std::vector<long>> next(r, std::vector<long>(r, 0));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        for (int l = 0; l < r; ++l) next[i][j] += m[i][l] * mk[l][j];
    mk = std::move(next);
  }
  return std::nullopt;
}

namespace {

using Vec = std::vector<long>;

Vec mat_vec(const std::vector<Vec>& m, const Vec& v) {
  Vec out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

struct SearchState {
  const Endomorphism* phi = nullptr;
  std::vector<Endomorphism> powers;            // powers[n-1] = phi^n
  std::vector<std::vector<Vec>> abel;          // abelianization of phi^n
  int rank = 0;
  int max_period = 0;
  bool kernel_trivial = false;                 // no abelian vector is +-fixed
  std::optional<PeriodicWitness> best_plus;
  std::optional<PeriodicWitness> best_minus;
  std::vector<Letter> word;
  int target_len = 0;
  std::vector<long> exps;
};

bool abel_allows(const SearchState& st, int n, const Vec& v, int sign) {
  Vec w = mat_vec(st.abel[n - 1], v);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (w[i] != sign * v[i]) return false;
  return true;
}

bool is_canonical_unoriented(const std::vector<Letter>& l) {
  // l must be its own least rotation, and no rotation of its inverse smaller.
  for (std::size_t k = 1; k < l.size(); ++k)
    if (compare_rotations(l, k, l, 0) < 0) return false;
  std::vector<Letter> inv(l.rbegin(), l.rend());
  for (Letter& x : inv) x = -x;
  for (std::size_t k = 0; k < inv.size(); ++k)
    if (compare_rotations(inv, k, l, 0) < 0) return false;
  return true;
}

void consider(SearchState& st) {
  const std::vector<Letter>& l = st.word;
  if (!is_canonical_unoriented(l)) return;
  Word a(l);
  Vec v(st.exps.begin(), st.exps.end());
  int limit_plus = st.best_plus ? st.best_plus->period - 1 : st.max_period;
  int limit_minus = st.best_minus ? st.best_minus->period - 1 : st.max_period;
  int limit = std::max(limit_plus, limit_minus);
  for (int n = 1; n <= limit; ++n) {
    bool plus_ok = n <= limit_plus && abel_allows(st, n, v, +1);
    bool minus_ok = n <= limit_minus && abel_allows(st, n, v, -1);
    if (!plus_ok && !minus_ok) continue;
    Word img = st.powers[n - 1].apply(a);
    if (plus_ok) {
      if (auto x = conjugator(a, img)) {
        st.best_plus = PeriodicWitness{CyclicWord(a, false), n, +1, *x};
        limit_plus = n - 1;
      }
    }
    if (minus_ok) {
      if (auto x = conjugator(a.inverse(), img)) {
        st.best_minus = PeriodicWitness{CyclicWord(a, false), n, -1, *x};
        limit_minus = n - 1;
      }
    }
  }
}

void extend(SearchState& st, int remaining) {
  if (remaining == 0) {
    if (st.word.size() >= 2 && st.word.back() == -st.word.front()) return;
    consider(st);
    return;
  }
  if (st.kernel_trivial) {
    long l1 = 0;
    for (long e : st.exps) l1 += std::labs(e);
    if (l1 > remaining) return;
  }
  const Letter first = st.word.empty() ? 0 : st.word.front();
  for (int g = 1; g <= st.rank; ++g) {
    for (int s : {+1, -1}) {
      Letter l = s * g;
      if (!st.word.empty() && st.word.back() == -l) continue;
      // Canonical representatives start with their least letter, which is
      // compared against letters of the inverse word too.
      if (!st.word.empty()) {
        if (letter_key(l) < letter_key(first) || letter_key(-l) < letter_key(first)) continue;
      }
      st.word.push_back(l);
      st.exps[g - 1] += s;
      extend(st, remaining - 1);
      st.exps[g - 1] -= s;
      st.word.pop_back();
    }
  }
}

}  // namespace

std::optional<PeriodicWitness> periodic_conjugacy_search(const Endomorphism& phi,
                                                         int max_period, int max_len) {
  if (max_period < 1 || max_len < 1) throw Error("search bounds must be positive");
  SearchState st;
  st.phi = &phi;
  st.rank = phi.rank();
  st.max_period = max_period;
  st.exps.assign(st.rank, 0);

  std::vector<Vec> m1(st.rank, Vec(st.rank, 0));
  for (int j = 1; j <= st.rank; ++j) {
    Vec col = phi.image(j).abelianization(st.rank);
    for (int i = 0; i < st.rank; ++i) m1[i][j - 1] = col[i];
  }
  Endomorphism p = phi;
  for (int n = 1; n <= max_period; ++n) {
    st.powers.push_back(p);
    std::vector<Vec> mn(st.rank, Vec(st.rank, 0));
    for (int j = 1; j <= st.rank; ++j) {
      Vec col = p.image(j).abelianization(st.rank);
      for (int i = 0; i < st.rank; ++i) mn[i][j - 1] = col[i];
    }
    st.abel.push_back(std::move(mn));
    if (n < max_period) p = compose(phi, p);
  }
  // If M^n -+ I is nonsingular for every n, only null-homologous words qualify.
  st.kernel_trivial = true;
  for (int n = 1; n <= max_period && st.kernel_trivial; ++n) {
    for (int sign : {+1, -1}) {
      // Fraction-free Gaussian elimination for the rank of M^n - sign*I.
      std::vector<std::vector<long double>> a(st.rank, std::vector<long double>(st.rank));
      for (int i = 0; i < st.rank; ++i)
        for (int j = 0; j < st.rank; ++j)
          a[i][j] = static_cast<long double>(st.abel[n - 1][i][j] - (i == j ? sign : 0));
      int rk = 0;
      for (int c = 0; c < st.rank && rk < st.rank; ++c) {
        int piv = -1;
        for (int r = rk; r < st.rank; ++r)
          if (a[r][c] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(a[piv], a[rk]);
        for (int r = 0; r < st.rank; ++r) {
          if (r == rk || a[r][c] == 0) continue;
          long double f = a[r][c] / a[rk][c];
          for (int k = 0; k < st.rank; ++k) a[r][k] -= f * a[rk][k];
        }
        ++rk;
      }
      if (rk < st.rank) st.kernel_trivial = false;
    }
  }

  for (int len = 1; len <= max_len; ++len) {
    st.target_len = len;
    extend(st, len);
    if (st.best_plus && st.best_plus->period == 1) break;
  }
  if (st.best_plus) return st.best_plus;
  return st.best_minus;
}

}  // namespace mtorus
