#pragma once

// Exact arithmetic in finitely generated free groups.
//
// A letter is a nonzero int: +i is the i-th basis element (1-based), -i its
// inverse. Words are always kept freely reduced.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtorus {

using Letter = int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Total order on letters: a < A < b < B < ...
constexpr int letter_key(Letter l) noexcept {
  return 2 * ((l > 0 ? l : -l) - 1) + (l < 0 ? 1 : 0);
}

class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters);
  explicit Word(std::vector<Letter> letters);

  static Word generator(int index) { return Word({index}); }

  std::span<const Letter> letters() const noexcept { return letters_; }
  const std::vector<Letter>& vec() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  Word inverse() const;
  Word power(int n) const;

  // Maximal index of a generator occurring in the word (0 if empty).
  int max_generator() const noexcept;

  // Exponent sum of each generator 1..rank.
  std::vector<long> abelianization(int rank) const;

  // Rendering with generator names a, b, c, ...; inverses upper case.
  std::string to_string() const;
  std::string to_string(const std::vector<std::string>& names) const;

  friend Word operator*(const Word& u, const Word& v);
  Word& operator*=(const Word& v);

  friend bool operator==(const Word&, const Word&) = default;
  // Shortlex with letter_key order.
  friend bool operator<(const Word& u, const Word& v);

 private:
  std::vector<Letter> letters_;
};

// Single stack pass; idempotent.
std::vector<Letter> reduce(std::span<const Letter> letters);
inline Word reduce(const Word& w) { return w; }

// Splits w = p c p^-1 with c cyclically reduced.
struct CyclicSplit {
  Word prefix;
  Word core;
};
CyclicSplit cyclic_split(const Word& w);

// Cyclic rotation of a cyclically reduced word: letters [k..n) then [0..k).
Word rotate(const Word& w, std::size_t k);

// Conjugacy class representative: least rotation (under letter_key order) of
// the cyclically reduced core; with `unoriented` also over rotations of the
// inverse.
class CyclicWord {
 public:
  CyclicWord() = default;
  explicit CyclicWord(const Word& w, bool unoriented = true);

  const Word& word() const noexcept { return word_; }
  std::size_t size() const noexcept { return word_.size(); }
  bool empty() const noexcept { return word_.empty(); }
  bool unoriented() const noexcept { return unoriented_; }
  std::string to_string() const { return word_.to_string(); }

  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;

 private:
  Word word_;
  bool unoriented_ = true;
};

Word least_rotation(const Word& cyclically_reduced);

bool is_conjugate(const Word& u, const Word& v, bool unoriented = false);

// Some x with v = x u x^-1, if u and v are conjugate.
std::optional<Word> conjugator(const Word& u, const Word& v);

class Endomorphism {
 public:
  Endomorphism() = default;
  Endomorphism(int rank, std::vector<Word> images);

  static Endomorphism identity(int rank);
  // g -> x^-1 g x, the map written i_x in the mapping-torus constructions.
  static Endomorphism conjugation_by(int rank, const Word& x);

  int rank() const noexcept { return rank_; }
  const std::vector<Word>& images() const noexcept { return images_; }
  const Word& image(int generator) const { return images_.at(generator - 1); }

  Word apply(const Word& w) const;
  Endomorphism power(int n) const;

  friend bool operator==(const Endomorphism&, const Endomorphism&) = default;

 private:
  int rank_ = 0;
  std::vector<Word> images_;
};

inline Word apply(const Endomorphism& phi, const Word& w) { return phi.apply(w); }

// (phi o psi)(g) = phi(psi(g)).
Endomorphism compose(const Endomorphism& phi, const Endomorphism& psi);

// phi^k = (g -> x g x^-1) for the least k <= max_k, if any. Exact.
struct InnerPower {
  int k = 0;
  Word conjugator;
};
std::optional<InnerPower> inner_power(const Endomorphism& phi, int max_k);

// Whether phi(g) = x psi(g) x^-1 for a common x; returns x.
std::optional<Word> common_conjugator(const Endomorphism& phi, const Endomorphism& psi);

struct PeriodicWitness {
  CyclicWord cls;   // oriented class of a
  int period = 0;
  int orientation = +1;
  Word conjugator;  // phi^period(a) = x a^orientation x^-1
};

// Bounded semi-decision: least period n <= max_period (then shortest a,
// |a| <= max_len) with phi^n(a) conjugate to a. A reversing witness
// (phi^n(a) ~ a^-1) is reported only when no orienting one exists in bounds.
std::optional<PeriodicWitness> periodic_conjugacy_search(const Endomorphism& phi,
                                                         int max_period = 6,
                                                         int max_len = 12);

}  // namespace mtorus
