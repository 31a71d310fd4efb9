#include "mtorus/parse.hpp"

#include <cctype>
#include <tuple>
#include <utility>

namespace mtorus {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::vector<EndoSpec> all() {
    std::vector<EndoSpec> out;
    skip();
    while (pos_ < s_.size()) out.push_back(spec());
    return out;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  std::string pending_name_, pending_expect_;
  EndoSpec* open_ = nullptr;  // spec still missing images

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  static std::string trim(std::string t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    std::size_t i = 0;
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    return t.substr(i);
  }

  void comment() {
    std::string body;
    while (pos_ < s_.size() && s_[pos_] != '\n') {
      body += s_[pos_];
      advance();
    }
    body = trim(body.substr(1));
    for (auto [key, pending, field] :
         {std::tuple{"name:", &pending_name_, &EndoSpec::name}, std::tuple{"expect:", &pending_expect_, &EndoSpec::expect}}) {
      const std::string k = key;
      if (body.compare(0, k.size(), k) != 0) continue;
      const std::string value = trim(body.substr(k.size()));
      if (open_)
        (*open_).*field = value;
      else
        *pending = value;
    }
  }

  void skip() {
    while (pos_ < s_.size()) {
      if (s_[pos_] == '#')
        comment();
      else if (std::isspace(static_cast<unsigned char>(s_[pos_])))
        advance();
      else
        break;
    }
  }

  bool at(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  void expect(const std::string& token) {
    skip();
    if (s_.compare(pos_, token.size(), token) != 0) fail("expected '" + token + "'");
    for (std::size_t i = 0; i < token.size(); ++i) advance();
  }

  std::string identifier() {
    skip();
    std::string id;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      id += s_[pos_];
      advance();
    }
    return id;
  }

  int integer() {
    skip();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected a number");
    long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000) fail("number too large");
      advance();
    }
    return static_cast<int>(v);
  }

  static Letter letter(char c, int rank, int line, int col) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const int i = lower - 'a' + 1;
    if (i > rank) throw ParseError(std::string("undeclared generator '") + lower + "'", line, col);
    return std::isupper(static_cast<unsigned char>(c)) ? -i : i;
  }

  // Returns the letters as written, before free reduction.
  std::vector<Letter> word(int rank) {
    std::vector<Letter> out;
    skip();
    if (at('1')) {
      advance();
      return out;
    }
    while (true) {
      skip();
      if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_]))) break;
      const int l0 = line_, c0 = col_;
      const std::string id = identifier();
      std::vector<Letter> ls;
      for (std::size_t i = 0; i < id.size(); ++i) ls.push_back(letter(id[i], rank, l0, c0 + static_cast<int>(i)));
      out.insert(out.end(), ls.begin(), ls.end() - 1);
      Letter last = ls.back();
      int power = 1;
      skip();
      if (at('^')) {
        advance();
        skip();
        bool negative = false;
        if (at('-')) {
          advance();
          negative = true;
        }
        power = integer();
        if (negative) last = -last;
      }
      for (int k = 0; k < power; ++k) out.push_back(last);
    }
    if (out.empty()) fail("expected a word");
    return out;
  }

  EndoSpec spec() {
    EndoSpec sp;
    sp.name = std::exchange(pending_name_, {});
    sp.expect = std::exchange(pending_expect_, {});
    if (identifier() != "rank") fail("expected 'rank'");
    sp.rank = integer();
    if (sp.rank < 1 || sp.rank > 26) fail("rank must be between 1 and 26");
    expect(";");
    for (int i = 0; i < sp.rank; ++i) sp.names.emplace_back(1, static_cast<char>('a' + i));
    std::vector<bool> have(sp.rank, false);
    sp.images.resize(sp.rank);
    int count = 0;
    open_ = &sp;
    while (count < sp.rank) {
      skip();
      if (pos_ >= s_.size() || s_.compare(pos_, 4, "rank") == 0)
        for (int i = 0; i < sp.rank; ++i)
          if (!have[i]) fail("missing image for " + sp.names[i]);
      const int l0 = line_, c0 = col_;
      const std::string lhs = identifier();
      if (lhs.size() != 1 || !std::islower(static_cast<unsigned char>(lhs[0])))
        throw ParseError("expected a generator", l0, c0);
      const int g = letter(lhs[0], sp.rank, l0, c0);
      if (have[g - 1]) throw ParseError("duplicate image for " + lhs, l0, c0);
      expect("->");
      const std::vector<Letter> raw = word(sp.rank);
      expect(";");
      sp.images[g - 1] = Word(raw);
      if (sp.images[g - 1].size() != raw.size())
        sp.warnings.push_back("image of " + lhs + " was not reduced; reduced to " + sp.images[g - 1].to_string());
      have[g - 1] = true;
      ++count;
    }
    open_ = nullptr;
    skip();
    return sp;
  }
};

}  // namespace

std::vector<EndoSpec> parse_all(const std::string& text) { return Parser(text).all(); }

EndoSpec parse(const std::string& text) {
  auto specs = parse_all(text);
  if (specs.empty()) throw ParseError("expected 'rank'", 1, 1);
  if (specs.size() > 1) throw ParseError("more than one endomorphism", 1, 1);
  return specs.front();
}

std::string print(const EndoSpec& s) {
  std::string out = "rank " + std::to_string(s.rank) + ";";
  for (int i = 0; i < s.rank; ++i) {
    out += " " + s.names[i] + " ->";
    const Word& w = s.images[i];
    if (w.empty()) out += " 1";
    for (Letter l : w.letters()) {
      const char c = static_cast<char>('a' + (l > 0 ? l : -l) - 1);
      out += ' ';
      out += l > 0 ? c : static_cast<char>(std::toupper(c));
    }
    out += ";";
  }
  return out;
}

}  // namespace mtorus
