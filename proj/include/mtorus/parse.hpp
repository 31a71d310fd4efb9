#pragma once

// Text input:   rank 2; a -> a b; b -> b a;
//
// Generators are the letters a, b, c, ... (rank <= 26). An uppercase letter or
// a suffix ^-1 inverts, ^n raises to a power, 1 is the empty word. Letters may
// be juxtaposed ("a -> abA"). '#' starts a comment; a comment of the form
// "# name: ..." or "# expect: ..." before a rank statement is attached to that
// spec.

#include <cstddef>
#include <string>
#include <vector>

#include "mtorus/words.hpp"

namespace mtorus {

struct EndoSpec {
  int rank = 0;
  std::vector<std::string> names;
  std::vector<Word> images;
  std::string name;
  std::string expect;
  std::vector<std::string> warnings;

  Endomorphism endomorphism() const { return Endomorphism(rank, images); }
  friend bool operator==(const EndoSpec& a, const EndoSpec& b) {
    return a.rank == b.rank && a.names == b.names && a.images == b.images;
  }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_, column_;
};

// Exactly one spec; throws ParseError.
EndoSpec parse(const std::string& text);
// Any number of specs, each starting with a rank statement.
std::vector<EndoSpec> parse_all(const std::string& text);

// Canonical text; parse(print(s)) == s.
std::string print(const EndoSpec& s);

}  // namespace mtorus
