#pragma once

#include <cctype>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace tempolearn {

struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& msg, int line_, int column_)
      : std::runtime_error(msg + " at line " + std::to_string(line_) + ", column " +
                           std::to_string(column_)),
        line(line_),
        column(column_) {}
};

// Minimal s-expression tree. Symbols are lower-cased on read; PDDL names are
// case-insensitive.
struct Sexpr {
  bool is_list = false;
  std::string symbol;
  std::vector<Sexpr> items;
  int line = 0;
  int column = 0;

  bool is_symbol(const std::string& s) const { return !is_list && symbol == s; }
  const Sexpr& at(std::size_t i) const {
    if (!is_list || i >= items.size())
      throw ParseError("expected list element " + std::to_string(i), line, column);
    return items[i];
  }
  std::size_t size() const { return items.size(); }
  // Head symbol of a list, or "" for the empty list / a bare symbol.
  std::string head() const {
    if (!is_list || items.empty() || items[0].is_list) return "";
    return items[0].symbol;
  }
};

class SexprReader {
 public:
  explicit SexprReader(const std::string& text) : text_(text) {}

  std::vector<Sexpr> read_all() {
    std::vector<Sexpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  Sexpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
    if (text_[pos_] == '(') {
      Sexpr list;
      list.is_list = true;
      list.line = line_;
      list.column = col_;
      advance();
      skip_space();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        list.items.push_back(read());
        skip_space();
      }
      if (pos_ >= text_.size()) throw ParseError("unbalanced '('", list.line, list.column);
      advance();  // ')'
      return list;
    }
    if (text_[pos_] == ')') throw ParseError("unexpected ')'", line_, col_);
    Sexpr sym;
    sym.line = line_;
    sym.column = col_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      sym.symbol += static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
      advance();
    }
    return sym;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string text_;  // owned: the reader may outlive the caller's buffer
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace tempolearn
