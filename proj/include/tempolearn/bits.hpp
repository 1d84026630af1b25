#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <vector>

#include "tempolearn/model.hpp"

namespace tempolearn {

// Growable bitset keyed by interned atom ids.
struct Bits {
  std::vector<std::uint64_t> w;

  void set(int i) {
    const std::size_t word = static_cast<std::size_t>(i) / 64;
    if (word >= w.size()) w.resize(word + 1, 0);
    w[word] |= (std::uint64_t{1} << (i % 64));
  }
  void reset(int i) {
    const std::size_t word = static_cast<std::size_t>(i) / 64;
    if (word < w.size()) w[word] &= ~(std::uint64_t{1} << (i % 64));
  }
  bool test(int i) const {
    const std::size_t word = static_cast<std::size_t>(i) / 64;
    return word < w.size() && (w[word] >> (i % 64)) & 1;
  }
  bool any() const {
    for (auto x : w)
      if (x) return true;
    return false;
  }
  Bits& operator|=(const Bits& o) {
    if (o.w.size() > w.size()) w.resize(o.w.size(), 0);
    for (std::size_t i = 0; i < o.w.size(); ++i) w[i] |= o.w[i];
    return *this;
  }
  Bits& operator&=(const Bits& o) {
    if (w.size() > o.w.size()) w.resize(o.w.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] &= o.w[i];
    return *this;
  }
  Bits& andnot(const Bits& o) {  // *this &= ~o
    const std::size_t n = std::min(w.size(), o.w.size());
    for (std::size_t i = 0; i < n; ++i) w[i] &= ~o.w[i];
    return *this;
  }
  int popcount() const {
    int c = 0;
    for (auto x : w) c += std::popcount(x);
    return c;
  }
  friend bool intersects(const Bits& a, const Bits& b) {
    const std::size_t n = std::min(a.w.size(), b.w.size());
    for (std::size_t i = 0; i < n; ++i)
      if (a.w[i] & b.w[i]) return true;
    return false;
  }
  friend int and_popcount(const Bits& a, const Bits& b) {
    const std::size_t n = std::min(a.w.size(), b.w.size());
    int c = 0;
    for (std::size_t i = 0; i < n; ++i) c += std::popcount(a.w[i] & b.w[i]);
    return c;
  }
  friend bool is_subset(const Bits& a, const Bits& b) {  // a included in b
    for (std::size_t i = 0; i < a.w.size(); ++i) {
      const std::uint64_t bw = i < b.w.size() ? b.w[i] : 0;
      if (a.w[i] & ~bw) return false;
    }
    return true;
  }
  friend bool operator==(const Bits& a, const Bits& b) {
    const std::size_t n = std::max(a.w.size(), b.w.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t aw = i < a.w.size() ? a.w[i] : 0;
      const std::uint64_t bw = i < b.w.size() ? b.w[i] : 0;
      if (aw != bw) return false;
    }
    return true;
  }
};

// Atom <-> dense id table.
struct AtomIndex {
  std::vector<Atom> atoms;
  std::map<Atom, int> ids;

  int intern(const Atom& a) {
    auto it = ids.find(a);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(atoms.size());
    atoms.push_back(a);
    ids.emplace(a, id);
    return id;
  }
  int find(const Atom& a) const {
    auto it = ids.find(a);
    return it == ids.end() ? -1 : it->second;
  }
  std::size_t size() const { return atoms.size(); }
};

}  // namespace tempolearn
