#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "error.hpp"

namespace lambdatree {

namespace detail {

inline unsigned __int128 sat_pow(std::uint64_t base, int e) {
  const unsigned __int128 cap = static_cast<unsigned __int128>(1) << 100;
  unsigned __int128 r = 1;
  for (int i = 0; i < e; ++i) {
    r *= base;
    if (r > cap) return cap;
  }
  return r;
}

}  // namespace detail

/// Smallest h whose central band L_h = {h..lambda-h} is provably interchangeable
/// for subtrees of this size: size < (lambda-2h-4p+4)^(h/(2p-2)) and lambda-2h >= 3p-3.
/// Falls back to ceil((lambda+1)/2) (empty band, no compression); 0 when p = 1.
inline int level_bound(long long subtree_size, int lambda, int p) {
  if (subtree_size < 1) throw PreconditionError("subtree size must be positive");
  if (p == 1) return 0;
  for (int h = 0; lambda - 2 * h >= 3 * p - 3; ++h) {
    long long base = static_cast<long long>(lambda) - 2 * h - 4 * p + 4;
    if (base < 2) continue;
    // size < base^(h/(2p-2))  <=>  size^(2p-2) < base^h
    if (detail::sat_pow(static_cast<std::uint64_t>(subtree_size), 2 * p - 2) <
        detail::sat_pow(static_cast<std::uint64_t>(base), h))
      return h;
  }
  return (lambda + 2) / 2;
}

/// delta((u,v),(a,b)) over labels 0..lambda, stored per label class. With a
/// non-empty band L_h the classes are 0..h-1, the band, and lambda-h+1..lambda
/// (2h+1 classes); otherwise every label is its own class.
class DeltaTable {
 public:
  DeltaTable() = default;

  DeltaTable(int lambda, int p, int level) : lambda_(lambda), p_(p), level_(level) {
    if (lambda < 0 || p < 1) throw PreconditionError("bad table parameters");
    bundle_ = level >= 0 && level <= lambda - level;
    if (!bundle_) level_ = (lambda + 2) / 2;
    k_ = bundle_ ? 2 * level_ + 1 : lambda_ + 1;
    bits_.assign(static_cast<std::size_t>(k_) * k_, 0);
  }

  static DeltaTable uncompressed(int lambda, int p) { return DeltaTable(lambda, p, -1); }

  int lambda() const { return lambda_; }
  int p() const { return p_; }
  int level() const { return level_; }
  bool has_bundle() const { return bundle_; }
  int classes() const { return k_; }

  int class_of(int label) const {
    if (!bundle_ || label < level_) return label;
    if (label <= lambda_ - level_) return level_;
    return label - lambda_ + 2 * level_;
  }
  bool is_bundle(int k) const { return bundle_ && k == level_; }
  int class_lo(int k) const {
    if (!bundle_ || k <= level_) return k;
    return k + lambda_ - 2 * level_;
  }
  int class_hi(int k) const { return is_bundle(k) ? lambda_ - level_ : class_lo(k); }

  bool at(int a, int b) const {
    if (std::abs(a - b) < p_) return false;
    return bits_[static_cast<std::size_t>(class_of(a)) * k_ + class_of(b)] != 0;
  }
  bool cell(int ka, int kb) const { return bits_[static_cast<std::size_t>(ka) * k_ + kb] != 0; }
  void set_cell(int ka, int kb, bool v) { bits_[static_cast<std::size_t>(ka) * k_ + kb] = v ? 1 : 0; }

  bool any() const {
    for (int a = 0; a <= lambda_; ++a)
      for (int b = 0; b <= lambda_; ++b)
        if (at(a, b)) return true;
    return false;
  }

  std::vector<std::vector<char>> expand() const {
    std::vector<std::vector<char>> m(lambda_ + 1, std::vector<char>(lambda_ + 1, 0));
    for (int a = 0; a <= lambda_; ++a)
      for (int b = 0; b <= lambda_; ++b) m[a][b] = at(a, b) ? 1 : 0;
    return m;
  }

  /// Rows are a (parent label), columns are b; '.' marks |a-b| < p.
  std::string dump() const {
    std::string out;
    for (int a = 0; a <= lambda_; ++a) {
      for (int b = 0; b <= lambda_; ++b) out += std::abs(a - b) < p_ ? '.' : (at(a, b) ? '1' : '0');
      out += '\n';
    }
    return out;
  }

 private:
  int lambda_ = 0;
  int p_ = 1;
  int level_ = 0;
  bool bundle_ = false;
  int k_ = 0;
  std::vector<std::uint8_t> bits_;
};

using FullTable = std::vector<std::vector<char>>;

/// Smallest h for which every a in L_h behaves alike (head) / every b in L_h behaves alike (neck).
inline int measured_head_level(const FullTable& d, int p) {
  int lambda = static_cast<int>(d.size()) - 1;
  for (int h = 0; h <= lambda - h; ++h) {
    bool ok = true;
    for (int b = 0; b <= lambda && ok; ++b) {
      int seen = -1;
      for (int a = h; a <= lambda - h && ok; ++a) {
        if (std::abs(a - b) < p) continue;
        if (seen < 0) seen = d[a][b];
        else if (seen != d[a][b]) ok = false;
      }
    }
    if (ok) return h;
  }
  return (lambda + 2) / 2;
}

inline int measured_neck_level(const FullTable& d, int p) {
  int lambda = static_cast<int>(d.size()) - 1;
  for (int h = 0; h <= lambda - h; ++h) {
    bool ok = true;
    for (int a = 0; a <= lambda && ok; ++a) {
      int seen = -1;
      for (int b = h; b <= lambda - h && ok; ++b) {
        if (std::abs(a - b) < p) continue;
        if (seen < 0) seen = d[a][b];
        else if (seen != d[a][b]) ok = false;
      }
    }
    if (ok) return h;
  }
  return (lambda + 2) / 2;
}

}  // namespace lambdatree
