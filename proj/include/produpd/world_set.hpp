#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace produpd {

/// A subset of the worlds of a finite model, stored as a bitset over world
/// indices. Two inline words cover models of up to 128 worlds without
/// touching the heap, which is where the quantifier loops live.
class WorldSet {
 public:
  WorldSet() = default;
  explicit WorldSet(std::size_t universe);

  static WorldSet full(std::size_t universe);
  static WorldSet singleton(std::size_t universe, std::size_t index);

  std::size_t universe() const noexcept { return universe_; }

  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void clear() noexcept;

  std::size_t count() const noexcept;
  bool empty() const noexcept;
  bool is_full() const noexcept;
  bool is_subset_of(const WorldSet& other) const noexcept;
  bool intersects(const WorldSet& other) const noexcept;

  WorldSet complement() const;

  WorldSet& operator&=(const WorldSet& other) noexcept;
  WorldSet& operator|=(const WorldSet& other) noexcept;
  /// Set difference.
  WorldSet& operator-=(const WorldSet& other) noexcept;

  friend WorldSet operator&(WorldSet a, const WorldSet& b) noexcept { return a &= b; }
  friend WorldSet operator|(WorldSet a, const WorldSet& b) noexcept { return a |= b; }
  friend WorldSet operator-(WorldSet a, const WorldSet& b) noexcept { return a -= b; }
  friend bool operator==(const WorldSet& a, const WorldSet& b) noexcept;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const;

 private:
  void trim() noexcept;

  std::size_t universe_ = 0;
  boost::container::small_vector<std::uint64_t, 2> words_;
};

}  // namespace produpd
