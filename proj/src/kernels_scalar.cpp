#include "seqmine/kernels.hpp"

namespace seqmine::kernels::scalar {

namespace {

// First index >= from whose key exceeds `bound`, by exponential then binary search.
std::size_t gallop_past(std::span<const Key> keys, std::size_t from, Key bound) {
  const std::size_t n = keys.size();
  if (from >= n || keys[from] > bound) return from;
  std::size_t lo = from;  // keys[lo] <= bound
  std::size_t step = 1;
  while (lo + step < n && keys[lo + step] <= bound) {
    lo += step;
    step <<= 1;
  }
  std::size_t hi = lo + step < n ? lo + step : n;  // keys[hi] > bound or hi == n
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (keys[mid] <= bound) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace

JoinCount intersect(std::span<const Key> a, std::span<const Key> b, Key* out) {
  JoinCount r;
  std::size_t i = 0, j = 0;
  std::uint64_t last_sid = ~std::uint64_t{0};
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      const std::uint64_t sid = a[i] >> 32;
      r.sids += sid != last_sid;
      last_sid = sid;
      out[r.size++] = a[i];
      ++i;
      ++j;
    }
  }
  return r;
}

JoinCount s_join(std::span<const Key> prefix, std::size_t prefix_sids, std::span<const Key> atom,
                 std::size_t min_sids, Key* out) {
  JoinCount r;
  std::size_t runs_left = prefix_sids;
  std::size_t i = 0, j = 0;
  while (i < prefix.size() && j < atom.size()) {
    // The run's first key carries the smallest eid for this sid.
    const Key first = prefix[i];
    const Key next_sid = ((first >> 32) + 1) << 32;
    while (i < prefix.size() && prefix[i] < next_sid) ++i;
    --runs_left;

    j = gallop_past(atom, j, first);
    const std::size_t before = r.size;
    while (j < atom.size() && atom[j] < next_sid) out[r.size++] = atom[j++];
    r.sids += r.size != before;

    if (r.sids + runs_left < min_sids) return {};
  }
  return r.sids < min_sids ? JoinCount{} : r;
}

std::size_t count_sids(std::span<const Key> keys) {
  if (keys.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t i = 1; i < keys.size(); ++i) n += (keys[i] >> 32) != (keys[i - 1] >> 32);
  return n;
}

std::size_t count_above(const std::uint32_t* index, const std::uint32_t* bound, std::size_t n,
                        const std::uint32_t* table) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += table[index[i]] > bound[i];
  return count;
}

}  // namespace seqmine::kernels::scalar
