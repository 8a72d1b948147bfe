// Compiled with -mavx2; only reached after a CPUID check.

#include <immintrin.h>

#include <bit>
#include <cstring>

#include "seqmine/kernels.hpp"

namespace seqmine::kernels::avx2 {

namespace {

// Keys are < 2^63, so the signed 64-bit compare orders them correctly.
inline __m256i load4(const Key* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }

// Lane mask (bit per 64-bit lane) of keys > bound.
inline unsigned gt_mask(__m256i v, __m256i bound) {
  return static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpgt_epi64(v, bound))));
}

// First index >= from with keys[index] > bound. Probes one vector linearly,
// then gallops in vector-sized strides.
std::size_t first_greater(std::span<const Key> keys, std::size_t from, Key bound) {
  const std::size_t n = keys.size();
  const __m256i vb = _mm256_set1_epi64x(static_cast<long long>(bound));
  if (from + 4 <= n) {
    if (unsigned m = gt_mask(load4(keys.data() + from), vb)) return from + std::countr_zero(m);
  } else {
    while (from < n && keys[from] <= bound) ++from;
    return from;
  }
  // keys[from + 3] <= bound.
  std::size_t lo = from + 3;
  std::size_t step = 4;
  while (lo + step < n && keys[lo + step] <= bound) {
    lo += step;
    step <<= 1;
  }
  std::size_t hi = lo + step < n ? lo + step : n;
  while (hi - lo > 8) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (keys[mid] <= bound) lo = mid;
    else hi = mid;
  }
  std::size_t i = lo + 1;
  for (; i + 4 <= hi; i += 4) {
    if (unsigned m = gt_mask(load4(keys.data() + i), vb)) return i + std::countr_zero(m);
  }
  while (i < hi && keys[i] <= bound) ++i;
  return i;
}

// Index one past the run of keys < limit starting at `from` (keys[from] < limit).
std::size_t run_end(std::span<const Key> keys, std::size_t from, Key limit) {
  const std::size_t n = keys.size();
  const __m256i vl = _mm256_set1_epi64x(static_cast<long long>(limit - 1));
  std::size_t i = from;
  for (; i + 4 <= n; i += 4) {
    if (unsigned m = gt_mask(load4(keys.data() + i), vl)) return i + std::countr_zero(m);
  }
  while (i < n && keys[i] < limit) ++i;
  return i;
}

}  // namespace

JoinCount intersect(std::span<const Key> a, std::span<const Key> b, Key* out) {
  std::size_t i = 0, j = 0, n = 0;
  const std::size_t na = a.size(), nb = b.size();
  while (i + 4 <= na && j + 4 <= nb) {
    const __m256i va = load4(a.data() + i);
    const __m256i vb = load4(b.data() + j);
    // Compare each lane of va against all four lanes of vb via rotations.
    __m256i eq = _mm256_cmpeq_epi64(va, vb);
    eq = _mm256_or_si256(eq, _mm256_cmpeq_epi64(va, _mm256_permute4x64_epi64(vb, 0x39)));
    eq = _mm256_or_si256(eq, _mm256_cmpeq_epi64(va, _mm256_permute4x64_epi64(vb, 0x4e)));
    eq = _mm256_or_si256(eq, _mm256_cmpeq_epi64(va, _mm256_permute4x64_epi64(vb, 0x93)));
    unsigned m = static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(eq)));
    while (m) {
      out[n++] = a[i + std::countr_zero(m)];
      m &= m - 1;
    }
    const Key amax = a[i + 3];
    const Key bmax = b[j + 3];
    if (amax <= bmax) i += 4;
    if (bmax <= amax) j += 4;
  }
  while (i < na && j < nb) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      out[n++] = a[i];
      ++i;
      ++j;
    }
  }
  return {n, count_sids({out, n})};
}

JoinCount s_join(std::span<const Key> prefix, std::size_t prefix_sids, std::span<const Key> atom,
                 std::size_t min_sids, Key* out) {
  JoinCount r;
  std::size_t runs_left = prefix_sids;
  std::size_t i = 0, j = 0;
  while (i < prefix.size() && j < atom.size()) {
    const Key first = prefix[i];
    const Key next_sid = ((first >> 32) + 1) << 32;
    i = run_end(prefix, i, next_sid);
    --runs_left;

    j = first_greater(atom, j, first);
    if (j < atom.size() && atom[j] < next_sid) {
      const std::size_t end = run_end(atom, j, next_sid);
      std::memcpy(out + r.size, atom.data() + j, (end - j) * sizeof(Key));
      r.size += end - j;
      j = end;
      ++r.sids;
    }

    if (r.sids + runs_left < min_sids) return {};
  }
  return r.sids < min_sids ? JoinCount{} : r;
}

std::size_t count_sids(std::span<const Key> keys) {
  const std::size_t n = keys.size();
  if (n == 0) return 0;
  std::size_t count = 1;
  std::size_t i = 1;
  const __m256i hi_mask = _mm256_set1_epi64x(static_cast<long long>(0xffffffff00000000ULL));
  for (; i + 4 <= n; i += 4) {
    const __m256i cur = _mm256_and_si256(load4(keys.data() + i), hi_mask);
    const __m256i prev = _mm256_and_si256(load4(keys.data() + i - 1), hi_mask);
    const unsigned same = static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(cur, prev))));
    count += 4 - static_cast<std::size_t>(std::popcount(same));
  }
  for (; i < n; ++i) count += (keys[i] >> 32) != (keys[i - 1] >> 32);
  return count;
}

std::size_t count_above(const std::uint32_t* index, const std::uint32_t* bound, std::size_t n,
                        const std::uint32_t* table) {
  const int* base = reinterpret_cast<const int*>(table);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(index + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bound + i));
    const __m256i v = _mm256_i32gather_epi32(base, idx, 4);
    const unsigned m = static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpgt_epi32(v, b))));
    count += static_cast<std::size_t>(std::popcount(m));
  }
  for (; i < n; ++i) count += table[index[i]] > bound[i];
  return count;
}

}  // namespace seqmine::kernels::avx2
