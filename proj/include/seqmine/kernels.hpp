#pragma once

// Id-list join kernels over packed (sid, eid) keys.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant in use is chosen once at startup from CPUID and can be
// overridden (tests pin each backend and compare outputs).
//
// Inputs are strictly ascending key arrays. Output buffers must have room for
// the stated maximum.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace seqmine::kernels {

using Key = std::uint64_t;

/// sid occupies the high word. sids must stay below 2^31 so that keys are
/// positive as signed 64-bit lanes (AVX2 only has a signed compare).
constexpr Key make_key(std::uint32_t sid, std::uint32_t eid) { return (Key{sid} << 32) | eid; }
constexpr std::uint32_t key_sid(Key k) { return static_cast<std::uint32_t>(k >> 32); }
constexpr std::uint32_t key_eid(Key k) { return static_cast<std::uint32_t>(k); }
constexpr std::uint32_t kMaxSid = 0x7fffffffu;

struct JoinCount {
  std::size_t size = 0;  // keys written
  std::size_t sids = 0;  // distinct sids among them
};

enum class Backend { scalar, avx2 };

/// Sorted intersection. `out` needs min(a.size(), b.size()) slots.
using IntersectFn = JoinCount (*)(std::span<const Key> a, std::span<const Key> b, Key* out);

/// Sequence-extension join: every atom key (s, e) for which prefix holds some
/// (s, e') with e' < e. `prefix_sids` is the distinct sid count of `prefix`.
/// A result with fewer than `min_sids` distinct sids is reported as {0, 0};
/// the scan stops as soon as that outcome is certain. `out` needs atom.size()
/// slots.
using SJoinFn = JoinCount (*)(std::span<const Key> prefix, std::size_t prefix_sids, std::span<const Key> atom,
                              std::size_t min_sids, Key* out);

using CountSidsFn = std::size_t (*)(std::span<const Key> keys);

/// Number of i < n with table[index[i]] > bound[i]. Indices, table values and
/// bounds must all be below 2^31.
using CountAboveFn = std::size_t (*)(const std::uint32_t* index, const std::uint32_t* bound, std::size_t n,
                                     const std::uint32_t* table);

struct KernelTable {
  IntersectFn intersect;
  SJoinFn s_join;
  CountSidsFn count_sids;
  CountAboveFn count_above;
};

namespace scalar {
JoinCount intersect(std::span<const Key> a, std::span<const Key> b, Key* out);
JoinCount s_join(std::span<const Key> prefix, std::size_t prefix_sids, std::span<const Key> atom,
                 std::size_t min_sids, Key* out);
std::size_t count_sids(std::span<const Key> keys);
std::size_t count_above(const std::uint32_t* index, const std::uint32_t* bound, std::size_t n,
                        const std::uint32_t* table);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SEQMINE_HAVE_AVX2_KERNELS 1
namespace avx2 {
JoinCount intersect(std::span<const Key> a, std::span<const Key> b, Key* out);
JoinCount s_join(std::span<const Key> prefix, std::size_t prefix_sids, std::span<const Key> atom,
                 std::size_t min_sids, Key* out);
std::size_t count_sids(std::span<const Key> keys);
std::size_t count_above(const std::uint32_t* index, const std::uint32_t* bound, std::size_t n,
                        const std::uint32_t* table);
}  // namespace avx2
#else
#define SEQMINE_HAVE_AVX2_KERNELS 0
#endif

/// True if the running CPU can execute `backend`.
bool supported(Backend backend);
/// Best supported backend.
Backend detect();
/// Selects the active backend. Throws InputError if unsupported.
void select(Backend backend);
Backend active();
const KernelTable& table();

std::string_view name(Backend backend);
/// "auto", "scalar" or "avx2".
Backend parse_backend(std::string_view text);

}  // namespace seqmine::kernels
