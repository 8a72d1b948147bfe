#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "seqmine/error.hpp"
#include "seqmine/kernels.hpp"

using namespace seqmine;
using namespace seqmine::kernels;

namespace {

std::vector<Key> random_keys(std::mt19937_64& rng, std::size_t n, std::uint32_t sids, std::uint32_t eids) {
  std::set<Key> keys;
  std::uniform_int_distribution<std::uint32_t> s(0, sids - 1), e(0, eids - 1);
  for (std::size_t i = 0; i < n; ++i) keys.insert(make_key(s(rng), e(rng)));
  return {keys.begin(), keys.end()};
}

std::size_t distinct_sids(const std::vector<Key>& keys) {
  std::set<std::uint32_t> s;
  for (Key k : keys) s.insert(key_sid(k));
  return s.size();
}

std::vector<Key> ref_intersect(const std::vector<Key>& a, const std::vector<Key>& b) {
  std::vector<Key> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Key> ref_s_join(const std::vector<Key>& prefix, const std::vector<Key>& atom) {
  std::vector<Key> out;
  for (Key y : atom) {
    const bool ok = std::any_of(prefix.begin(), prefix.end(),
                                [y](Key x) { return key_sid(x) == key_sid(y) && key_eid(x) < key_eid(y); });
    if (ok) out.push_back(y);
  }
  return out;
}

std::vector<Backend> backends() {
  std::vector<Backend> out{Backend::scalar};
  if (supported(Backend::avx2)) out.push_back(Backend::avx2);
  return out;
}

const KernelTable& table_of(Backend b) {
  select(b);
  return table();
}

struct RestoreBackend {
  Backend saved = active();
  ~RestoreBackend() { select(saved); }
};

}  // namespace

TEST(KernelKeys, PackSidHigh) {
  EXPECT_EQ(key_sid(make_key(7, 9)), 7u);
  EXPECT_EQ(key_eid(make_key(7, 9)), 9u);
  EXPECT_LT(make_key(1, 0xffffffffu), make_key(2, 0));
}

TEST(KernelDispatch, ParsesAndSelects) {
  RestoreBackend restore;
  EXPECT_EQ(parse_backend("scalar"), Backend::scalar);
  EXPECT_EQ(parse_backend("auto"), detect());
  EXPECT_THROW(parse_backend("neon"), InputError);
  select(Backend::scalar);
  EXPECT_EQ(active(), Backend::scalar);
  EXPECT_EQ(name(Backend::avx2), "avx2");
  if (!supported(Backend::avx2)) EXPECT_THROW(select(Backend::avx2), InputError);
}

TEST(KernelExamples, SJoinAndIntersect) {
  RestoreBackend restore;
  for (Backend b : backends()) {
    const auto& k = table_of(b);
    // Values from tests/oracle/derive.py.
    const std::vector<Key> a{make_key(0, 1), make_key(1, 3)}, atom{make_key(0, 2), make_key(1, 1)};
    std::vector<Key> out(atom.size());
    auto r = k.s_join(a, 2, atom, 0, out.data());
    ASSERT_EQ(r.size, 1u) << name(b);
    EXPECT_EQ(out[0], make_key(0, 2));
    EXPECT_EQ(r.sids, 1u);

    const std::vector<Key> self{make_key(0, 1), make_key(0, 2), make_key(0, 5), make_key(1, 4), make_key(2, 0), make_key(2, 3)};
    out.resize(self.size());
    r = k.s_join(self, 3, self, 0, out.data());
    out.resize(r.size);
    EXPECT_EQ(out, (std::vector<Key>{make_key(0, 2), make_key(0, 5), make_key(2, 3)})) << name(b);
    EXPECT_EQ(r.sids, 2u);

    const std::vector<Key> x{make_key(0, 1), make_key(0, 2)}, y{make_key(0, 2), make_key(1, 0)};
    out.assign(2, 0);
    r = k.intersect(x, y, out.data());
    ASSERT_EQ(r.size, 1u);
    EXPECT_EQ(out[0], make_key(0, 2));

    EXPECT_EQ(k.s_join(x, 1, {}, 0, out.data()).size, 0u);
    EXPECT_EQ(k.count_sids({}), 0u);
  }
}

TEST(KernelExamples, SJoinBelowThresholdComesBackEmpty) {
  RestoreBackend restore;
  for (Backend b : backends()) {
    const auto& k = table_of(b);
    const std::vector<Key> prefix{make_key(0, 0), make_key(1, 0), make_key(2, 0)};
    const std::vector<Key> atom{make_key(0, 1), make_key(1, 1)};
    std::vector<Key> out(atom.size());
    EXPECT_EQ(k.s_join(prefix, 3, atom, 2, out.data()).sids, 2u) << name(b);
    const auto r = k.s_join(prefix, 3, atom, 3, out.data());
    EXPECT_EQ(r.size, 0u) << name(b);
    EXPECT_EQ(r.sids, 0u);
  }
}

// Every backend against the brute-force definitions on random inputs of many
// shapes: dense single sids, long runs, many short runs, disjoint ranges.
TEST(KernelEquivalence, RandomInputsMatchReference) {
  RestoreBackend restore;
  std::mt19937_64 rng(2024);
  const std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes{{1, 64}, {4, 200}, {50, 8}, {1000, 3}, {200000, 2}};
  for (int round = 0; round < 400; ++round) {
    const auto [sids, eids] = shapes[static_cast<std::size_t>(round) % shapes.size()];
    const std::size_t na = std::uniform_int_distribution<std::size_t>(0, 300)(rng);
    const std::size_t nb = std::uniform_int_distribution<std::size_t>(0, 300)(rng);
    const auto a = random_keys(rng, na, sids, eids);
    const auto b = random_keys(rng, nb, sids, eids);
    const auto want_i = ref_intersect(a, b);
    const auto want_s = ref_s_join(a, b);
    const std::size_t min_sids = std::uniform_int_distribution<std::size_t>(0, 6)(rng);

    for (Backend be : backends()) {
      const auto& k = table_of(be);
      std::vector<Key> out(std::min(a.size(), b.size()));
      auto r = k.intersect(a, b, out.data());
      out.resize(r.size);
      ASSERT_EQ(out, want_i) << name(be) << " round " << round;
      ASSERT_EQ(r.sids, distinct_sids(want_i));

      out.assign(b.size(), 0);
      r = k.s_join(a, distinct_sids(a), b, 0, out.data());
      out.resize(r.size);
      ASSERT_EQ(out, want_s) << name(be) << " round " << round;
      ASSERT_EQ(r.sids, distinct_sids(want_s));

      out.assign(b.size(), 0);
      r = k.s_join(a, distinct_sids(a), b, min_sids, out.data());
      if (distinct_sids(want_s) >= min_sids) {
        out.resize(r.size);
        ASSERT_EQ(out, want_s) << name(be) << " round " << round;
      } else {
        ASSERT_EQ(r.size, 0u);
        ASSERT_EQ(r.sids, 0u);
      }

      ASSERT_EQ(k.count_sids(a), distinct_sids(a));
    }
  }
}

TEST(KernelEquivalence, CountAboveMatchesReference) {
  RestoreBackend restore;
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    const std::size_t width = std::uniform_int_distribution<std::size_t>(1, 500)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 100)(rng);
    std::vector<std::uint32_t> table(width), index(n), bound(n);
    for (auto& v : table) v = std::uniform_int_distribution<std::uint32_t>(0, 20)(rng);
    for (std::size_t i = 0; i < n; ++i) {
      index[i] = std::uniform_int_distribution<std::uint32_t>(0, static_cast<std::uint32_t>(width - 1))(rng);
      bound[i] = std::uniform_int_distribution<std::uint32_t>(0, 20)(rng);
    }
    std::size_t want = 0;
    for (std::size_t i = 0; i < n; ++i) want += table[index[i]] > bound[i];
    for (Backend be : backends()) {
      ASSERT_EQ(table_of(be).count_above(index.data(), bound.data(), n, table.data()), want) << name(be);
    }
  }
}

TEST(KernelEquivalence, LargeSidsNearLimit) {
  RestoreBackend restore;
  const std::vector<Key> a{make_key(kMaxSid - 1, 3), make_key(kMaxSid, 1), make_key(kMaxSid, 9)};
  const std::vector<Key> b{make_key(kMaxSid - 1, 4), make_key(kMaxSid, 0xfffffff0u)};
  for (Backend be : backends()) {
    const auto& k = table_of(be);
    std::vector<Key> out(b.size());
    const auto r = k.s_join(a, 2, b, 0, out.data());
    EXPECT_EQ(r.size, 2u) << name(be);
    EXPECT_EQ(r.sids, 2u);
    EXPECT_EQ(k.count_sids(a), 2u);
  }
}
