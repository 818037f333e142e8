#include "doctest.h"

#include <cmath>
#include <random>

#include "streamscore/model.hpp"

using namespace streamscore;

namespace {

constexpr double k25Gbps = 25e9 / 8.0;

LinkSpec link25(double alpha = 1.0) { return {k25Gbps, alpha, 0.016}; }

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("t_local") {
  ComputeSpec c{34e12, 68e12};
  CHECK(t_local(WorkloadSpec::from_work(1e9, 34e12), c) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t_local(WorkloadSpec::from_work(1e9, 0.0), c) == 0.0);
  CHECK(t_local(WorkloadSpec::from_work(1e9, 20e12), ComputeSpec{5e12, 5e12}) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(t_local(WorkloadSpec::from_work(1e9, 1e12), ComputeSpec{0.0, 1.0}), DomainError);
}

TEST_CASE("t_transfer") {
  WorkloadSpec w{0.5e9, 0.0, {}, {}};
  CHECK(t_transfer(w, link25()) == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(t_transfer(w, link25(0.5)) == doctest::Approx(0.32).epsilon(1e-12));
  CHECK(t_transfer(WorkloadSpec{0.0, 0.0, {}, {}}, link25()) == 0.0);
  CHECK_THROWS_AS(t_transfer(w, LinkSpec{0.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("t_remote") {
  const auto w = WorkloadSpec::from_work(1e9, 34e12);
  CHECK(t_remote(w, ComputeSpec{34e12, 34e12}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t_remote(w, ComputeSpec{34e12, 68e12}) == doctest::Approx(0.5).epsilon(1e-12));
  const ComputeSpec same{7e12, 7e12};
  CHECK(t_remote(w, same) == t_local(w, same));
  CHECK_THROWS_AS(t_remote(w, ComputeSpec{1.0, 0.0}), DomainError);
}

TEST_CASE("t_pct breakdown") {
  const auto w = WorkloadSpec::from_work(0.5e9, 34e12);
  const ComputeSpec c{34e12, 34e12};

  auto b1 = t_pct(w, link25(), c, IoOverhead{1.0});
  CHECK(b1.t_io == 0.0);
  CHECK(b1.t_pct == doctest::Approx(b1.t_transfer + b1.t_remote));

  auto b2 = t_pct(w, link25(), c, IoOverhead{2.0});
  CHECK(b2.t_pct == doctest::Approx(1.32).epsilon(1e-12));
  CHECK(b2.t_io == doctest::Approx(0.16).epsilon(1e-12));

  auto b3 = t_pct(WorkloadSpec::from_work(0.5e9, 0.0), link25(), c, IoOverhead{3.0});
  CHECK(b3.t_pct == doctest::Approx(0.48).epsilon(1e-12));

  CHECK_THROWS_AS(t_pct(w, link25(), c, IoOverhead{0.5}), DomainError);
}

TEST_CASE("io_overhead_theta") {
  CHECK(io_overhead_theta(0.0, 0.16).theta == 1.0);
  CHECK(io_overhead_theta(0.16, 0.16).theta == doctest::Approx(2.0));
  CHECK(io_overhead_theta(0.32, 0.16).theta == doctest::Approx(3.0));
  CHECK_THROWS_AS(io_overhead_theta(0.1, 0.0), DomainError);
  CHECK_THROWS_AS(io_overhead_theta(-0.1, 0.16), DomainError);
}

TEST_CASE("streaming speed score") {
  CHECK(sss(5.0, 0.16) == doctest::Approx(31.25).epsilon(1e-12));
  CHECK(sss(0.2, 0.16) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(sss(0.16, 0.16) == 1.0);
  CHECK_THROWS_AS(sss(0.0, 0.16), DomainError);
  CHECK_THROWS_AS(sss(1.0, -1.0), DomainError);
  CHECK(t_theoretical(0.5e9, k25Gbps) == doctest::Approx(0.16).epsilon(1e-12));
}

TEST_CASE("transfer budget and required remote rate") {
  CHECK(transfer_budget(10.0, 1.2) == doctest::Approx(8.8).epsilon(1e-12));
  CHECK(transfer_budget(10.0, 6.0) == 4.0);
  CHECK(transfer_budget(10.0, 0.0) == 10.0);
  CHECK(transfer_budget(1.0, 1.2) == 0.0);

  CHECK(required_remote_rate(WorkloadSpec::from_work(2e9, 34e12), 8.8) ==
        doctest::Approx(3863636363636.3636).epsilon(1e-12));
  CHECK(required_remote_rate(WorkloadSpec::from_work(3e9, 20e12), 4.0) ==
        doctest::Approx(5e12).epsilon(1e-12));
  CHECK(required_remote_rate(WorkloadSpec::from_work(3e9, 0.0), 4.0) == 0.0);
  CHECK_THROWS_AS(required_remote_rate(WorkloadSpec::from_work(3e9, 1.0), 0.0), DomainError);
}

TEST_CASE("tier classification uses strict deadlines") {
  const TierPolicy p;
  CHECK(classify_tier(9.99, p) == "Tier 2");
  CHECK(classify_tier(0.0, p) == "Tier 1");
  CHECK(classify_tier(1.0, p) == "Tier 2");
  CHECK(classify_tier(10.0, p) == "Tier 3");
  CHECK_FALSE(classify_tier(61.0, p).has_value());
  CHECK_THROWS_AS(TierPolicy(std::vector<Tier>{}), DomainError);
  CHECK_THROWS_AS(TierPolicy(std::vector<Tier>{{"a", 10.0}, {"b", 1.0}}), DomainError);
}

TEST_CASE("decide") {
  const TierPolicy p;
  SUBCASE("sustained rate above effective capacity is infeasible") {
    WorkloadSpec w = WorkloadSpec::from_work(4e9, 20e12);
    w.generation_interval = 1.0;
    auto d = decide(w, link25(), ComputeSpec{5e12, 50e12}, IoOverhead{1.0}, p);
    CHECK(d.choice == Choice::Infeasible);
    CHECK_FALSE(d.tier_achieved.has_value());
  }
  SUBCASE("feasibility uses alpha * bandwidth") {
    WorkloadSpec w = WorkloadSpec::from_work(3e9, 20e12);
    w.generation_interval = 1.0;
    CHECK(decide(w, link25(1.0), ComputeSpec{5e12, 50e12}, IoOverhead{1.0}, p).choice != Choice::Infeasible);
    CHECK(decide(w, link25(0.9), ComputeSpec{5e12, 50e12}, IoOverhead{1.0}, p).choice == Choice::Infeasible);
  }
  // t_transfer = 0.5 s, t_remote = 1.5 s, t_pct = 2 s exactly.
  const LinkSpec l{1e9, 1.0, 0.0};
  const auto w = WorkloadSpec::from_work(5e8, 3e12);
  SUBCASE("tie goes local") {
    auto d = decide(w, l, ComputeSpec{1.5e12, 2e12}, IoOverhead{1.0}, p);
    CHECK(d.t_local == 2.0);
    CHECK(d.remote.t_pct == 2.0);
    CHECK(d.choice == Choice::Local);
    CHECK(d.gain == 1.0);
  }
  SUBCASE("remote wins with gain 5") {
    auto d = decide(w, l, ComputeSpec{3e11, 2e12}, IoOverhead{1.0}, p);
    CHECK(d.choice == Choice::RemoteStream);
    CHECK(d.gain == doctest::Approx(5.0));
    CHECK(d.tier_achieved == "Tier 2");
  }
  SUBCASE("worst-case transfer replaces the modelled one") {
    auto d = decide(w, l, ComputeSpec{3e11, 2e12}, IoOverhead{2.0}, p, 8.5);
    CHECK(d.remote.t_transfer == 8.5);
    CHECK(d.remote.t_io == 8.5);
    CHECK(d.remote.t_pct == doctest::Approx(18.5));
    CHECK(d.choice == Choice::Local);
    CHECK(d.gain <= 1.0);
  }
}

TEST_CASE("delay decomposition and the propagation-only baseline") {
  CHECK(delay_total({1e-3, 2e-3, 3e-3, 4e-3}) == doctest::Approx(10e-3));
  CHECK(delay_total({}) == 0.0);
  CHECK(delay_total({0, 0, 0.16, 0.008}) == doctest::Approx(0.168));
  CHECK(continuum_delay({1e-3, 2e-3, 3e-3, 4e-3}) == 4e-3);
  CHECK(continuum_delay({1, 1, 1, 0}) == 0.0);
  const DelayDecomposition congested{0, 5.0, 0.16, 0.008};
  CHECK(continuum_delay(congested) == 0.008);
  CHECK(delay_total(congested) == doctest::Approx(5.168));
  CHECK(std::string(kOptimisticBaselineLabel) == "optimistic baseline");
}

TEST_CASE("file vs stream") {
  const LinkSpec l = link25();
  SUBCASE("1,440 small files with 1 s staging each") {
    ScanSpec s{12.6e9 / 1440.0, 1440, 0.033, 1440, 1.0};
    auto r = file_vs_stream(s, l);
    CHECK(r.t_stream == doctest::Approx(47.5228).epsilon(1e-9));
    CHECK(r.t_file == doctest::Approx(1491.552).epsilon(1e-9));
    CHECK(r.reduction == doctest::Approx(0.9681386904378795).epsilon(1e-9));
  }
  SUBCASE("pixel-exact 2048x2048x2 B frames") {
    ScanSpec s{2048.0 * 2048.0 * 2.0, 1440, 0.033, 1440, 1.0};
    auto r = file_vs_stream(s, l);
    CHECK(r.t_stream == doctest::Approx(47.52268435456).epsilon(1e-9));
    CHECK(r.t_file == doctest::Approx(1491.3854705664).epsilon(1e-9));
  }
  SUBCASE("overhead-free single file") {
    ScanSpec s{12.6e9 / 1440.0, 1440, 0.033, 1, 0.0};
    auto r = file_vs_stream(s, l);
    const double frame_wire = s.frame_bytes / l.effective_rate();
    const double wire = s.frame_bytes * s.frame_count / l.effective_rate();
    CHECK(r.t_stream <= r.t_file);
    CHECK(r.t_stream - r.t_file <= frame_wire);
    CHECK(r.t_file - r.t_stream == doctest::Approx(wire - frame_wire));
  }
  SUBCASE("link-bound single frame still never slower than a file") {
    ScanSpec s{1e9, 1, 1e-3, 1, 0.0};
    auto r = file_vs_stream(s, LinkSpec{1e9, 1.0, 0.0});
    CHECK(r.t_stream <= r.t_file);
  }
  CHECK_THROWS_AS(file_vs_stream(ScanSpec{1.0, 10, 1.0, 11, 0.0}, l), DomainError);
  CHECK_THROWS_AS(file_vs_stream(ScanSpec{1.0, 10, 1.0, 1, 0.0}, LinkSpec{0.0, 1.0, 0.0}), DomainError);
}

// ---- properties -------------------------------------------------------------

namespace {

struct Gen {
  std::mt19937_64 rng{0x5eed};
  double log_uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(rng));
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

}  // namespace

TEST_CASE("property: breakdown consistency and theta round trip") {
  Gen g;
  for (int i = 0; i < 2000; ++i) {
    const auto w = WorkloadSpec::from_work(g.log_uniform(1e3, 1e13), g.log_uniform(1e3, 1e18));
    const LinkSpec l{g.log_uniform(1e6, 1e12), g.uniform(0.01, 1.0), 0.0};
    const ComputeSpec c{g.log_uniform(1e9, 1e18), g.log_uniform(1e9, 1e18)};
    const IoOverhead io{1.0 + g.log_uniform(1e-6, 100.0)};
    const auto b = t_pct(w, l, c, io);
    REQUIRE(rel_close(b.t_pct, b.t_transfer + b.t_io + b.t_remote, 1e-9));
    const double t = g.log_uniform(1e-6, 1e6);
    REQUIRE(rel_close(io_overhead_theta((io.theta - 1.0) * t, t).theta, io.theta, 1e-12));
  }
}

TEST_CASE("property: t_pct monotone in every parameter") {
  Gen g;
  for (int i = 0; i < 1000; ++i) {
    const auto w = WorkloadSpec::from_work(g.log_uniform(1e6, 1e12), g.log_uniform(1e9, 1e16));
    const LinkSpec l{g.log_uniform(1e6, 1e11), g.uniform(0.05, 0.9), 0.0};
    const ComputeSpec c{1e12, g.log_uniform(1e10, 1e16)};
    const IoOverhead io{g.uniform(1.0, 5.0)};
    const double k = 1.0 + g.uniform(0.01, 0.5);
    const double base = t_pct(w, l, c, io).t_pct;

    auto with_link = [&](LinkSpec x) { return t_pct(w, x, c, io).t_pct; };
    REQUIRE(with_link({l.bandwidth, std::min(1.0, l.alpha * k), 0.0}) < base);
    REQUIRE(with_link({l.bandwidth * k, l.alpha, 0.0}) < base);
    REQUIRE(t_pct(w, l, ComputeSpec{c.local_rate, c.remote_rate * k}, io).t_pct < base);
    REQUIRE(t_pct(w, l, c, IoOverhead{io.theta * k}).t_pct > base);
    WorkloadSpec bigger = w;
    bigger.unit_size *= k;
    REQUIRE(t_pct(bigger, l, c, io).t_pct > base);
    WorkloadSpec harder = w;
    harder.complexity *= k;
    REQUIRE(t_pct(harder, l, c, io).t_pct > base);
  }
}

TEST_CASE("property: sss bounds and scale invariance") {
  Gen g;
  for (int i = 0; i < 1000; ++i) {
    const double ideal = g.log_uniform(1e-4, 10.0);
    const double worst = ideal * (1.0 + g.log_uniform(1e-9, 100.0));
    REQUIRE(sss(worst, ideal) >= 1.0);
    const double k = g.log_uniform(1e-3, 1e3);
    REQUIRE(rel_close(sss(k * worst, k * ideal), sss(worst, ideal), 1e-12));
  }
}

TEST_CASE("property: decision invariant under common rescaling of compute") {
  Gen g;
  const TierPolicy p;
  for (int i = 0; i < 1000; ++i) {
    const auto w = WorkloadSpec::from_work(g.log_uniform(1e6, 1e11), g.log_uniform(1e9, 1e15));
    const LinkSpec l{g.log_uniform(1e8, 1e11), g.uniform(0.1, 1.0), 0.0};
    const ComputeSpec c{g.log_uniform(1e10, 1e14), g.log_uniform(1e10, 1e15)};
    const auto d = decide(w, l, c, IoOverhead{g.uniform(1.0, 3.0)}, p);
    // Scaling both times by k: slow the link and both computers by k.
    const double k = g.log_uniform(1e-2, 1e2);
    const LinkSpec lk{l.bandwidth / k, l.alpha, 0.0};
    const ComputeSpec ck{c.local_rate / k, c.remote_rate / k};
    const auto dk = decide(w, lk, ck, IoOverhead{d.remote.t_pct > 0 ? (d.remote.t_pct - d.remote.t_remote) / d.remote.t_transfer : 1.0}, p);
    REQUIRE(rel_close(dk.t_local, k * d.t_local, 1e-9));
    REQUIRE(rel_close(dk.remote.t_pct, k * d.remote.t_pct, 1e-9));
    if (!rel_close(d.t_local, d.remote.t_pct, 1e-9)) REQUIRE(dk.choice == d.choice);
    REQUIRE(rel_close(dk.gain, d.gain, 1e-9));
    if (d.choice == Choice::Local) REQUIRE(d.gain <= 1.0);
  }
}

TEST_CASE("property: tiers monotone, continuum lower-bounds total") {
  Gen g;
  const TierPolicy p;
  auto rank = [&](double t) {
    auto name = classify_tier(t, p);
    for (std::size_t i = 0; i < p.tiers().size(); ++i) {
      if (name && p.tiers()[i].name == *name) return static_cast<int>(i);
    }
    return static_cast<int>(p.tiers().size());
  };
  for (int i = 0; i < 1000; ++i) {
    double a = g.uniform(0.0, 100.0), b = g.uniform(0.0, 100.0);
    if (a > b) std::swap(a, b);
    REQUIRE(rank(a) <= rank(b));
    const DelayDecomposition d{g.uniform(0, 1), g.uniform(0, 10), g.uniform(0, 1), g.uniform(0, 0.1)};
    REQUIRE(continuum_delay(d) <= delay_total(d));
  }
}

TEST_CASE("property: file-vs-stream reduction non-decreasing in files and overhead") {
  Gen g;
  for (int i = 0; i < 500; ++i) {
    const double frames = std::floor(g.uniform(2, 5000));
    ScanSpec s{g.log_uniform(1e3, 1e8), frames, g.log_uniform(1e-4, 1.0), 1.0, g.uniform(0.0, 2.0)};
    const LinkSpec l{g.log_uniform(1e7, 1e11), g.uniform(0.1, 1.0), 0.0};
    const auto a = file_vs_stream(s, l);
    REQUIRE(a.reduction < 1.0);
    ScanSpec more = s;
    more.files = std::floor(g.uniform(1.0, frames));
    REQUIRE(file_vs_stream(more, l).reduction >= a.reduction);
    ScanSpec costlier = s;
    costlier.per_file_overhead += g.uniform(0.0, 1.0);
    REQUIRE(file_vs_stream(costlier, l).reduction >= a.reduction);
    ScanSpec bare = s;
    bare.files = 1;
    bare.per_file_overhead = 0;
    const auto r = file_vs_stream(bare, l);
    REQUIRE(r.t_stream <= r.t_file * (1.0 + 1e-12));
  }
}
