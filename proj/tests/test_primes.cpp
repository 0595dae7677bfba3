#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "zeta_chaos/primes.hpp"
#include "zeta_chaos/rng.hpp"

using namespace zeta_chaos;

namespace {

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace

TEST_CASE("prime table basics") {
    const auto t1 = build_prime_table(1);
    REQUIRE(t1.count() == 1);
    CHECK(t1.p(1) == 2);

    const auto t = build_prime_table(25);
    CHECK(t.p(25) == 97);
    for (std::size_t j = 1; j <= 25; ++j) CHECK(is_prime_u64(t.p(j)));
    for (std::size_t j = 2; j <= 25; ++j) CHECK(t.p(j) > t.p(j - 1));
    for (std::size_t j = 1; j <= 25; ++j)
        CHECK(std::abs(t.log_p[j - 1] - std::log((double)t.p(j))) <
              1e-14 * std::abs(t.log_p[j - 1]));
}

TEST_CASE("prefix sums monotone and exact") {
    const auto t = build_prime_table(10);
    // 9920878441 / 6469693230 by exact rational summation
    CHECK(t.sum_inv_p(10) == Catch::Approx(1.533438771872032).margin(1e-14));
    for (std::size_t j = 1; j <= 10; ++j) CHECK(t.inv_p_prefix[j] > t.inv_p_prefix[j - 1]);
    CHECK_THROWS_AS(build_prime_table(0), std::invalid_argument);
    CHECK_THROWS_AS(build_prime_table(1000000000000ull, 1 << 20), std::length_error);
}

TEST_CASE("li and li_inverse") {
    CHECK(li(2.0) == 0.0);
    CHECK(li(10.0) == Catch::Approx(5.1204357246698052).margin(1e-9));
    CHECK(li(100.0) == Catch::Approx(29.080977803962137).margin(1e-9));
    CHECK_THROWS_AS(li(1.5), std::domain_error);
    CHECK_THROWS_AS(li_inverse(-1.0), std::domain_error);
    CHECK(li_inverse(0.0) == 2.0);
    CHECK(li_inverse(1.0) == Catch::Approx(2.8724679445087733).margin(1e-7));

    // inverse round trips
    for (double y : {1.0, 10.0, 1e4}) CHECK(li(li_inverse(y)) == Catch::Approx(y).margin(1e-8));
    CHECK(li_inverse(li(100.0)) == Catch::Approx(100.0).margin(1e-7));

    // monotonicity of li
    double prev = 0;
    for (double x = 2.5; x < 50; x += 3.1) {
        const double v = li(x);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("li round trip property on random points") {
    for (int i = 0; i < 40; ++i) {
        const double y = std::pow(10.0, 8.0 * uniform01(42, 7, (std::uint64_t)i));
        CHECK(li(li_inverse(y)) == Catch::Approx(y).margin(1e-8 * std::max(1.0, y * 1e-6)));
    }
}

TEST_CASE("millionth prime vs li_inverse") {
    const auto t = build_prime_table(1000000);
    REQUIRE(t.p(1000000) == 15485863);
    const double approx = li_inverse(1e6);
    CHECK(std::abs(approx - 15485863.0) / 15485863.0 < 0.02);
    CHECK(approx == Catch::Approx(15479083.676435125).margin(0.01));

    // p_n / (n log n) -> 1
    for (std::size_t n : {std::size_t{10000}, std::size_t{100000}, std::size_t{1000000}}) {
        const double ratio = (double)t.p(n) / ((double)n * std::log((double)n));
        CHECK(ratio > 0.8);
        CHECK(ratio < 1.2);
    }
}

TEST_CASE("pnt error profile bounded with stable constant") {
    const auto t = build_prime_table(1000000);
    std::vector<std::size_t> idx;
    for (int i = 0; i < 20; ++i)
        idx.push_back((std::size_t)std::llround(std::pow(10.0, 3.0 + 3.0 * i / 19.0)));
    const auto profile = pnt_error_profile(t, idx);
    REQUIRE(profile.size() == 20);
    double mx = 0, mn = 1e300;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        CHECK(profile[i].first == idx[i]);  // ordering preserved
        mx = std::max(mx, profile[i].second);
        mn = std::min(mn, profile[i].second);
    }
    CHECK(mx < 10.0);       // a single measured constant bounds all of them
    CHECK(mx / mn < 10.0);  // stable across decades

    // n=1 is well-defined (exp(-sqrt(log 1)) = 1)
    const auto one = pnt_error_profile(t, {1});
    CHECK(std::isfinite(one[0].second));
    CHECK_THROWS_AS(pnt_error_profile(t, {0}), std::out_of_range);
}

TEST_CASE("prime cache round trip") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "zc_cache_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    setenv("ZETA_CHAOS_CACHE", dir.c_str(), 1);
    const auto a = build_prime_table(1000);
    CHECK(fs::exists(dir / "primes_1000.bin"));
    const auto b = build_prime_table(1000);  // served from cache
    CHECK(a.primes == b.primes);
    unsetenv("ZETA_CHAOS_CACHE");
    fs::remove_all(dir);
}
