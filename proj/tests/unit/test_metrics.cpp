#include "doctest.h"
#include "freshcache/metrics.hpp"
#include "freshcache/rng.hpp"
#include "freshcache/timer_policy.hpp"

using namespace freshcache;

TEST_CASE("pct_increase_vs_optimal: measured cost in the denominator") {
    CHECK(pct_increase_vs_optimal(10.0, 9.0) == doctest::Approx(10.0));
    CHECK(pct_increase_vs_optimal(10.0, 10.0) == 0.0);
    CHECK(pct_increase_vs_optimal(9.0, 10.0) == doctest::Approx(-11.11).epsilon(1e-3));
    CHECK_THROWS_AS(pct_increase_vs_optimal(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("pct_increase_mf_vs_mb: positive favors the model-based policy") {
    CHECK(pct_increase_mf_vs_mb(15.0, 10.0) == doctest::Approx(50.0));
    CHECK(pct_increase_mf_vs_mb(10.0, 10.0) == 0.0);
    CHECK(pct_increase_mf_vs_mb(5.0, 10.0) == doctest::Approx(-50.0));
    CHECK_THROWS_AS(pct_increase_mf_vs_mb(5.0, 0.0), std::invalid_argument);
}

TEST_CASE("percentage metrics are invariant to joint cost scaling") {
    RngStream r(88, 0, RngStream::kGeneric);
    for (int i = 0; i < 50; ++i) {
        ItemCatalog c;
        c.n_items = 3;
        double sum = 0.0;
        for (int n = 0; n < 3; ++n) {
            c.sizes.push_back(0.5 + 5.0 * r.uniform01());
            c.popularity.push_back(0.1 + r.uniform01());
            sum += c.popularity.back();
            c.refresh_rates.push_back(1.0 + 30.0 * r.uniform01());
        }
        for (auto& p : c.popularity) {
            p /= sum;
        }
        const double beta = 1.0 + 8.0 * r.uniform01();
        const double cf = 0.5 + 2.0 * r.uniform01();
        const double ca = 0.05 + 0.5 * r.uniform01();
        const double k = 0.1 + 10.0 * r.uniform01();

        // timers depend on cf/ca only, so joint scaling leaves them unchanged
        const auto p1 = solve_alpha(c, beta, cf, ca, CapacityConstraint::make_unlimited());
        const auto p2 = solve_alpha(c, beta, k * cf, k * ca, CapacityConstraint::make_unlimited());
        for (std::size_t n = 0; n < 3; ++n) {
            CHECK(p1.timers[n] == doctest::Approx(p2.timers[n]).epsilon(1e-12));
        }
        const double star1 = optimal_cost_unlimited(c, beta, cf, ca);
        const double star2 = optimal_cost_unlimited(c, beta, k * cf, k * ca);
        const double measured1 = 1.07 * p1.analytic_cost;  // any fixed decision outcome
        const double measured2 = k * measured1;
        CHECK(pct_increase_vs_optimal(measured1, star1) ==
              doctest::Approx(pct_increase_vs_optimal(measured2, star2)).epsilon(1e-9));
        CHECK(pct_increase_mf_vs_mb(measured1, p1.analytic_cost) ==
              doctest::Approx(pct_increase_mf_vs_mb(measured2, p2.analytic_cost)).epsilon(1e-9));
    }
}

TEST_CASE("csv schema: exact header, sorted rows, empty inapplicable cells") {
    std::vector<CsvRow> rows;
    {
        CsvRow r;
        r.param = 0.5;
        r.policy = "swiftcache";
        r.seed = 2;
        r.avg_cost_rate = 1.25;
        rows.push_back(r);
    }
    {
        CsvRow r;
        r.param = 0.5;
        r.policy = "swiftcache";  // summary row, no seed
        r.avg_cost_rate = 1.5;
        r.std_error = 0.25;
        rows.push_back(r);
    }
    {
        CsvRow r;
        r.param = 0.5;
        r.policy = "qlearning";
        r.seed = 1;
        r.avg_cost_rate = 2.0;
        r.pct_mf_vs_mb = -12.5;
        rows.push_back(r);
    }
    {
        CsvRow r;
        r.param = 0.1;
        r.policy = "swiftcache";
        r.seed = 9;
        r.avg_cost_rate = 3.0;
        rows.push_back(r);
    }
    const std::string csv = to_csv(rows);
    const std::string expected =
        "param,policy,seed,avg_cost_rate,occupancy,pct_vs_optimal,pct_mf_vs_mb,stderr\n"
        "0.1,swiftcache,9,3,,,,\n"
        "0.5,qlearning,1,2,,,-12.5,\n"
        "0.5,swiftcache,2,1.25,,,,\n"
        "0.5,swiftcache,,1.5,,,,0.25\n";
    CHECK(csv == expected);
}
