#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dataset.hpp"
#include "indices.hpp"
#include "linalg.hpp"
#include "rng.hpp"

using namespace pursuit;
using indices::IndexKind;

namespace {

const IndexKind kPointwise[] = {IndexKind::Relu2, IndexKind::Kurtosis, IndexKind::Abs,
                                IndexKind::AbsMax, IndexKind::Skewness};
const IndexKind kAll[] = {IndexKind::Relu2,    IndexKind::Kurtosis, IndexKind::Abs,
                          IndexKind::AbsMax,   IndexKind::Skewness, IndexKind::ApproxEntropy};

Dataset random_dataset(std::size_t n, std::size_t d, Rng& rng) {
    Dataset data(n, d);
    for (auto& v : data.mutable_values()) v = rng.normal();
    return data;
}

std::vector<double> random_unit(std::size_t d, Rng& rng) {
    std::vector<double> u(d);
    for (auto& x : u) x = rng.normal();
    la::normalize(u.data(), d);
    return u;
}

}  // namespace

TEST_CASE("pointwise values") {
    CHECK(indices::phi_value(IndexKind::Relu2, -2.0) == 0.0);
    CHECK(indices::phi_value(IndexKind::Relu2, 3.0) == 9.0);
    CHECK(indices::phi_value(IndexKind::Kurtosis, -2.0) == 16.0);
    CHECK(indices::phi_value(IndexKind::Abs, -3.0) == -3.0);
    CHECK(indices::phi_value(IndexKind::AbsMax, -3.0) == 3.0);
    CHECK(indices::phi_value(IndexKind::Skewness, -2.0) == -8.0);
    CHECK_THROWS_AS(indices::phi_value(IndexKind::ApproxEntropy, 1.0), std::invalid_argument);
}

TEST_CASE("pointwise derivatives and kink convention") {
    CHECK(indices::phi_deriv(IndexKind::Relu2, 0.0) == 0.0);
    CHECK(indices::phi_deriv(IndexKind::Relu2, 2.0) == 4.0);
    CHECK(indices::phi_deriv(IndexKind::Kurtosis, 2.0) == 32.0);
    CHECK(indices::phi_deriv(IndexKind::Abs, 0.0) == 0.0);
    CHECK(indices::phi_deriv(IndexKind::Abs, 2.0) == -1.0);
    CHECK(indices::phi_deriv(IndexKind::AbsMax, 0.0) == 0.0);
    CHECK(indices::phi_deriv(IndexKind::AbsMax, -2.0) == -1.0);
    CHECK(indices::phi_deriv(IndexKind::Skewness, -2.0) == 12.0);
    CHECK_THROWS_AS(indices::phi_deriv(IndexKind::ApproxEntropy, 1.0), std::invalid_argument);
}

TEST_CASE("pointwise derivative matches central differences") {
    const double h = 1e-5;
    for (auto kind : kPointwise) {
        for (double x : {-1.3, 0.7, 2.2}) {
            const double fd = (indices::phi_value(kind, x + h) - indices::phi_value(kind, x - h)) /
                              (2.0 * h);
            CHECK(std::abs(fd - indices::phi_deriv(kind, x)) <= 1e-6);
        }
    }
}

TEST_CASE("default pairing") {
    const auto kp = indices::default_pair(IndexKind::Kurtosis);
    CHECK(kp.phi == IndexKind::Kurtosis);
    CHECK(kp.psi == IndexKind::Abs);
    const auto rp = indices::default_pair(IndexKind::Relu2);
    CHECK(rp.phi == IndexKind::Relu2);
    CHECK(rp.psi == IndexKind::Relu2);
}

TEST_CASE("tag names round trip") {
    for (auto kind : kAll) {
        const auto parsed = indices::parse(indices::name(kind));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == kind);
    }
    CHECK_FALSE(indices::parse("nonsense").has_value());
}

TEST_CASE("dataset scores") {
    SUBCASE("single relu2 term") {
        Dataset data(1, 2);
        data.mutable_row(0)[0] = 2.0;
        CHECK(indices::dataset_score(data, {1.0, 0.0}, IndexKind::Relu2) == 4.0);
    }
    SUBCASE("approxentropy vanishes at gaussian moments") {
        // Symmetric projections {1, -1, c, -c} with (1 + c^4)/2 = 3 give
        // m3 = 0 and m4 = 3 exactly.
        const double c = std::pow(5.0, 0.25);
        const double proj[4] = {1.0, -1.0, c, -c};
        CHECK(indices::projection_score(proj, 4, IndexKind::ApproxEntropy) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("relu2 under pure gaussian concentrates at 0.5") {
        Rng rng(5);
        auto data = random_dataset(100000, 3, rng);
        const auto u = random_unit(3, rng);
        CHECK(std::abs(indices::dataset_score(data, u, IndexKind::Relu2) - 0.5) < 0.02);
    }
    SUBCASE("empty dataset rejected") {
        Dataset data(0, 2);
        CHECK_THROWS_AS(indices::dataset_score(data, {1.0, 0.0}, IndexKind::Relu2),
                        std::invalid_argument);
    }
}

TEST_CASE("gradient closed forms") {
    SUBCASE("kurtosis single sample with unit projection") {
        Dataset data(1, 3);
        data.mutable_row(0)[0] = 1.0;
        data.mutable_row(0)[1] = 2.0;
        const auto g = indices::dataset_score_gradient(data, {1.0, 0.0, 0.0},
                                                       IndexKind::Kurtosis);
        CHECK(g[0] == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(g[1] == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(g[2] == 0.0);
    }
    SUBCASE("abs at the kink contributes zero") {
        Dataset data(1, 2);
        data.mutable_row(0)[1] = 5.0;  // orthogonal to u
        const auto g = indices::dataset_score_gradient(data, {1.0, 0.0}, IndexKind::Abs);
        CHECK(g[0] == 0.0);
        CHECK(g[1] == 0.0);
    }
}

TEST_CASE("gradients match central differences on 100 instances per index") {
    Rng rng(9);
    const double h = 1e-5;
    for (auto kind : kAll) {
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 8, d = 4;
            auto data = random_dataset(n, d, rng);
            auto u = random_unit(d, rng);

            // Keep projections away from the kinks of |.| and max{0,.}.
            bool near_kink = false;
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(la::dot(data.row(i).data(), u.data(), d)) < 1e-4) near_kink = true;
            if (near_kink) continue;

            const auto g = indices::dataset_score_gradient(data, u, kind);
            double max_rel = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                auto up = u, um = u;
                up[j] += h;
                um[j] -= h;
                const double fd = (indices::dataset_score(data, up, kind) -
                                   indices::dataset_score(data, um, kind)) /
                                  (2.0 * h);
                const double scale = std::max({1.0, std::abs(g[j]), std::abs(fd)});
                max_rel = std::max(max_rel, std::abs(fd - g[j]) / scale);
            }
            CHECK(max_rel <= 1e-5);
        }
    }
}

TEST_CASE("evenness under sign flip") {
    Rng rng(15);
    auto data = random_dataset(30, 4, rng);
    auto u = random_unit(4, rng);
    auto nu = u;
    for (auto& x : nu) x = -x;
    for (auto kind : {IndexKind::Kurtosis, IndexKind::Abs, IndexKind::AbsMax,
                      IndexKind::ApproxEntropy})
        CHECK(indices::dataset_score(data, u, kind) == indices::dataset_score(data, nu, kind));
    // Odd/one-sided indices admit counterexamples.
    CHECK(indices::dataset_score(data, u, IndexKind::Skewness) !=
          indices::dataset_score(data, nu, IndexKind::Skewness));
    CHECK(indices::dataset_score(data, u, IndexKind::Relu2) !=
          indices::dataset_score(data, nu, IndexKind::Relu2));
}

TEST_CASE("scale covariance") {
    Rng rng(21);
    auto data = random_dataset(40, 3, rng);
    auto u = random_unit(3, rng);
    Dataset scaled = data.slice(0, data.rows());
    const double c = 1.7;
    for (auto& v : scaled.mutable_values()) v *= c;
    CHECK(indices::dataset_score(scaled, u, IndexKind::Relu2) ==
          doctest::Approx(c * c * indices::dataset_score(data, u, IndexKind::Relu2))
              .epsilon(1e-12));
    CHECK(indices::dataset_score(scaled, u, IndexKind::Kurtosis) ==
          doctest::Approx(c * c * c * c * indices::dataset_score(data, u, IndexKind::Kurtosis))
              .epsilon(1e-12));
}
