#include "doctest.h"

#include "lradapt/metrics.hpp"
#include "test_support.hpp"

using namespace lradapt;
using lradapt::test::random_vector;

TEST_SUITE("metrics") {

TEST_CASE("make_metric starts from zero accumulators") {
    auto sgd = make_metric(MetricKind::SGD, 3);
    CHECK(sgd.step_count == 0);
    CHECK(sgd.diag_accum.size() == 0);
    CHECK(sgd.momentum_buf.size() == 0);
    CHECK(validate(sgd).empty());

    MetricHyper h;
    h.epsilon = 1e-10;
    auto adagrad = make_metric(MetricKind::Adagrad, 2, h);
    CHECK(adagrad.diag_accum == Vector::Zero(2));

    h.beta1 = 0.5;
    h.beta2 = 0.999;
    auto adam = make_metric(MetricKind::Adam, 2, h);
    CHECK(adam.diag_accum == Vector::Zero(2));
    CHECK(adam.momentum_buf == Vector::Zero(2));

    MetricHyper bad;
    bad.beta = 1.0;
    CHECK_THROWS_AS(make_metric(MetricKind::Momentum, 2, bad), Error);
    CHECK_THROWS_AS(make_metric(MetricKind::SGD, 0), Error);
}

TEST_CASE("direction worked examples") {
    SUBCASE("sgd is the identity") {
        auto s = make_metric(MetricKind::SGD, 2);
        CHECK(direction(s, Vector{{3.0, -4.0}}) == Vector{{3.0, -4.0}});
    }
    SUBCASE("adagrad first step is the sign of g") {
        auto s = make_metric(MetricKind::Adagrad, 2);
        const Vector u = direction(s, Vector{{3.0, 4.0}});
        // G_1 = g², so u = g/|g| up to the 1e-10 guard.
        CHECK(u(0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(u(1) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("momentum accumulates") {
        MetricHyper h;
        h.beta = 0.9;
        auto s = make_metric(MetricKind::Momentum, 2, h);
        s.momentum_buf = Vector{{1.0, 0.0}};
        const Vector u = direction(s, Vector{{0.0, 1.0}});
        CHECK(u(0) == doctest::Approx(0.9));
        CHECK(u(1) == doctest::Approx(1.0));
    }
    SUBCASE("adam first step is the sign of g") {
        MetricHyper h;
        h.beta1 = 0.7;
        auto s = make_metric(MetricKind::Adam, 3, h);
        const Vector u = direction(s, Vector{{2.0, -0.5, 0.1}});
        CHECK(u(0) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(u(1) == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(u(2) == doctest::Approx(1.0).epsilon(1e-5));
    }
    SUBCASE("rmsprop first step") {
        MetricHyper h;
        h.alpha = 0.99;
        auto s = make_metric(MetricKind::RMSprop, 1, h);
        const Vector u = direction(s, Vector{{2.0}});
        // G_1 = 0.01·4, u = 2/sqrt(0.04) = 10
        CHECK(u(0) == doctest::Approx(10.0).epsilon(1e-8));
    }
}

TEST_CASE("direction errors and step counting") {
    auto s = make_metric(MetricKind::Adam, 2);
    CHECK_THROWS_AS(direction(s, Vector::Ones(3)), Error);
    Vector bad = Vector::Ones(2);
    bad(0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(direction(s, bad), Error);
    CHECK(s.step_count == 0);
    for (int i = 1; i <= 5; ++i) {
        direction(s, Vector::Ones(2));
        CHECK(s.step_count == i);
    }
}

TEST_CASE("pd_violation examples") {
    CHECK_FALSE(pd_violation(Vector::Zero(2), Vector{{5.0, -1.0}}, 0.9));
    CHECK(pd_violation(Vector{{-10.0, 0.0}}, Vector{{1.0, 0.0}}, 0.9));
    CHECK_FALSE(pd_violation(Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}, 0.9));
}

TEST_CASE("pd_violation on state means g^T W g < 0") {
    Rng rng(5);
    for (auto kind : {MetricKind::Momentum, MetricKind::Adam}) {
        MetricHyper h;
        h.beta = 0.9;
        h.beta1 = 0.9;
        for (int trial = 0; trial < 300; ++trial) {
            auto s = make_metric(kind, 4, h);
            for (int k = 0; k < 3; ++k) direction(s, random_vector(rng, 4));
            const Vector g = random_vector(rng, 4);
            const bool flagged = pd_violation(s, g);
            const double gwg = g.dot(direction(s, g));
            CHECK(flagged == (gwg < 0.0));
        }
    }
    auto sgd = make_metric(MetricKind::SGD, 2);
    CHECK_FALSE(pd_violation(sgd, Vector{{1.0, 2.0}}));
}

TEST_CASE("momentum rank-1 identity") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + static_cast<Eigen::Index>(rng.below(10));
        const Vector m = random_vector(rng, n);
        const Vector g = random_vector(rng, n);
        const double beta = rng.uniform();
        const double inner = m.dot(g);
        if (std::abs(inner) < 1e-3) continue;
        const Matrix w = Matrix::Identity(n, n) + (beta / inner) * m * m.transpose();
        const Vector explicit_form = w * g;
        const Vector closed = beta * m + g;
        CHECK(test::rel_err(explicit_form, closed) < 1e-12);

        MetricHyper h;
        h.beta = beta;
        auto s = make_metric(MetricKind::Momentum, n, h);
        s.momentum_buf = m;
        CHECK(test::rel_err(direction(s, g), closed) < 1e-15);
    }
}

TEST_CASE("adam rank-1 identity matches the direction") {
    Rng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(10));
        MetricHyper h;
        h.beta1 = 0.9 * rng.uniform();
        auto s = make_metric(MetricKind::Adam, n, h);
        const int warmup = static_cast<int>(rng.below(5));
        for (int k = 0; k < warmup; ++k) direction(s, random_vector(rng, n));
        const Vector m_prev = s.momentum_buf;
        const Vector g = random_vector(rng, n);

        // V_i from the definition, built independently of the module.
        const double i = static_cast<double>(s.step_count + 1);
        const Vector second = h.beta2 * s.diag_accum.array() + (1 - h.beta2) * g.array().square();
        const double gamma = std::sqrt(1 - std::pow(h.beta2, i)) / (1 - std::pow(h.beta1, i));
        const Matrix v = (gamma * (second.array() + h.epsilon).rsqrt()).matrix().asDiagonal();

        const Vector closed = v * (h.beta1 * m_prev + (1 - h.beta1) * g);
        const double inner = (v * m_prev).dot(g);
        if (std::abs(inner) > 1e-3) {
            const Matrix w = (1 - h.beta1) * v + (h.beta1 / inner) * v * m_prev * m_prev.transpose() * v;
            CHECK(test::rel_err(w * g, closed) < 1e-12);
        }
        CHECK(test::rel_err(direction(s, g), closed) < 1e-13);
    }
}

TEST_CASE("diagonal metrics give descent directions") {
    Rng rng(23);
    for (auto kind : {MetricKind::SGD, MetricKind::Adagrad, MetricKind::RMSprop}) {
        auto s = make_metric(kind, 6);
        for (int k = 0; k < 200; ++k) {
            const Vector g = random_vector(rng, 6, std::exp(3 * rng.normal()));
            CHECK(g.dot(direction(s, g)) > 0.0);
        }
        CHECK(direction(s, Vector::Zero(6)).dot(Vector::Zero(6)) >= 0.0);
    }
}

TEST_CASE("adagrad accumulator is nondecreasing") {
    Rng rng(29);
    auto s = make_metric(MetricKind::Adagrad, 5);
    Vector prev = s.diag_accum;
    for (int k = 0; k < 300; ++k) {
        direction(s, random_vector(rng, 5));
        CHECK((s.diag_accum.array() >= prev.array()).all());
        CHECK(validate(s).empty());
        prev = s.diag_accum;
    }
}

TEST_CASE("metric states are deterministic") {
    for (auto kind : {MetricKind::SGD, MetricKind::Adagrad, MetricKind::RMSprop, MetricKind::Momentum, MetricKind::Adam}) {
        Rng rng(31);
        auto a = make_metric(kind, 3);
        auto b = make_metric(kind, 3);
        for (int k = 0; k < 100; ++k) {
            const Vector g = random_vector(rng, 3);
            CHECK(direction(a, g) == direction(b, g));
        }
    }
}

}  // TEST_SUITE
