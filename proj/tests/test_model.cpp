#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "uiobs/model.hpp"

using namespace uiobs;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("LtiSystem validation") {
    auto sys = fixtures::aircraft();
    CHECK_NOTHROW(sys.validate());

    auto bad = sys;
    bad.bounds(0) = 0.0;
    CHECK_THROWS_AS(bad.validate(), DimensionError);

    bad = sys;
    bad.D.setZero();  // rank D < m
    CHECK_THROWS_AS(bad.validate(), DimensionError);

    bad = sys;
    bad.C.row(1) = bad.C.row(0);  // rank C < p
    CHECK_THROWS_AS(bad.validate(), DimensionError);
}

TEST_CASE("rosenbrock scalar and structure") {
    LtiSystem sys;
    sys.A = MatrixXd::Zero(1, 1);
    sys.B = MatrixXd::Zero(1, 0);
    sys.D = MatrixXd::Ones(1, 1);
    sys.C = MatrixXd::Ones(1, 1);
    sys.bounds = VectorXd::Ones(1);

    const Eigen::MatrixXcd P = rosenbrock(sys, 2.0);
    CHECK(P(0, 0).real() == doctest::Approx(2));
    CHECK(P(0, 1).real() == doctest::Approx(-1));
    CHECK(P(1, 0).real() == doctest::Approx(1));
    CHECK(P(1, 1).real() == doctest::Approx(0));
}

TEST_CASE("aircraft: strongly observable, matching fails, CD = 0") {
    const auto sys = fixtures::aircraft();
    CHECK(numerical_rank(sys.C * sys.D) == 0);
    CHECK(numerical_rank(rosenbrock(sys, 0.0)) == 8);
    CHECK(static_cast<bool>(is_strongly_observable(sys)));
    CHECK_FALSE(check_observer_matching(sys));
}

TEST_CASE("unobservable pair detected") {
    LtiSystem sys;
    sys.A = MatrixXd{{0, 1}, {0, 0}};
    sys.B = MatrixXd::Zero(2, 0);
    sys.D = MatrixXd::Zero(2, 0);
    sys.C = MatrixXd{{0, 1}};
    sys.bounds = VectorXd::Zero(0);
    const auto res = is_strongly_observable(sys);
    CHECK_FALSE(static_cast<bool>(res));
    CHECK(res.witness.has_value());
}

TEST_CASE("m > p rejected") {
    LtiSystem sys;
    sys.A = MatrixXd::Identity(2, 2);
    sys.B = MatrixXd::Zero(2, 0);
    sys.D = MatrixXd::Identity(2, 2);
    sys.C = MatrixXd{{1, 0}};
    sys.bounds = VectorXd::Ones(2);
    CHECK_THROWS_AS(is_strongly_observable(sys), DimensionError);
}

TEST_CASE("matching condition holds when D visible through C") {
    LtiSystem sys;
    sys.A = MatrixXd::Zero(1, 1);
    sys.B = MatrixXd::Zero(1, 0);
    sys.D = MatrixXd::Ones(1, 1);
    sys.C = MatrixXd::Ones(1, 1);
    sys.bounds = VectorXd::Ones(1);
    CHECK(check_observer_matching(sys));
}

TEST_CASE("strong observability invariant under transforms") {
    std::mt19937 rng(21);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = fixtures::random_strongly_observable(rng);
        MatrixXd S;
        do {
            S = MatrixXd::NullaryExpr(inst.sys.n(), inst.sys.n(), [&] { return g(rng); });
        } while (condition_estimate(S) > 1e4);
        LtiSystem tf = inst.sys;
        tf.A = S * inst.sys.A * S.inverse();
        tf.D = S * inst.sys.D;
        tf.C = inst.sys.C * S.inverse();
        CHECK(static_cast<bool>(is_strongly_observable(tf)));
    }
}

TEST_CASE("feedthrough elimination: F = 0 passthrough") {
    auto sys = fixtures::aircraft();
    sys.F = MatrixXd::Zero(2, 1);
    const auto red = eliminate_feedthrough(sys);
    CHECK(red.m_F == 0);
    CHECK(red.U.isIdentity(1e-14));
    CHECK(red.V.isIdentity(1e-14));
    CHECK((red.reduced.A - sys.A).norm() < 1e-14);
    CHECK_FALSE(red.reduced.F.has_value());
}

TEST_CASE("feedthrough elimination: block form and preserved strong observability") {
    std::mt19937 rng(33);
    std::normal_distribution<double> g;
    int done = 0;
    while (done < 10) {
        auto inst = fixtures::random_strongly_observable(rng, 6, 3, 2);
        const int m = inst.sys.m(), p = inst.sys.p();
        if (m < 1 || p < 2) continue;
        // rank-1 feedthrough keeps m_F < p
        Eigen::VectorXd u = Eigen::VectorXd::NullaryExpr(p, [&] { return g(rng); });
        Eigen::RowVectorXd v = Eigen::RowVectorXd::NullaryExpr(m, [&] { return g(rng); });
        auto sys = inst.sys;
        sys.F = u * v;

        const auto red = eliminate_feedthrough(sys);
        CHECK(red.m_F == 1);
        MatrixXd blk = red.U * (*sys.F) * red.V;
        MatrixXd want = MatrixXd::Zero(p, m);
        for (int i = 0; i < red.m_F; ++i) want(i, i) = 1.0;
        CHECK((blk - want).cwiseAbs().maxCoeff() < 1e-10);

        // rank n + m - m_F at probe points per the reduction rank identity
        const int n = sys.n();
        for (int k = 0; k < 20; ++k) {
            const std::complex<double> s(g(rng), g(rng));
            CHECK(numerical_rank(rosenbrock(red.reduced, s)) == n + m - red.m_F);
        }
        ++done;
    }
}

TEST_CASE("feedthrough elimination rejects rank F = p") {
    LtiSystem sys;
    sys.A = MatrixXd::Zero(1, 1);
    sys.B = MatrixXd::Zero(1, 0);
    sys.D = MatrixXd::Ones(1, 1);
    sys.C = MatrixXd::Ones(1, 1);
    sys.F = MatrixXd::Constant(1, 1, 2.0);
    sys.bounds = VectorXd::Ones(1);
    CHECK_THROWS_AS(eliminate_feedthrough(sys), UnsupportedError);
}
