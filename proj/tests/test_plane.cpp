#include <cmath>

#include <gtest/gtest.h>

#include "cycloid/plane.hpp"

using namespace cycloid;

namespace {

PlaneModel lp(double p) { return {LpBall{p}, ""}; }
PlaneModel euclid() { return {Euclidean{}, ""}; }
PlaneModel ellipse(double a, double b) { return {Ellipse{a, b}, ""}; }
PlaneModel fourier(std::vector<FourierTerm> terms, double a0 = 1.0) { return {FourierSupport{a0, std::move(terms)}, ""}; }

// Fourth-order central difference of a vector-valued function.
template <class F>
Vec2 central(F&& fn, double t, double e = 1e-3)
{
    return (8.0 * (fn(t + e) - fn(t - e)) - (fn(t + 2 * e) - fn(t - 2 * e))) * (1.0 / (12.0 * e));
}

double lp_norm(Vec2 v, double p) { return std::pow(std::pow(std::abs(v.x), p) + std::pow(std::abs(v.y), p), 1.0 / p); }

} // namespace

TEST(Plane, EuclideanMatchesUnitCircle)
{
    const PlaneField f = build_plane(euclid(), 256);
    ASSERT_TRUE(f.singular_nodes.empty());
    for (std::size_t j = 0; j < f.n; ++j) {
        const double t = f.grid[j];
        EXPECT_NEAR(f.p[j].x, std::cos(t), 1e-15);
        EXPECT_NEAR(f.p[j].y, std::sin(t), 1e-15);
        EXPECT_NEAR(f.q[j].x, -std::sin(t), 1e-15);
        EXPECT_NEAR(f.q[j].y, std::cos(t), 1e-15);
        EXPECT_NEAR(f.bp[j], 1.0, 1e-15);
        EXPECT_NEAR(f.bq[j], 1.0, 1e-15);
    }
    const auto d = validate_plane(f, 1e-10);
    EXPECT_TRUE(d.pass);
    for (const auto& c : d.checks) EXPECT_LT(c.residual, 1e-10) << c.name;
}

TEST(Plane, GridStaggeredByHalfStep)
{
    const PlaneField f = build_plane(euclid(), 64);
    EXPECT_DOUBLE_EQ(f.grid[0], f.t_offset());
    EXPECT_NEAR(f.grid[1] - f.grid[0], 2.0 * pi / 64, 1e-15);
}

TEST(Plane, EllipsePointsLieOnEllipse)
{
    const PlaneField f = build_plane(ellipse(2.0, 1.0), 512);
    for (std::size_t j = 0; j < f.n; ++j) {
        const Vec2 p = f.p[j];
        EXPECT_NEAR(p.x * p.x / 4.0 + p.y * p.y, 1.0, 1e-13);
        EXPECT_NEAR(bracket(f.p[j], f.q[j]), 1.0, 1e-13);
        // q is parallel to the tangent of the unit circle.
        EXPECT_NEAR(bracket(f.dp[j], f.q[j]), 0.0, 1e-12);
    }
    EXPECT_TRUE(validate_plane(f, 1e-8).pass);
}

TEST(Plane, LpCirclesSatisfyTheirNorms)
{
    for (double P : {3.0, 4.0, 1.5}) {
        const PlaneField f = build_plane(lp(P), 1024);
        const double Q = P / (P - 1.0);
        for (std::size_t j = 0; j < f.n; ++j) {
            EXPECT_NEAR(lp_norm(f.p[j], P), 1.0, 1e-12) << "p=" << P;
            // The dual circle q is the unit circle of the conjugate norm turned by a quarter.
            EXPECT_NEAR(lp_norm(f.q[j], Q), 1.0, 1e-11) << "p=" << P;
            if (!f.is_singular(j)) EXPECT_NEAR(bracket(f.p[j], f.q[j]), 1.0, 1e-12);
        }
        EXPECT_EQ(f.singular_nodes.size(), 8u);
    }
}

TEST(Plane, LpTwoIsEuclidean)
{
    const PlaneField f = build_plane(lp(2.0), 128);
    EXPECT_TRUE(std::holds_alternative<Euclidean>(f.model.family));
    EXPECT_TRUE(f.singular_nodes.empty());
}

TEST(Plane, LpDerivativesAgreeWithFiniteDifferences)
{
    const Chart chart(LpBall{3.0});
    for (double t : {0.3, 0.7, 1.2, 2.0, 3.5, 4.4, 5.9}) {
        const ChartPoint c = chart.at(t);
        const Vec2 dp = central([&](double s) { return chart.at(s).p; }, t);
        const Vec2 dq = central([&](double s) { return chart.at(s).q; }, t);
        const Vec2 ddq = central([&](double s) { return chart.at(s).dq; }, t);
        EXPECT_NEAR(norm(dp - c.dp), 0.0, 1e-8) << t;
        EXPECT_NEAR(norm(dq - c.dq), 0.0, 1e-8) << t;
        EXPECT_NEAR(norm(ddq - c.ddq), 0.0, 1e-7) << t;
        EXPECT_NEAR(c.bp, bracket(c.p, c.dp), 1e-12);
        EXPECT_NEAR(c.bq, bracket(c.q, c.dq), 1e-12);
    }
}

TEST(Plane, SignedPowerChartClosedForms)
{
    // In t -> (c^(2/3), s^(2/3)), [p, p'] = (2/3)|cs|^(-1/3) and bp bq = 4/(p q*) = 8/9.
    for (double t : {0.2, 0.9, 1.4, 2.6, 4.0}) {
        const Vec2 d = central([](double s) { return lp_chart::point(3.0, s); }, t, 1e-4);
        const double c = std::cos(t), s = std::sin(t);
        const double expected = (2.0 / 3.0) * std::pow(std::abs(c * s), -1.0 / 3.0);
        EXPECT_NEAR(bracket(lp_chart::point(3.0, t), d), expected, 1e-9);
        EXPECT_NEAR(lp_chart::bp(3.0, t), expected, 1e-12);
        EXPECT_NEAR(lp_chart::bp(3.0, t) * lp_chart::bq(3.0, t), 8.0 / 9.0, 1e-12);
        EXPECT_NEAR(bracket(lp_chart::point(3.0, t), lp_chart::dual_point(3.0, t)), 1.0, 1e-12);
    }
}

TEST(Plane, LpValidationPasses)
{
    const PlaneField f = build_plane(lp(3.0), 2048);
    const auto d = validate_plane(f, 1e-8);
    EXPECT_TRUE(d.pass);
    for (const auto& c : d.checks)
        if (c.name == "duality") EXPECT_LT(c.residual, 1e-6);
}

TEST(Plane, FourierBracketsAgreeWithFiniteDifferences)
{
    const Chart chart(FourierSupport{1.0, {{2, 0.1, 0.0}, {4, 0.0, 0.02}}});
    for (double t : {0.1, 1.0, 2.5, 4.2, 5.7}) {
        const ChartPoint c = chart.at(t);
        const Vec2 dp = central([&](double s) { return chart.at(s).p; }, t);
        EXPECT_NEAR(c.bp, bracket(c.p, dp), 1e-9);
        EXPECT_NEAR(bracket(c.p, c.q), 1.0, 1e-13);
        const Brackets b = chart.brackets(t);
        EXPECT_NEAR(b.bp, c.bp, 1e-13);
        EXPECT_NEAR(b.bq, c.bq, 1e-13);
    }
}

TEST(Plane, BracketIdentityOnSmoothFamilies)
{
    // [p,p'] [q,q']^2 = [q',q''], checked with the chart derivatives of q.
    for (const auto& m : {euclid(), ellipse(2.0, 1.0), fourier({{2, 0.1, 0.0}, {4, 0.0, 0.02}})}) {
        const Chart chart(m.family);
        for (int i = 0; i < 40; ++i) {
            const double t = 0.05 + i * 0.157;
            const Vec2 dq = central([&](double s) { return chart.at(s).q; }, t);
            const Vec2 ddq = central([&](double s) { return chart.at(s).dq; }, t);
            const ChartPoint c = chart.at(t);
            EXPECT_NEAR(c.bp * c.bq * c.bq, bracket(dq, ddq), 1e-8);
        }
    }
}

TEST(Plane, RejectsInvalidModels)
{
    auto kind = [](const PlaneModel& m, std::size_t n = 256) {
        try {
            build_plane(m, n);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::PreconditionViolated;
    };
    EXPECT_EQ(kind(lp(1.0)), ErrorKind::InvalidModel);
    EXPECT_EQ(kind(lp(0.5)), ErrorKind::InvalidModel);
    EXPECT_EQ(kind(ellipse(0.0, 1.0)), ErrorKind::InvalidModel);
    EXPECT_EQ(kind(fourier({{2, 0.9, 0.0}})), ErrorKind::InvalidModel);   // H + H'' < 0
    EXPECT_EQ(kind(fourier({{3, 0.01, 0.0}})), ErrorKind::InvalidModel);  // odd term breaks symmetry
    EXPECT_EQ(kind(fourier({}, -1.0)), ErrorKind::InvalidModel);
    EXPECT_EQ(kind(euclid(), 100), ErrorKind::BadRequest);
    EXPECT_EQ(kind(euclid(), 32), ErrorKind::BadRequest);
}

TEST(Plane, CentralSymmetry)
{
    const PlaneField f = build_plane(fourier({{2, 0.1, 0.05}, {6, 0.01, 0.0}}), 512);
    for (std::size_t j = 0; j < f.n / 2; ++j) {
        EXPECT_NEAR(norm(f.p[j] + f.p[j + f.n / 2]), 0.0, 1e-13);
        EXPECT_NEAR(f.bp[j] - f.bp[j + f.n / 2], 0.0, 1e-13);
    }
}

TEST(Plane, QuarterTurnSymmetry)
{
    EXPECT_TRUE(quarter_turn_symmetric(euclid()));
    EXPECT_TRUE(quarter_turn_symmetric(lp(3.0)));
    EXPECT_FALSE(quarter_turn_symmetric(ellipse(2.0, 1.0)));
    EXPECT_FALSE(quarter_turn_symmetric(fourier({{2, 0.1, 0.0}})));
    EXPECT_TRUE(quarter_turn_symmetric(fourier({{4, 0.03, 0.01}})));
}
