#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cycloid/analysis.hpp"
#include "cycloid/geometry.hpp"
#include "fixtures.hpp"

using namespace cycloid;
using fixtures::ladder;
using fixtures::plane;

namespace {

// Random trigonometric polynomial of degrees 2..6 in the grid parameter.
Samples random_bandlimited(const PlaneField& f, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Samples v(f.n, 0.0);
    for (int k = 2; k <= 6; ++k) {
        const double a = g(rng), b = g(rng);
        for (std::size_t j = 0; j < f.n; ++j) v[j] += a * std::cos(k * f.grid[j]) + b * std::sin(k * f.grid[j]);
    }
    return v;
}

void remove_dual_length(const PlaneField& f, Samples& h)
{
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < f.n; ++j) { num += h[j] * f.bp[j]; den += f.bp[j]; }
    for (double& x : h) x -= num / den;
}

} // namespace

TEST(Curve, UnitCircleFromConstantSupport)
{
    const PlaneField& f = plane("euclidean");
    const CurveData c = curve_from_support(f, Samples(f.n, 1.0));
    for (std::size_t j = 0; j < f.n; ++j) {
        EXPECT_NEAR(norm(c.points[j] - f.p[j]), 0.0, 1e-12);
        EXPECT_NEAR(c.r[j], 1.0, 1e-12);
    }
    EXPECT_TRUE(c.cusp_nodes.empty());
    const CurveData e = evolute(f, c);
    EXPECT_LT(max_abs(e.r), 1e-10);
    for (const auto& p : e.points) EXPECT_LT(norm(p), 1e-12);
}

TEST(Curve, EuclideanFourCuspHypocycloid)
{
    // r = C sin 2t integrates to gamma = (C/2)(-sin t + sin 3t / 3, -cos t - cos 3t / 3).
    const PlaneField& f = plane("euclidean");
    const double C = 1.5;
    Samples h(f.n);
    for (std::size_t j = 0; j < f.n; ++j) h[j] = -C / 3.0 * std::sin(2.0 * f.grid[j]);
    const CurveData c = curve_from_support(f, h);
    EXPECT_EQ(c.cusp_nodes.size(), 4u);
    for (std::size_t j = 0; j < f.n; ++j) {
        const double t = f.grid[j];
        const Vec2 ref{C / 2 * (-std::sin(t) + std::sin(3 * t) / 3), C / 2 * (-std::cos(t) - std::cos(3 * t) / 3)};
        EXPECT_NEAR(norm(c.points[j] - ref), 0.0, 1e-10);
        EXPECT_NEAR(c.r[j], C * std::sin(2 * t), 1e-10);
    }
}

TEST(Curve, AddingConstantTranslatesAlongUnitBall)
{
    for (const char* name : {"lp:3", "fourier"}) {
        const PlaneField& f = plane(name);
        const auto& e = ladder(name).get(3, 1);
        const CurveData a = eigen_curve(f, e);
        Samples h = e.h;
        for (double& x : h) x += 0.01;
        const CurveData b = curve_from_support(f, h, e.hw);
        for (std::size_t j = 0; j < f.n; ++j) EXPECT_NEAR(norm(b.points[j] - a.points[j] - 0.01 * f.p[j]), 0.0, 1e-12);
        EXPECT_EQ(a.cusp_nodes.size(), 6u);
    }
}

TEST(Curve, EigenCyclesHaveTwiceKCuspsAndClose)
{
    for (const char* name : fixtures::all_planes) {
        const PlaneField& f = plane(name);
        for (int k = 2; k <= 6; ++k) {
            const auto& e = ladder(name).get(k, 1);
            const CurveData c = eigen_curve(f, e);
            EXPECT_EQ(c.cusp_nodes.size(), static_cast<std::size_t>(2 * k)) << name << " k=" << k;
            EXPECT_LT(closure_gap(f, c), 1e-6) << name << " k=" << k;
        }
    }
}

TEST(Curve, LambdaOneCycloidIsOpen)
{
    const PlaneField& f = plane("lp:3");
    const auto one = lambda_one_eigenspace(f);
    const CurveData c = curve_from_radius(f, one.r1, {}, f.t_offset());
    EXPECT_GT(norm(c.drift) / diameter(c.points), 1e-3);
    EXPECT_EQ(c.cusp_nodes.size(), 2u);
}

TEST(Curve, RadiusIntegrationMatchesSupportReconstruction)
{
    const PlaneField& f = plane("ellipse");
    const auto& e = ladder("ellipse").get(4, 2);
    const CurveData a = eigen_curve(f, e);
    const CurveData b = curve_from_radius(f, a.r, a.points[0], a.t[0]);
    for (std::size_t j = 0; j < f.n; ++j) EXPECT_NEAR(norm(a.points[j] - b.points[j]), 0.0, 1e-8);
}

TEST(Evolute, DoubleEvoluteIsHomothetic)
{
    for (const char* name : fixtures::all_planes) {
        const PlaneField& f = plane(name);
        for (int k = 2; k <= 5; ++k) {
            const auto& e = ladder(name).get(k, 1);
            // Built from the exact eigen relations; differentiating ODE samples
            // three times would measure noise instead of geometry.
            const CurveData c = eigen_curve(f, e);
            const CurveData dd = evolute(f, evolute(f, c));
            EXPECT_EQ(dd.role, Role::Primal);
            double worst = 0.0, scale = 0.0;
            for (std::size_t j = 0; j < f.n; ++j) {
                worst = std::max(worst, norm(dd.points[j] - e.lambda * c.points[j]));
                scale = std::max(scale, e.lambda * norm(c.points[j]));
            }
            EXPECT_LT(worst / scale, 1e-6) << name << " k=" << k;
        }
    }
}

TEST(Evolute, EuclideanAstroidEvoluteIsScaledCopy)
{
    // The evolute of the astroid is an astroid twice as large, turned by an eighth of a turn.
    const PlaneField& f = plane("euclidean");
    Samples h(f.n);
    for (std::size_t j = 0; j < f.n; ++j) h[j] = std::cos(2.0 * f.grid[j]);
    const CurveData c = curve_from_support(f, h);
    const CurveData e = evolute(f, c);
    EXPECT_EQ(e.cusp_nodes.size(), 4u);
    double rmax = 0.0, emax = 0.0;
    for (std::size_t j = 0; j < f.n; ++j) { rmax = std::max(rmax, norm(c.points[j])); emax = std::max(emax, norm(e.points[j])); }
    EXPECT_NEAR(emax / rmax, 2.0, 1e-9);
}

TEST(Operator, EuclideanAction)
{
    const PlaneField& f = plane("euclidean");
    EXPECT_LT(max_abs(double_evolute_operator(f, Samples(f.n, 1.0))), 1e-12);
    for (int k = 2; k <= 5; ++k) {
        Samples h(f.n);
        for (std::size_t j = 0; j < f.n; ++j) h[j] = std::cos(k * f.grid[j]);
        const Samples th = double_evolute_operator(f, h);
        for (std::size_t j = 0; j < f.n; ++j) EXPECT_NEAR(th[j], k * k * h[j], 1e-9);
    }
}

TEST(Operator, SelfAdjointOnLpThree)
{
    const PlaneField& f = plane("lp:3");
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const Samples a = random_bandlimited(f, rng), b = random_bandlimited(f, rng);
        const double lhs = inner_product(f, a, double_evolute_operator(f, b));
        const double rhs = inner_product(f, double_evolute_operator(f, a), b);
        EXPECT_NEAR(lhs, rhs, 1e-8 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(Involute, EuclideanCosine)
{
    const PlaneField& f = plane("euclidean");
    Samples h(f.n);
    for (std::size_t j = 0; j < f.n; ++j) h[j] = std::cos(2.0 * f.grid[j]);
    const Samples s = involute_operator(f, h);
    for (std::size_t j = 0; j < f.n; ++j) EXPECT_NEAR(s[j], h[j] / 4.0, 1e-12);
}

TEST(Involute, RightInverseOnSmoothPlanes)
{
    std::mt19937_64 rng(5);
    for (const char* name : {"euclidean", "ellipse", "fourier"}) {
        const PlaneField& f = plane(name);
        for (int i = 0; i < 20; ++i) {
            Samples h = random_bandlimited(f, rng);
            remove_dual_length(f, h);
            const Samples back = double_evolute_operator(f, involute_operator(f, h));
            double worst = 0.0;
            for (std::size_t j = 0; j < f.n; ++j) worst = std::max(worst, std::abs(back[j] - h[j]));
            EXPECT_LT(worst, 1e-6) << name;
            const Samples s = involute_operator(f, h);
            EXPECT_GT(inner_product(f, s, h), 0.0);
        }
    }
}

TEST(Involute, EigenfunctionScalesByInverseEigenvalue)
{
    const PlaneField& f = plane("lp:3");
    const auto& e = ladder("lp:3").get(5, 1);
    const Samples s = involute_operator(f, e.h);
    double worst = 0.0;
    for (std::size_t j = 0; j < f.n; ++j) worst = std::max(worst, std::abs(s[j] - e.h[j] / e.lambda));
    EXPECT_LT(worst / (max_abs(e.h) / e.lambda), 1e-6);
}

TEST(Involute, RejectsNonzeroDualLength)
{
    const PlaneField& f = plane("lp:3");
    try {
        involute_operator(f, Samples(f.n, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotZeroDualLength);
    }
}

TEST(Orientation, SignFollowsOneMinusLambda)
{
    const PlaneField& f = plane("euclidean");
    Samples h4(f.n);
    for (std::size_t j = 0; j < f.n; ++j) h4[j] = std::cos(2.0 * f.grid[j]);
    const OrientationReport hypo = orientation_sign(f, curve_from_support(f, h4), 4.0);
    EXPECT_EQ(hypo.expected_sign, -1);
    EXPECT_TRUE(hypo.consistent);

    const auto recs = find_n_turn(f, 3);
    const auto& epi = recs[2];  // lambda = 4/9
    const OrientationReport o = orientation_sign(f, eigen_curve(f, epi.h, epi.hw, epi.lambda), epi.lambda);
    EXPECT_EQ(o.expected_sign, 1);
    EXPECT_TRUE(o.consistent);

    const auto& e5 = ladder("lp:3").get(5, 1);
    const OrientationReport l5 = orientation_sign(plane("lp:3"), eigen_curve(plane("lp:3"), e5), e5.lambda);
    EXPECT_TRUE(l5.consistent);
    EXPECT_GT(l5.checked, plane("lp:3").n / 2);
    EXPECT_LT(l5.identity_residual, 1e-8);
}

TEST(Width, ConstantAndOddSupports)
{
    const PlaneField& f = plane("lp:3");
    for (double w : width_function(f, Samples(f.n, 1.0))) EXPECT_NEAR(w, 2.0, 1e-15);
    Samples h3 = ladder("lp:3").get(3, 1).h;
    for (double w : width_function(f, h3)) EXPECT_NEAR(w, 0.0, 1e-12);
    for (double& x : h3) x += 0.7;
    for (double w : width_function(f, h3)) EXPECT_NEAR(w, 1.4, 1e-12);
    const Samples& h2 = ladder("lp:3").get(2, 1).h;
    const Samples w2 = width_function(f, h2);
    for (std::size_t j = 0; j < f.n; ++j) EXPECT_NEAR(w2[j], 2.0 * h2[j], 1e-12);
}

TEST(Export, CsvAndSvgCarryCusps)
{
    const PlaneField& f = plane("lp:3");
    const CurveData c = eigen_curve(f, ladder("lp:3").get(5, 1));
    const std::string csv = to_csv(c);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,x,y,h,r,is_cusp,is_vertex");
    std::size_t rows = 0, cusps = 0;
    while (std::getline(is, line)) {
        ++rows;
        if (line.substr(line.size() - 3, 1) == "1") ++cusps;
    }
    EXPECT_EQ(rows, f.n);
    EXPECT_EQ(cusps, 10u);
    const std::string svg = to_svg(c);
    std::size_t circles = 0;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
    EXPECT_EQ(circles, 10u);
    EXPECT_NE(svg.find("viewBox"), std::string::npos);
}
