#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maslov/maslov_index.hpp"
#include "test_support.hpp"

using namespace maslov;

namespace {

LagrangianFrame line(const SymplecticSpace& space, double p, double q) {
    Matrix b(2, 1);
    b << p, q;
    return LagrangianFrame(space, b);
}

}  // namespace

TEST_CASE("triple index anchors") {
    auto space = standard_form(1);
    auto ver = vertical_frame(space);   // p-axis
    auto hor = horizontal_frame(space); // q-axis

    SUBCASE("graph slope sign is the signature") {
        CHECK(triple_index(ver, line(space, 1, 0.5), hor).signature() == 1);
        CHECK(triple_index(ver, line(space, 1, -0.5), hor).signature() == -1);
    }

    SUBCASE("middle equal to an outer argument gives all zeros") {
        auto sig = triple_index(ver, ver, hor);
        CHECK(sig.signature() == 0);
        CHECK(sig.zeros == 1);
    }

    SUBCASE("non-transversal outer pair is rejected") {
        CHECK_THROWS_AS(triple_index(ver, hor, ver), std::invalid_argument);
    }
}

TEST_CASE("triple index agrees with the chart signature") {
    auto& gen = testing::rng(711);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + int(gen() % 4);
        auto space = standard_form(n);
        auto l0 = testing::random_lagrangian(space, gen);
        auto l2 = testing::random_lagrangian(space, gen);
        if (intersection_dim(l0, l2) != 0) continue;
        Matrix s = testing::random_symmetric(n, gen);
        auto l1 = from_chart(ChartCoordinates{s, l0, l2});
        CHECK(triple_index(l0, l1, l2).signature() == inertia_of(s).signature());
    }
}

TEST_CASE("triple index antisymmetries, 1000 random transversal triples") {
    auto& gen = testing::rng(722);
    int done = 0;
    while (done < 1000) {
        int n = 1 + int(gen() % 4);
        auto space = standard_form(n);
        auto l0 = testing::random_lagrangian(space, gen);
        auto l1 = testing::random_lagrangian(space, gen);
        auto l2 = testing::random_lagrangian(space, gen);
        if (intersection_dim(l0, l2) != 0 || intersection_dim(l0, l1) != 0 ||
            intersection_dim(l1, l2) != 0)
            continue;
        int mu = triple_index(l0, l1, l2).signature();
        CHECK(triple_index(l2, l1, l0).signature() == -mu);
        CHECK(triple_index(l0, l2, l1).signature() == -mu);
        ++done;
    }
}

TEST_CASE("triple index is a symplectic invariant") {
    auto& gen = testing::rng(733);
    int done = 0;
    while (done < 300) {
        int n = 1 + int(gen() % 4);
        auto space = standard_form(n);
        auto l0 = testing::random_lagrangian(space, gen);
        auto l1 = testing::random_lagrangian(space, gen);
        auto l2 = testing::random_lagrangian(space, gen);
        if (intersection_dim(l0, l2) != 0) continue;
        Matrix f = testing::random_symplectic(space, gen);
        auto act = [&](const LagrangianFrame& l) {
            return LagrangianFrame(space, Matrix(f * l.basis));
        };
        CHECK(triple_index(act(l0), act(l1), act(l2)).signature() ==
              triple_index(l0, l1, l2).signature());
        ++done;
    }
}

TEST_CASE("chain rule cocycle vanishes") {
    auto& gen = testing::rng(744);

    SUBCASE("1000 random 4-tuples") {
        int done = 0;
        while (done < 1000) {
            int n = 1 + int(gen() % 4);
            auto space = standard_form(n);
            auto l0 = testing::random_lagrangian(space, gen);
            auto l1 = testing::random_lagrangian(space, gen);
            auto l2 = testing::random_lagrangian(space, gen);
            auto l3 = testing::random_lagrangian(space, gen);
            if (intersection_dim(l0, l2) != 0 || intersection_dim(l0, l3) != 0 ||
                intersection_dim(l1, l3) != 0)
                continue;
            CHECK(chain_rule_defect(l0, l1, l2, l3) == 0);
            ++done;
        }
    }

    SUBCASE("mutually transversal 4-tuples, n=2") {
        auto space = standard_form(2);
        int done = 0;
        while (done < 100) {
            auto l0 = testing::random_lagrangian(space, gen);
            auto l1 = testing::random_lagrangian(space, gen);
            auto l2 = testing::random_lagrangian(space, gen);
            auto l3 = testing::random_lagrangian(space, gen);
            bool ok = true;
            const LagrangianFrame* all[] = {&l0, &l1, &l2, &l3};
            for (int i = 0; i < 4 && ok; ++i)
                for (int j = i + 1; j < 4 && ok; ++j)
                    ok = intersection_dim(*all[i], *all[j]) == 0;
            if (!ok) continue;
            CHECK(chain_rule_defect(l0, l1, l2, l3) == 0);
            ++done;
        }
    }
}

TEST_CASE("pair index anchors") {
    auto space = standard_form(1);
    auto pi = vertical_frame(space);

    SUBCASE("equal arguments vanish") {
        auto l = line(space, 1, 0.3);
        auto sig = pair_index(pi, l, l);
        CHECK(sig.negatives == 0);
        CHECK(sig.positives == 0);
    }

    SUBCASE("pinned n=1 below/above pair") {
        auto below = line(space, 1, -1);
        auto above = line(space, 1, 1);
        int fwd = pair_index(pi, below, above).negatives;
        int bwd = pair_index(pi, above, below).negatives;
        CHECK(fwd + bwd == 1);
        CHECK(((fwd == 1) != (bwd == 1)));
        CHECK(fwd == 1);  // the below-to-above motion carries the crossing
    }
}

TEST_CASE("pair index identities on random triples") {
    auto& gen = testing::rng(755);

    SUBCASE("reversal sum equals n for mutually transversal triples") {
        int done = 0;
        while (done < 1000) {
            int n = 1 + int(gen() % 4);
            auto space = standard_form(n);
            auto pi = testing::random_lagrangian(space, gen);
            auto l0 = testing::random_lagrangian(space, gen);
            auto l1 = testing::random_lagrangian(space, gen);
            if (intersection_dim(pi, l0) != 0 || intersection_dim(pi, l1) != 0 ||
                intersection_dim(l0, l1) != 0)
                continue;
            auto fwd = pair_index(pi, l0, l1);
            auto bwd = pair_index(pi, l1, l0);
            if (fwd.zeros != 0) continue;  // measure-zero degenerate draws
            CHECK(fwd.negatives + bwd.negatives == n);
            ++done;
        }
    }

    SUBCASE("triangle inequality, 1000 random triples") {
        int done = 0;
        while (done < 1000) {
            int n = 1 + int(gen() % 4);
            auto space = standard_form(n);
            auto pi = testing::random_lagrangian(space, gen);
            auto l0 = testing::random_lagrangian(space, gen);
            auto l1 = testing::random_lagrangian(space, gen);
            auto l2 = testing::random_lagrangian(space, gen);
            int d02 = pair_index(pi, l0, l2).negatives;
            int d01 = pair_index(pi, l0, l1).negatives;
            int d12 = pair_index(pi, l1, l2).negatives;
            CHECK(d02 <= d01 + d12);
            ++done;
        }
    }

    SUBCASE("frame independence of all three counts") {
        int done = 0;
        while (done < 200) {
            int n = 1 + int(gen() % 3);
            auto space = standard_form(n);
            auto pi = testing::random_lagrangian(space, gen);
            auto l0 = testing::random_lagrangian(space, gen);
            auto l1 = testing::random_lagrangian(space, gen);
            auto rebase = [&](const LagrangianFrame& l) {
                Matrix c = testing::random_matrix(n, n, gen);
                c += 3.0 * Matrix::Identity(n, n);
                return LagrangianFrame(space, Matrix(l.basis * c));
            };
            auto a = pair_index(pi, l0, l1);
            auto b = pair_index(rebase(pi), rebase(l0), rebase(l1));
            CHECK(a.negatives == b.negatives);
            CHECK(a.positives == b.positives);
            CHECK(a.zeros == b.zeros);
            ++done;
        }
    }
}

TEST_CASE("pair crossing counts at train-touching endpoints") {
    auto space = standard_form(1);
    auto pi = vertical_frame(space);
    auto generic = line(space, 1, 0.7);

    CHECK(pair_crossings(pi, pi, generic) == 0);    // departures not counted
    CHECK(pair_crossings(pi, generic, pi) == 1);    // arrival counted
    CHECK(pair_crossings(pi, pi, pi) == 0);
    CHECK(pair_crossings(pi, generic, generic) == 0);
}

TEST_CASE("curve index sums") {
    auto space = standard_form(1);
    auto pi = vertical_frame(space);

    SUBCASE("constant curve") {
        DiscreteLagrangianCurve curve;
        for (int i = 0; i < 4; ++i) {
            curve.times.push_back(i);
            curve.frames.push_back(line(space, 1, 0.5));
        }
        CHECK(curve_index_sum(curve, pi) == 0);
    }

    SUBCASE("two-point curve is a single pair index") {
        DiscreteLagrangianCurve curve;
        curve.times = {0.0, 1.0};
        curve.frames = {line(space, 1, -1), line(space, 1, 1)};
        CHECK(curve_index_sum(curve, pi) ==
              pair_index(pi, curve.frames[0], curve.frames[1]).negatives);
    }
}

TEST_CASE("simple curve maslov index") {
    auto space = standard_form(1);
    auto ver = vertical_frame(space);
    auto hor = horizontal_frame(space);

    SUBCASE("constant curve") {
        auto g = line(space, 1, 0.4);
        CHECK(simple_curve_maslov(g, g, ver, hor) == doctest::Approx(0.0));
    }

    SUBCASE("rotation from S=-1 to S=+1 crosses the p-axis train once") {
        auto g0 = line(space, 1, -1);
        auto g1 = line(space, 1, 1);
        CHECK(simple_curve_maslov(g0, g1, ver, hor) == doctest::Approx(1.0));
    }

    SUBCASE("agrees with pair-index counting for monotone chart curves") {
        auto& gen = testing::rng(766);
        for (int trial = 0; trial < 100; ++trial) {
            // keep endpoints a safe margin off the train of the p-axis (S = 0)
            double s0 = -3.013 + 0.05 * double(gen() % 40);
            double s1 = s0 + 0.1 + 0.05 * double(gen() % 60);
            auto g0 = line(space, 1, s0);
            auto g1 = line(space, 1, s1);
            double cross = simple_curve_maslov(g0, g1, ver, hor);
            CHECK(cross == doctest::Approx(double(pair_index(ver, g0, g1).negatives)));
        }
    }
}

TEST_CASE("monotonicity detection") {
    auto space = standard_form(2);
    auto pi = vertical_frame(space);
    auto hor = horizontal_frame(space);

    auto chart_curve = [&](double sign) {
        DiscreteLagrangianCurve curve;
        for (int i = 0; i <= 10; ++i) {
            double t = 0.2 * i;
            curve.times.push_back(t);
            curve.frames.push_back(from_chart(
                ChartCoordinates{Matrix(sign * t * Matrix::Identity(2, 2)), pi, hor}));
        }
        return curve;
    };

    CHECK(is_monotone_increasing(chart_curve(+1.0), pi));
    CHECK_FALSE(is_monotone_increasing(chart_curve(-1.0), pi));

    SUBCASE("the rotating line stays monotone through a train crossing") {
        auto s1 = standard_form(1);
        DiscreteLagrangianCurve circle;
        for (int i = 0; i <= 24; ++i) {
            double t = 0.1 + 3.4 * i / 24.0;  // sweeps past pi, crossing the train
            circle.times.push_back(t);
            circle.frames.push_back(line(s1, std::cos(t), std::sin(t)));
        }
        CHECK(is_monotone_increasing(circle, vertical_frame(s1)));
        DiscreteLagrangianCurve reversed;
        reversed.times = circle.times;
        reversed.frames.assign(circle.frames.rbegin(), circle.frames.rend());
        CHECK_FALSE(is_monotone_increasing(reversed, vertical_frame(s1)));
    }
}
