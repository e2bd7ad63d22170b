#include "cbr/verify.hpp"

namespace cbr {

namespace {

Rational q(long a, long b = 1) { return Rational(mpq_class(a, b)); }
Point lp(long a, long b = 1) { return line_point(q(a, b)); }

SpacePtr finite_line(const std::vector<Rational>& pos) {
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> d(pos.size(), std::vector<Rational>(pos.size()));
    for (std::size_t i = 0; i < pos.size(); ++i) {
        labels.push_back("p" + std::to_string(i));
        for (std::size_t j = 0; j < pos.size(); ++j) d[i][j] = abs(pos[i] - pos[j]);
    }
    return finite_space(labels, d);
}

DenseSpec exclude(Point x) { return DenseSpec{DenseRule::ExcludePoint, std::move(x), {}}; }
DenseSpec permuted(std::size_t n) {
    DenseSpec d{DenseRule::Permuted, std::nullopt, {}};
    for (std::size_t i = 0; i < n; ++i) d.perm.push_back(n - 1 - i);
    return d;
}

Homeo bend() { return pl_homeo({q(0), q(1, 2), q(1)}, {q(0), q(1, 4), q(1)}); }
Homeo flip() { return affine_homeo(q(-1), q(1)); }

}  // namespace

Catalog default_catalog() {
    Catalog cat;
    auto add = [&](std::string id, std::string space, Presentation p, ClosedSetSpec F, std::set<std::string> tags) {
        CatalogEntry e;
        e.id = std::move(id);
        e.space_name = std::move(space);
        e.p = std::move(p);
        e.F = std::move(F);
        e.tags = std::move(tags);
        cat.push_back(std::move(e));
        return &cat.back();
    };

    // finite spaces
    {
        std::vector<std::vector<Rational>> layouts = {{q(0), q(1)}, {q(0), q(1, 4), q(1)}, {q(0), q(1, 8), q(1, 2), q(5, 8), q(1)},
                                                      {q(0), q(1, 3), q(2, 3), q(1), q(3, 2), q(2)}};
        for (std::size_t L = 0; L < layouts.size(); ++L) {
            auto sp = finite_line(layouts[L]);
            std::size_t m = layouts[L].size();
            std::vector<Point> pts;
            for (std::size_t i = 0; i < m; i += (L == 3 ? 2 : 1)) pts.push_back(finite_point(i));
            auto* e = add("fin" + std::to_string(m) + "-" + std::to_string(pts.size()), "finite" + std::to_string(m),
                          make_presentation(sp, Schedule::DyadicPaper), finite_points(pts), {"compact", "sigma", "proper"});
            e->alt_dense = make_presentation(sp, Schedule::DyadicPaper, permuted(m));
        }
    }

    // the unit interval, paper schedule, two dense enumerations
    {
        auto I = unit_interval();
        auto P = make_presentation(I, Schedule::DyadicPaper);
        auto S = make_presentation(I, Schedule::DyadicPaper, exclude(lp(1, 2)));
        struct Item {
            std::string id;
            ClosedSetSpec F;
        };
        std::vector<Item> items = {
            {"unit-empty", empty_set()},
            {"unit-1/3", finite_points({lp(1, 3)})},
            {"unit-0-1/2", finite_points({lp(0), lp(1, 2)})},
            {"unit-0-1/4-1", finite_points({lp(0), lp(1, 4), lp(1)})},
            {"unit-thirds", finite_points({lp(1, 3), lp(2, 3)})},
            {"unit-five", finite_points({lp(0), lp(1, 8), lp(1, 4), lp(1, 2), lp(1)})},
            {"unit-pkg", convergent_package({}, {GeoSeq{q(0), q(1)}})},
            {"unit-pkg2", convergent_package({q(1, 2)}, {GeoSeq{q(1), q(-1, 4)}, GeoSeq{q(0), q(1, 4)}})},
            {"unit-emb1", ordinal_embedding(1)},
            {"unit-emb2", ordinal_embedding(2)},
            {"unit-emb3", ordinal_embedding(3)},
            {"unit-emb1x2", ordinal_embedding(1, 2)},
        };
        for (auto& it : items) {
            auto* e = add(it.id, "unit", P, it.F, {"compact", "sigma", "proper"});
            e->alt_dense = S;
            e->equiv = pushforward_presentation(P, bend());
            bool small = std::holds_alternative<FinitePoints>(it.F.v) || std::holds_alternative<EmptySet>(it.F.v);
            // images of the limit families are only computed under affine maps
            e->homeo = small ? bend() : flip();
            if (small || it.id == "unit-pkg")
                e->scaled = std::pair{std::uint32_t{1}, make_presentation(scaled(q(1, 2), I), Schedule::DyadicPaper)};
        }
        // top schedule
        auto T = make_presentation(I, Schedule::DyadicTop);
        auto* a = add("unit-top-0-1/2", "unit", T, finite_points({lp(0), lp(1, 2)}), {"compact", "sigma", "proper"});
        a->scaled = std::pair{std::uint32_t{2}, make_presentation(scaled(q(1, 4), I), Schedule::DyadicTop)};
        add("unit-top-quarters", "unit", T, finite_points({lp(0), lp(1, 4), lp(1, 2), lp(3, 4)}),
            {"compact", "sigma", "proper"});
        add("unit-top-emb2", "unit", T, ordinal_embedding(2), {"compact", "sigma", "proper"});
    }

    // scaled copies as spaces in their own right
    add("half-0-1/2-1", "half", make_presentation(scaled(q(1, 2), unit_interval()), Schedule::DyadicPaper),
        finite_points({lp(0), lp(1, 2), lp(1)}), {"compact", "sigma", "proper"});
    add("quarter-0-1", "quarter", make_presentation(scaled(q(1, 4), unit_interval()), Schedule::DyadicPaper),
        finite_points({lp(0), lp(1)}), {"compact", "sigma", "proper"});

    // the real line
    {
        auto R = real_line();
        auto P = make_presentation(R, Schedule::DyadicPaper);
        auto S = make_presentation(R, Schedule::DyadicPaper, exclude(lp(0)));
        std::vector<std::pair<std::string, ClosedSetSpec>> items = {
            {"line-0-1", finite_points({lp(0), lp(1)})},
            {"line-three", finite_points({lp(-1), lp(0), lp(3, 2)})},
            {"line-far", finite_points({lp(0), lp(5), lp(7)})},
            {"line-pkg", convergent_package({q(3)}, {GeoSeq{q(0), q(1)}})},
        };
        for (auto& [id, F] : items) {
            auto* e = add(id, "line", P, F, {"sigma", "proper", "line"});
            e->alt_dense = S;
        }
    }

    // the hedgehog
    {
        auto P = make_presentation(hedgehog(), Schedule::DyadicPaper);
        add("hedge-3spines", "hedgehog", P,
            finite_points({hedge_point(0, q(1, 2)), hedge_point(1, q(1, 2)), hedge_point(2, q(1, 4))}), {"sigma"});
        add("hedge-hub", "hedgehog", P, finite_points({hedge_point(0, q(0)), hedge_point(0, q(1)), hedge_point(3, q(1, 2))}),
            {"sigma"});
    }

    // the Baire space, aligned schedule, two dense enumerations
    {
        auto P = make_presentation(baire_space(), Schedule::AlignedUltra);
        auto S = make_presentation(baire_space(), Schedule::AlignedUltra, DenseSpec{DenseRule::EventuallyOne, std::nullopt, {}});
        auto baire = [&](std::string id, ClosedSetSpec F, std::set<std::string> tags = {}) {
            tags.insert("baire");
            auto* e = add(std::move(id), "baire", P, std::move(F), tags);
            e->alt_dense = S;
            return e;
        };
        baire("baire-empty", empty_set());
        baire("baire-single", branch_family(t_single(Branch::constant(0))));
        baire("baire-base", branch_family(t_base()));
        baire("baire-three", finite_points({branch_point(Branch::constant(0)), branch_point(Branch::constant(1)),
                                            branch_point(Branch::make({1, 2}, 0))}));
        for (u64 a = 2; a <= 6; ++a) {
            auto* e = baire("switch-" + std::to_string(a), switch_image(Ordinal(a)), {"switch"});
            e->switch_alpha = Ordinal(a);
        }
        for (const auto& a : {Ordinal::omega(), Ordinal::omega() + Ordinal(1)}) {
            auto* e = baire("switch-" + ord_format(a), switch_image(a), {"switch", "canonical-sequence-dependent"});
            e->switch_alpha = a;
        }
        for (u64 a = 2; a <= 4; ++a) {
            auto* e = baire("base-via-f" + std::to_string(a), branch_family(t_base()));
            e->homeo = switch_homeo(switch_pair(Ordinal(a)));
        }
    }
    return cat;
}

}  // namespace cbr
