#include "cbr/ksigma.hpp"

namespace cbr {

namespace {

bool empty_space(const Space& s) {
    if (auto* f = std::get_if<FiniteSpace>(&s.v)) return f->labels.empty();
    if (auto* i = std::get_if<IntervalSpace>(&s.v)) return i->parts.empty();
    return false;
}

// closed-form deciders per family
SubspaceDesc lc_part(const Space& s, const SubspaceDesc& Y) {
    if (Y.kind == SubspaceDesc::Empty || Y.kind == SubspaceDesc::Hub) return Y;  // a single point is compact
    switch (s.family()) {
        case Family::Finite:
        case Family::Interval:
        case Family::Line: return Y;
        case Family::Scaled: return lc_part(*std::get<Scaled>(s.v).inner, Y);
        case Family::Amalgam:
            for (const auto& p : std::get<AmalgamSum>(s.v).parts) {
                auto f = p.inner->family();
                if (f != Family::Interval && f != Family::Line)
                    throw KSigmaError("amalgam part outside the decider: " + p.inner->describe());
            }
            return Y;
        // every neighbourhood of the centre holds a spine-tip sequence with no Cauchy subsequence
        case Family::Hedgehog: return {SubspaceDesc::NoHub};
        case Family::Baire: return {SubspaceDesc::Empty};
        case Family::UltraTable: break;
    }
    throw KSigmaError("no local compactness decider for " + s.describe());
}

SubspaceDesc minus(const SubspaceDesc& Y, const SubspaceDesc& Z) {
    using K = SubspaceDesc;
    if (Z.kind == K::Empty) return Y;
    if (Y.kind == Z.kind) return {K::Empty};
    if (Y.kind == K::Whole && Z.kind == K::NoHub) return {K::Hub};
    if (Y.kind == K::Whole && Z.kind == K::Hub) return {K::NoHub};
    throw KSigmaError("descriptor outside the algebra: " + Y.str() + " minus " + Z.str());
}

}  // namespace

std::string SubspaceDesc::str() const {
    switch (kind) {
        case Empty: return "empty";
        case Whole: return "whole";
        case Hub: return "hub";
        case NoHub: return "whole-minus-hub";
    }
    return "?";
}

SubspaceDesc locally_compact_points(const Space& s, const SubspaceDesc& Y) {
    if (Y.kind == SubspaceDesc::NoHub) throw KSigmaError("descriptor outside the algebra: " + Y.str());
    return lc_part(s, Y);
}

SubspaceDesc remainder(const Space& s, const SubspaceDesc& Y) { return minus(Y, locally_compact_points(s, Y)); }

KSigmaResult ksigma_rank(const Space& s) {
    KSigmaResult R;
    SubspaceDesc X = empty_space(s) ? SubspaceDesc{SubspaceDesc::Empty} : SubspaceDesc{SubspaceDesc::Whole};
    R.chain.push_back(X);
    for (u64 a = 0;; ++a) {
        SubspaceDesc next = remainder(s, X);
        if (next == X) {
            R.rank = Ordinal(a);
            R.stabilized_empty = X.kind == SubspaceDesc::Empty;
            return R;
        }
        X = next;
        R.chain.push_back(X);
    }
}

}  // namespace cbr
