#pragma once

#include <string>
#include <vector>

#include "cbr/ordinal.hpp"
#include "cbr/spaces.hpp"

namespace cbr {

class KSigmaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Closed subspaces reachable by the remainder iteration on the catalog families.
struct SubspaceDesc {
    // Hub: the centre of the hedgehog alone; NoHub: everything but the centre
    enum Kind { Empty, Whole, Hub, NoHub } kind = Whole;
    std::string str() const;
    bool operator==(const SubspaceDesc&) const = default;
};

// Y \ Y*: the points of Y with a compact neighbourhood in Y.
SubspaceDesc locally_compact_points(const Space& s, const SubspaceDesc& Y);
// Y*: the rest, closed in Y.
SubspaceDesc remainder(const Space& s, const SubspaceDesc& Y);

struct KSigmaResult {
    Ordinal rank;
    bool stabilized_empty = true;
    std::vector<SubspaceDesc> chain;  // X_0, X_1, ..., X_rank
};

KSigmaResult ksigma_rank(const Space& s);

}  // namespace cbr
