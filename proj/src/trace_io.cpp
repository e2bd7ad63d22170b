#include <sstream>

#include "cbr/engine.hpp"

namespace cbr {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string trace_csv(const DerivativeTrace& t) {
    std::ostringstream os;
    os << "stage,alive_count,alive\n";
    for (const auto& s : t.stages) {
        os << ord_format(s.stage) << "," << s.alive.size() << ",";
        for (std::size_t i = 0; i < s.alive.size(); ++i) os << (i ? " " : "") << s.alive[i];
        os << "\n";
    }
    return os.str();
}

std::string trace_dot(const DerivativeTrace& t) {
    std::ostringstream os;
    os << "digraph quotient {\n  rankdir=TB;\n";
    os << "  label=" << quote(t.engine + " rank " + ord_format(t.final_rank)) << ";\n";
    // last stage at which each class is still alive
    std::vector<std::string> dies(t.class_desc.size());
    for (const auto& s : t.stages)
        for (std::size_t c : s.alive)
            if (c < dies.size()) dies[c] = ord_format(s.stage);
    for (std::size_t c = 0; c < t.class_desc.size(); ++c)
        os << "  c" << c << " [label=" << quote(t.class_desc[c] + "\\nalive to " + dies[c]) << "];\n";
    for (const auto& [a, b] : t.edges) os << "  c" << a << " -> c" << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace cbr
