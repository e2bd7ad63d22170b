#include "cbr/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "cbr/verify.hpp"

namespace cbr {

namespace {

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
    return s;
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

u64 parse_nat(const std::string& s) {
    if (s.empty() || s.size() > 18 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw std::invalid_argument("invalid natural number '" + s + "'");
    return std::stoull(s);
}

// value kinds; each canonicalizer throws with a message on bad input
using Canon = std::function<std::string(const std::string&)>;

std::string canon_list(const std::string& v, const std::function<std::string(const std::string&)>& item) {
    std::vector<std::string> out;
    for (const auto& w : words(v)) out.push_back(item(w));
    return join(out, " ");
}

std::string canon_rat(const std::string& w) { return Rational::parse(w).str(); }

std::pair<Rational, Rational> parse_seg(const std::string& w) {
    auto dots = w.find("..");
    if (dots == std::string::npos) throw std::invalid_argument("invalid segment '" + w + "' (expected lo..hi)");
    return {Rational::parse(w.substr(0, dots)), Rational::parse(w.substr(dots + 2))};
}

GeoSeq parse_seq(const std::string& w) {
    auto colon = w.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("invalid sequence '" + w + "' (expected a:c)");
    return GeoSeq{Rational::parse(w.substr(0, colon)), Rational::parse(w.substr(colon + 1))};
}

const Canon kRat = canon_rat;
const Canon kRatList = [](const std::string& v) { return canon_list(v, canon_rat); };
const Canon kSegList = [](const std::string& v) {
    return canon_list(v, [](const std::string& w) {
        auto [lo, hi] = parse_seg(w);
        return lo.str() + ".." + hi.str();
    });
};
const Canon kSeqList = [](const std::string& v) {
    return canon_list(v, [](const std::string& w) {
        auto g = parse_seq(w);
        return g.a.str() + ":" + g.c.str();
    });
};
const Canon kPointList = [](const std::string& v) {
    return canon_list(v, [](const std::string& w) { return parse_point(w).str(); });
};
const Canon kNat = [](const std::string& v) { return std::to_string(parse_nat(v)); };
const Canon kOrd = [](const std::string& v) { return ord_format(ord_parse(v)); };
const Canon kName = [](const std::string& v) {
    if (!valid_name(v)) throw std::invalid_argument("invalid name '" + v + "'");
    return v;
};
const Canon kSchedule = [](const std::string& v) { return schedule_name(parse_schedule(v)); };
const Canon kDense = [](const std::string& v) { return parse_dense(v).str(); };
const Canon kBranch = [](const std::string& v) { return Branch::parse(v).str(); };
const Canon kText = [](const std::string& v) {
    if (v.empty()) throw std::invalid_argument("empty value");
    return v;
};
const Canon kChecks = [](const std::string& v) {
    return canon_list(v, [](const std::string& w) {
        if (!parse_check(w)) throw std::invalid_argument("unknown check id '" + w + "'");
        return w;
    });
};
Canon one_of(std::vector<std::string> allowed) {
    return [allowed](const std::string& v) {
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
            throw std::invalid_argument("expected one of " + join(allowed, "|") + ", got '" + v + "'");
        return v;
    };
}

struct KeySpec {
    Canon canon;
    bool required = false;
    std::string ref;  // block type a name value must resolve to
};
using Schema = std::map<std::string, KeySpec>;

// keys allowed for a block, given its kind (or command)
std::optional<Schema> schema(const std::string& type, const std::string& kind) {
    if (type == "space") {
        if (kind == "finite") return Schema{{"positions", {kRatList, true, ""}}};
        if (kind == "interval") return Schema{{"parts", {kSegList, false, ""}}};
        if (kind == "line" || kind == "hedgehog" || kind == "baire") return Schema{};
        if (kind == "scaled") return Schema{{"factor", {kRat, true, ""}}, {"of", {kName, true, "space"}}};
        return std::nullopt;
    }
    if (type == "presentation")
        return Schema{{"space", {kName, true, "space"}}, {"schedule", {kSchedule, false, ""}}, {"dense", {kDense, false, ""}}};
    if (type == "set") {
        if (kind == "empty" || kind == "base") return Schema{};
        if (kind == "points") return Schema{{"points", {kPointList, true, ""}}};
        if (kind == "package") return Schema{{"points", {kRatList, false, ""}}, {"seqs", {kSeqList, false, ""}}};
        if (kind == "embedding") return Schema{{"alpha", {kNat, true, ""}}, {"m", {kNat, false, ""}}};
        if (kind == "single") return Schema{{"branch", {kBranch, true, ""}}};
        if (kind == "switch") return Schema{{"alpha", {kOrd, true, ""}}};
        return std::nullopt;
    }
    if (type == "run") {
        Schema job{{"presentation", {kName, true, "presentation"}}, {"set", {kName, true, "set"}}};
        if (kind == "rank") return job;
        if (kind == "trace") {
            job["format"] = {one_of({"csv", "dot"}), false, ""};
            job["out"] = {kText, false, ""};
            return job;
        }
        if (kind == "verify") return Schema{{"checks", {kChecks, false, ""}}};
        return std::nullopt;
    }
    return std::nullopt;
}

std::string kind_key(const std::string& type) { return type == "run" ? "command" : "kind"; }

const std::set<std::string> kTypes = {"space", "presentation", "set", "run"};

struct RawBlock {
    ConfigBlock block;
    std::map<std::string, int> key_line;
};

SpacePtr line_layout(const std::vector<Rational>& pos) {
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> d(pos.size(), std::vector<Rational>(pos.size()));
    for (std::size_t i = 0; i < pos.size(); ++i) {
        labels.push_back("p" + std::to_string(i));
        for (std::size_t j = 0; j < pos.size(); ++j) d[i][j] = abs(pos[i] - pos[j]);
    }
    return finite_space(labels, d);
}

const ConfigBlock& need(const ExperimentConfig& cfg, const std::string& type, const std::string& name) {
    auto* b = cfg.find(type, name);
    if (!b) throw ConfigError({"no " + type + " named '" + name + "'"});
    return *b;
}

SpacePtr build_space_depth(const ExperimentConfig& cfg, const std::string& name, int depth) {
    if (depth > 16) throw ConfigError({"space '" + name + "': scaling chain too deep or cyclic"});
    const auto& b = need(cfg, "space", name);
    const std::string& kind = *b.get("kind");
    if (kind == "finite") {
        std::vector<Rational> pos;
        for (const auto& w : words(*b.get("positions"))) pos.push_back(Rational::parse(w));
        return line_layout(pos);
    }
    if (kind == "interval") {
        auto* parts = b.get("parts");
        if (!parts) return unit_interval();
        std::vector<Segment> segs;
        for (const auto& w : words(*parts)) {
            auto [lo, hi] = parse_seg(w);
            segs.push_back(Segment{lo, hi});
        }
        return interval_space(segs);
    }
    if (kind == "line") return real_line();
    if (kind == "hedgehog") return hedgehog();
    if (kind == "baire") return baire_space();
    return scaled(Rational::parse(*b.get("factor")), build_space_depth(cfg, *b.get("of"), depth + 1));
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors, "\n")), errors_(std::move(errors)) {}

const std::string* ConfigBlock::get(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
}

const ConfigBlock* ExperimentConfig::find(const std::string& type, const std::string& name) const {
    for (const auto& b : blocks)
        if (b.type == type && b.name == name) return &b;
    return nullptr;
}

std::vector<const ConfigBlock*> ExperimentConfig::of_type(const std::string& type) const {
    std::vector<const ConfigBlock*> out;
    for (const auto& b : blocks)
        if (b.type == type) out.push_back(&b);
    return out;
}

Point parse_point(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty point");
    if (s[0] == '#') return finite_point(parse_nat(s.substr(1)));
    if (s == "hub") return hedge_point(0, Rational(0));
    if (s[0] == '<') return branch_point(Branch::parse(s));
    if (s[0] == 's') {
        auto colon = s.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("invalid hedgehog point '" + s + "'");
        Rational t = Rational::parse(s.substr(colon + 1));
        if (t.sign() <= 0 || t > Rational(1)) throw std::invalid_argument("hedgehog coordinate outside (0,1]: '" + s + "'");
        return hedge_point(parse_nat(s.substr(1, colon - 1)), t);
    }
    return line_point(Rational::parse(s));
}

DenseSpec parse_dense(std::string_view text) {
    std::string s(text);
    if (s == "standard") return {};
    if (s == "eventually-one") return DenseSpec{DenseRule::EventuallyOne, std::nullopt, {}};
    if (s.rfind("exclude:", 0) == 0) return DenseSpec{DenseRule::ExcludePoint, parse_point(s.substr(8)), {}};
    if (s.rfind("permuted:", 0) == 0) {
        DenseSpec d{DenseRule::Permuted, std::nullopt, {}};
        std::string rest = s.substr(9);
        std::replace(rest.begin(), rest.end(), ',', ' ');
        for (const auto& w : words(rest)) d.perm.push_back(parse_nat(w));
        auto sorted = d.perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != i) throw std::invalid_argument("permutation expected, got '" + rest + "'");
        return d;
    }
    throw std::invalid_argument("unknown dense rule '" + s + "'");
}

ExperimentConfig parse_config(std::string_view text) {
    std::vector<std::string> errors;
    std::vector<RawBlock> raw;
    auto err = [&](int line, const std::string& m) { errors.push_back("line " + std::to_string(line) + ": " + m); };

    std::istringstream is{std::string(text)};
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                err(n, "unterminated block header");
                continue;
            }
            auto parts = words(t.substr(1, t.size() - 2));
            if (parts.size() != 2) {
                err(n, "block header must be [<type> <name>]");
                continue;
            }
            if (!kTypes.count(parts[0])) err(n, "unknown block type '" + parts[0] + "'");
            if (!valid_name(parts[1])) err(n, "invalid name '" + parts[1] + "'");
            RawBlock rb;
            rb.block.type = parts[0];
            rb.block.name = parts[1];
            rb.block.line = n;
            raw.push_back(std::move(rb));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            err(n, "expected key = value");
            continue;
        }
        if (raw.empty()) {
            err(n, "key outside of a block");
            continue;
        }
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        auto& rb = raw.back();
        if (rb.block.values.count(key)) {
            err(n, "duplicate key '" + key + "'");
            continue;
        }
        rb.block.values[key] = value;
        rb.key_line[key] = n;
    }

    ExperimentConfig cfg;
    std::set<std::pair<std::string, std::string>> names;
    for (auto& rb : raw) {
        auto& b = rb.block;
        if (!kTypes.count(b.type)) continue;
        if (!names.insert({b.type, b.name}).second) err(b.line, "duplicate " + b.type + " name '" + b.name + "'");
        std::string kk = kind_key(b.type);
        std::string kind;
        if (b.type != "presentation") {
            auto* k = b.get(kk);
            if (!k) {
                err(b.line, b.type + " '" + b.name + "' has no " + kk);
                continue;
            }
            kind = *k;
        }
        auto sch = schema(b.type, kind);
        if (!sch) {
            err(rb.key_line[kk], "unknown " + b.type + " " + kk + " '" + kind + "'");
            continue;
        }
        for (auto& [key, value] : b.values) {
            if (b.type != "presentation" && key == kk) continue;
            auto it = sch->find(key);
            if (it == sch->end()) {
                err(rb.key_line[key], "unknown key '" + key + "' for " + b.type + (kind.empty() ? "" : " " + kk + " '" + kind + "'"));
                continue;
            }
            try {
                value = it->second.canon(value);
            } catch (const std::exception& e) {
                err(rb.key_line[key], key + ": " + e.what());
            }
        }
        for (const auto& [key, spec] : *sch)
            if (spec.required && !b.values.count(key)) err(b.line, b.type + " '" + b.name + "' needs " + key);
        cfg.blocks.push_back(b);
    }
    if (!errors.empty()) throw ConfigError(errors);

    // references
    auto line_of = [&](const ConfigBlock& b, const std::string& key) {
        for (const auto& rb : raw)
            if (rb.block.type == b.type && rb.block.name == b.name) {
                auto it = rb.key_line.find(key);
                return it == rb.key_line.end() ? b.line : it->second;
            }
        return b.line;
    };
    for (const auto& b : cfg.blocks) {
        std::string kind = b.type == "presentation" ? "" : *b.get(kind_key(b.type));
        const Schema sch = *schema(b.type, kind);
        for (const auto& [key, spec] : sch) {
            if (spec.ref.empty() || !b.get(key)) continue;
            if (!cfg.find(spec.ref, *b.get(key)))
                err(line_of(b, key), "dangling reference: no " + spec.ref + " named '" + *b.get(key) + "'");
        }
    }
    if (!errors.empty()) throw ConfigError(errors);

    // construction and ambient checks
    for (const auto& b : cfg.blocks) {
        try {
            if (b.type == "space") build_space(cfg, b.name);
            if (b.type == "set") build_set(cfg, b.name);
            if (b.type == "presentation") {
                auto p = build_presentation(cfg, b.name);
                if (p.schedule == Schedule::AlignedUltra && !is_ultrametric(*p.space))
                    cfg.warnings.push_back("line " + std::to_string(b.line) + ": presentation '" + b.name +
                                           "' uses the aligned schedule on a non-ultrametric space; it is intended for ultrametrics");
                if (p.dense.excluded && !contains(*p.space, *p.dense.excluded))
                    err(line_of(b, "dense"), "excluded point " + p.dense.excluded->str() + " is not in the space");
            }
            if (b.type == "run" && b.get("set")) {
                auto p = build_presentation(cfg, *b.get("presentation"));
                check_ambient(build_set(cfg, *b.get("set")), *p.space);
            }
        } catch (const std::exception& e) {
            err(b.line, b.type + " '" + b.name + "': " + e.what());
        }
    }
    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    for (std::size_t i = 0; i < cfg.blocks.size(); ++i) {
        const auto& b = cfg.blocks[i];
        if (i) os << "\n";
        os << "[" << b.type << " " << b.name << "]\n";
        std::string kk = kind_key(b.type);
        if (auto* k = b.get(kk); k && b.type != "presentation") os << kk << " = " << *k << "\n";
        for (const auto& [key, value] : b.values)
            if (key != kk || b.type == "presentation") os << key << " = " << value << "\n";
    }
    return os.str();
}

SpacePtr build_space(const ExperimentConfig& cfg, const std::string& name) { return build_space_depth(cfg, name, 0); }

Presentation build_presentation(const ExperimentConfig& cfg, const std::string& name) {
    const auto& b = need(cfg, "presentation", name);
    auto sp = build_space(cfg, *b.get("space"));
    Schedule s = b.get("schedule") ? parse_schedule(*b.get("schedule")) : Schedule::DyadicPaper;
    DenseSpec d = b.get("dense") ? parse_dense(*b.get("dense")) : DenseSpec{};
    auto p = make_presentation(sp, s, d);
    p.name = name;
    return p;
}

ClosedSetSpec build_set(const ExperimentConfig& cfg, const std::string& name) {
    const auto& b = need(cfg, "set", name);
    const std::string& kind = *b.get("kind");
    auto list = [&](const std::string& key) { return b.get(key) ? words(*b.get(key)) : std::vector<std::string>{}; };
    if (kind == "empty") return empty_set();
    if (kind == "base") return branch_family(t_base());
    if (kind == "points") {
        std::vector<Point> pts;
        for (const auto& w : list("points")) pts.push_back(parse_point(w));
        return finite_points(pts);
    }
    if (kind == "package") {
        std::vector<Rational> pts;
        std::vector<GeoSeq> seqs;
        for (const auto& w : list("points")) pts.push_back(Rational::parse(w));
        for (const auto& w : list("seqs")) seqs.push_back(parse_seq(w));
        return convergent_package(pts, seqs);
    }
    if (kind == "embedding") return ordinal_embedding(parse_nat(*b.get("alpha")), b.get("m") ? parse_nat(*b.get("m")) : 1);
    if (kind == "single") return branch_family(t_single(Branch::parse(*b.get("branch"))));
    return switch_image(ord_parse(*b.get("alpha")));
}

}  // namespace cbr
