#include "cbr/cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cbr/engine.hpp"
#include "cbr/ksigma.hpp"

namespace cbr {

namespace {

Presentation apply(Presentation p, const CliOptions& opt) {
    if (opt.schedule) p.schedule = *opt.schedule;
    if (opt.dense) p.dense = *opt.dense;
    return p;
}

// " oracle=<ord> K=<k>" or an error message in `why`
std::optional<std::string> oracle_suffix(const Presentation& p, const ClosedSetSpec& F, const Ordinal& phi, std::string& why) {
    auto K = witness_depth_bound(p, F);
    if (!K) {
        why = "oracle check unavailable: no sound truncation depth for this set";
        return std::nullopt;
    }
    Ordinal o = brute_force_rank(p, F, K->k).rank;
    if (o != phi) {
        why = "oracle mismatch: engine " + ord_format(phi) + ", brute force " + ord_format(o) + " at depth " +
              std::to_string(K->k);
        return std::nullopt;
    }
    return " oracle=" + ord_format(o) + " K=" + std::to_string(K->k);
}

template <class F>
CommandResult guarded(F&& body) {
    CommandResult r;
    try {
        body(r);
    } catch (const ConfigError& e) {
        r.code = 2;
        r.err += std::string(e.what()) + "\n";
    } catch (const std::exception& e) {
        r.code = 1;
        r.err += std::string("error: ") + e.what() + "\n";
    }
    return r;
}

std::set<std::string> tags_for(const Presentation& p) {
    std::set<std::string> t;
    const Space& s = *peel(*p.space).first;
    if (is_compact(*p.space)) t.insert("compact");
    if (s.family() == Family::Baire) t.insert("baire");
    if (s.family() == Family::Line) t.insert("line");
    if (s.family() == Family::Interval || s.family() == Family::Line || s.family() == Family::Finite) t.insert("proper");
    try {
        if (ksigma_rank(*p.space).stabilized_empty) t.insert("sigma");
    } catch (const KSigmaError&) {
    }
    return t;
}

}  // namespace

Job config_job(const ExperimentConfig& cfg, const std::string& run) {
    auto* b = cfg.find("run", run);
    if (!b) throw ConfigError({"no run named '" + run + "'"});
    if (!b->get("set")) throw ConfigError({"run '" + run + "' has no presentation and set"});
    Job j;
    j.name = run;
    j.p = build_presentation(cfg, *b->get("presentation"));
    j.F = build_set(cfg, *b->get("set"));
    j.space_name = *cfg.find("presentation", *b->get("presentation"))->get("space");
    j.set_name = *b->get("set");
    return j;
}

Job catalog_job(const Catalog& cat, const std::string& id) {
    for (const auto& e : cat)
        if (e.id == id) return Job{e.id, e.p, e.F, e.space_name, e.id};
    throw ConfigError({"no catalog instance '" + id + "'"});
}

Catalog config_catalog(const ExperimentConfig& cfg) {
    Catalog cat;
    for (const auto* b : cfg.of_type("run")) {
        if (!b->get("set")) continue;
        Job j = config_job(cfg, b->name);
        CatalogEntry e;
        e.id = j.name;
        e.space_name = j.space_name;
        e.tags = tags_for(j.p);
        e.p = std::move(j.p);
        e.F = std::move(j.F);
        cat.push_back(std::move(e));
    }
    return cat;
}

CommandResult cmd_rank(const Job& job, const CliOptions& opt) {
    return guarded([&](CommandResult& r) {
        Presentation p = apply(job.p, opt);
        check_ambient(job.F, *p.space);
        Ordinal phi = dp_rank(p, job.F, opt.max_ordinal).rank;
        std::string line = "phi=" + ord_format(phi) + " cb=" + ord_format(cb_rank(job.F)) + " space=" + job.space_name +
                           " set=" + job.set_name;
        if (opt.oracle_check) {
            std::string why;
            auto s = oracle_suffix(p, job.F, phi, why);
            if (!s) {
                r.out += line + "\n";
                r.err += job.name + ": " + why + "\n";
                r.code = 1;
                return;
            }
            line += *s;
        }
        r.out += line + "\n";
    });
}

CommandResult cmd_trace(const Job& job, const CliOptions& opt, const std::string& format, const std::string& out_path) {
    return guarded([&](CommandResult& r) {
        if (format != "csv" && format != "dot") throw ConfigError({"unknown trace format '" + format + "'"});
        Presentation p = apply(job.p, opt);
        check_ambient(job.F, *p.space);
        auto res = dp_rank(p, job.F, opt.max_ordinal);
        if (opt.oracle_check) {
            std::string why;
            if (!oracle_suffix(p, job.F, res.rank, why)) {
                r.err += job.name + ": " + why + "\n";
                r.code = 1;
                return;
            }
        }
        std::string text = format == "csv" ? trace_csv(res.trace) : trace_dot(res.trace);
        if (out_path.empty()) {
            r.out += text;
            return;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (f) f << text;
        if (!f) {
            r.code = 1;
            r.err += "error: cannot write " + out_path + "\n";
            return;
        }
        r.out += "wrote " + out_path + "\n";
    });
}

CommandResult cmd_verify(const Catalog& cat, const std::vector<std::string>& checks, const CliOptions& opt, bool lines) {
    return guarded([&](CommandResult& r) {
        std::vector<CheckId> ids;
        for (const auto& c : checks) {
            auto id = parse_check(c);
            if (!id) throw ConfigError({"unknown check id '" + c + "'"});
            ids.push_back(*id);
        }
        if (ids.empty())
            for (const auto& d : check_defs()) ids.push_back(d.id);
        RankCache cache;
        std::vector<CheckReport> reps;
        for (auto id : ids) reps.push_back(run_check(id, cat, cache));
        if (opt.oracle_check) reps.push_back(oracle_equivalence(cat, cache));
        for (const auto& rep : reps) {
            r.out += lines ? rep.lines() : rep.text();
            if (!rep.pass) r.code = 1;
        }
    });
}

CommandResult cmd_gallery(const CliOptions& opt) {
    return guarded([&](CommandResult& r) {
        Catalog cat;
        for (auto& e : default_catalog())
            if (e.switch_alpha) cat.push_back(std::move(e));
        std::optional<Ordinal> prev;
        for (const auto& e : cat) {
            Ordinal phi = dp_rank(e.p, e.F, opt.max_ordinal).rank;
            const Ordinal& a = *e.switch_alpha;
            std::string line = "alpha=" + ord_format(a) + " phi=" + ord_format(phi) + " cb=" + ord_format(cb_rank(e.F));
            bool dependent = e.tags.count("canonical-sequence-dependent") > 0;
            if (opt.oracle_check && witness_depth_bound(e.p, e.F)) {
                std::string why;
                auto s = oracle_suffix(e.p, e.F, phi, why);
                if (!s) {
                    r.err += e.id + ": " + why + "\n";
                    r.code = 1;
                } else {
                    line += *s;
                }
            }
            if (dependent) line += " note=canonical-sequence-dependent";
            if (!dependent && phi != a) {
                r.err += e.id + ": expected phi=" + ord_format(a) + "\n";
                r.code = 1;
            }
            if (prev && !(*prev < phi)) {
                r.err += e.id + ": rank not strictly above the previous stage\n";
                r.code = 1;
            }
            prev = phi;
            r.out += line + "\n";
        }
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Presentation-induced ranks of countable closed sets"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string schedule, dense, max_ordinal, config_path, run_name, instance, emit, out_path;
    std::vector<std::string> checks;
    bool lines = false;

    auto common = [&](CLI::App* s) {
        s->add_option("--schedule", schedule, "radius schedule override: paper|top|aligned");
        s->add_option("--dense", dense, "dense sequence override: standard|exclude:<pt>|eventually-one|permuted:<i,...>");
        s->add_option("--max-ordinal", max_ordinal, "fail when the derivative iteration passes this ordinal");
        s->add_flag("--oracle-check", opt.oracle_check, "cross-validate every rank by brute force");
    };
    auto source = [&](CLI::App* s) {
        s->add_option("--config", config_path, "experiment config file");
        s->add_option("--run", run_name, "run name inside the config (default: every matching run)");
        s->add_option("--instance", instance, "default-catalog instance id");
    };

    auto* rank = app.add_subcommand("rank", "compute phi_P(F)");
    common(rank);
    source(rank);
    auto* trace = app.add_subcommand("trace", "export the derivative trace");
    common(trace);
    source(trace);
    trace->add_option("--emit", emit, "trace format: csv|dot")->check(CLI::IsMember({"csv", "dot"}));
    trace->add_option("--out", out_path, "output file (default: stdout)");
    auto* verify = app.add_subcommand("verify", "run comparison checks");
    common(verify);
    verify->add_option("checks", checks, "check ids (default: all)");
    verify->add_option("--config", config_path, "check the config's runs instead of the default catalog");
    verify->add_flag("--lines", lines, "machine-readable check_id,instance_id,lhs,rhs,verdict lines");
    auto* gallery = app.add_subcommand("gallery", "switch gallery over Base");
    common(gallery);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    auto emit_result = [&](const CommandResult& r) {
        out << r.out;
        err << r.err;
        return r.code;
    };
    try {
        if (!schedule.empty()) opt.schedule = parse_schedule(schedule);
        if (!dense.empty()) opt.dense = parse_dense(dense);
        if (!max_ordinal.empty()) opt.max_ordinal = ord_parse(max_ordinal);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::optional<ExperimentConfig> cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            for (const auto& w : cfg->warnings) err << "warning: " << w << "\n";
        }

        auto jobs = [&](const std::string& command) {
            std::vector<std::pair<Job, const ConfigBlock*>> js;
            if (!instance.empty()) {
                if (cfg) throw ConfigError({"--instance and --config are exclusive"});
                js.emplace_back(catalog_job(default_catalog(), instance), nullptr);
            } else if (cfg) {
                for (const auto* b : cfg->of_type("run")) {
                    if (!run_name.empty() ? b->name != run_name : *b->get("command") != command) continue;
                    if (!b->get("set")) throw ConfigError({"run '" + b->name + "' is not a rank or trace run"});
                    js.emplace_back(config_job(*cfg, b->name), b);
                }
                if (js.empty())
                    throw ConfigError({run_name.empty() ? "config has no " + command + " runs" : "no run named '" + run_name + "'"});
            } else {
                throw ConfigError({"give --config or --instance"});
            }
            return js;
        };

        if (rank->parsed()) {
            int code = 0;
            for (const auto& [j, b] : jobs("rank")) code = std::max(code, emit_result(cmd_rank(j, opt)));
            return code;
        }
        if (trace->parsed()) {
            auto js = jobs("trace");
            if (!out_path.empty() && js.size() > 1) throw ConfigError({"--out needs a single run"});
            int code = 0;
            for (const auto& [j, b] : js) {
                std::string fmt = !emit.empty() ? emit : (b && b->get("format") ? *b->get("format") : "csv");
                std::string path = !out_path.empty() ? out_path : (b && b->get("out") ? *b->get("out") : "");
                code = std::max(code, emit_result(cmd_trace(j, opt, fmt, path)));
            }
            return code;
        }
        if (verify->parsed()) {
            for (const auto& c : checks)
                if (!parse_check(c)) {
                    err << "usage error: unknown check id '" << c << "'\n";
                    return 2;
                }
            Catalog cat = cfg ? config_catalog(*cfg) : default_catalog();
            auto ids = checks;
            if (ids.empty() && cfg)
                for (const auto* b : cfg->of_type("run"))
                    if (*b->get("command") == "verify" && b->get("checks"))
                        for (std::istringstream is(*b->get("checks")); is;) {
                            std::string w;
                            if (is >> w) ids.push_back(w);
                        }
            return emit_result(cmd_verify(cat, ids, opt, lines));
        }
        return emit_result(cmd_gallery(opt));
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cbr
