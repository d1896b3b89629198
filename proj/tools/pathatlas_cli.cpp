#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "pathatlas/corpus.hpp"
#include "pathatlas/errors.hpp"
#include "pathatlas/io.hpp"
#include "pathatlas/lifts.hpp"
#include "pathatlas/suites.hpp"

namespace {

using namespace pathatlas;

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kDomain = 3 };

/// Malformed input or unknown names; reported with exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON-lines sink: a file when --out is given, stdout otherwise.
class Emitter {
public:
    explicit Emitter(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw UsageError("cannot open output file " + path);
        out_ = &file_;
    }

    void line(const Json& j) { *out_ << j.dump() << '\n'; }
    void raw(const std::string& text) { *out_ << text; }

private:
    std::ofstream file_;
    std::ostream* out_ = &std::cout;
};

struct Common {
    std::string out;
    bool timing = true;
};

struct Scenario {
    Json doc;
    std::string operation;
    std::shared_ptr<const Manifold> manifold;
    std::shared_ptr<const BundleAtlas> bundle;
    std::optional<double> tol;
    std::uint64_t seed = 1;

    PathChartSystem system(const char* key) const {
        if (!doc.contains(key)) throw UsageError(std::string("scenario needs \"") + key + "\"");
        return decode_system(doc.at(key));
    }
    PathRep rep() const {
        if (!doc.contains("rep")) throw UsageError("scenario needs \"rep\"");
        return decode_rep(doc.at("rep"));
    }
    const BundleAtlas& require_bundle() const {
        if (!bundle) throw UsageError("rep carries fibers but the scenario names no bundle");
        return *bundle;
    }
};

Scenario load_scenario(const std::string& path, const std::string& expected_operation) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read scenario " + path);
    Scenario s;
    try {
        s.doc = Json::parse(in);
        if (s.doc.contains("bundle")) {
            const Json& b = s.doc.at("bundle");
            s.bundle = builtin_bundle(b.at("name").get<std::string>(), decode_params(b.value("params", Json())));
            s.manifold = s.bundle->base_ptr();
        } else if (s.doc.contains("manifold")) {
            const Json& m = s.doc.at("manifold");
            s.manifold = builtin_manifold(m.at("name").get<std::string>(), decode_params(m.value("params", Json())));
        } else {
            throw UsageError("scenario names neither a manifold nor a bundle");
        }
        s.operation = s.doc.value("operation", expected_operation);
        if (s.doc.contains("tol")) s.tol = to_number(s.doc.at("tol"));
        s.seed = s.doc.value("seed", std::uint64_t{1});
    } catch (const Json::exception& ex) {
        throw UsageError(std::string("malformed scenario: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw UsageError(std::string("malformed scenario: ") + ex.what());
    }
    if (!expected_operation.empty() && s.operation != expected_operation)
        throw UsageError("scenario operation \"" + s.operation + "\" does not match command \"" + expected_operation + "\"");
    return s;
}

Json check_line(const Common& common, const std::string& name, const std::string& anchor, bool ok, double measured,
                double bound, double runtime_ms) {
    Check c{name, anchor, ok ? Status::pass : Status::fail, measured, bound, runtime_ms, {}};
    return encode(c, common.timing);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

Json encode_point(const Point& p) {
    Json out;
    out["chart"] = p.chart;
    out["coords"] = encode(p.coords);
    return out;
}

int cmd_transition(const Scenario& s, const Common& common, std::optional<double> tol_flag) {
    const auto start = std::chrono::steady_clock::now();
    const PathChartSystem src = s.system("src"), dst = s.system("dst");
    const PathRep rep = s.rep();
    const double tol = tol_flag.value_or(s.tol.value_or(1e-6));
    const double bound = s.doc.contains("bound") ? to_number(s.doc.at("bound")) : 10.0 * tol;
    const TransitionOptions options{.tol = tol};

    auto run = [&](const PathChartSystem& from, const PathChartSystem& to, const PathRep& r) {
        return r.has_fibers() ? transition_rep(s.require_bundle(), from, to, r, options)
                              : transition_rep(*s.manifold, from, to, r, options);
    };
    const TransitionResult there = run(src, dst, rep);
    const TransitionResult back = run(dst, src, there.rep);
    const double error = rep_distance(back.rep, rep);

    Json line = check_line(common, "transition.roundtrip", "path.transition.roundtrip", error <= bound, error, bound,
                           elapsed_ms(start));
    line["refinement"] = Json::array();
    for (double t : there.refinement) line["refinement"].push_back(number(t));
    line["system"] = encode(dst);
    line["rep"] = encode(there.rep);
    Emitter(common.out).line(line);
    return error <= bound ? kPass : kFail;
}

int cmd_transport(const Scenario& s, const Common& common) {
    const auto start = std::chrono::steady_clock::now();
    const PathChartSystem src = s.system("src");
    const ManifoldPath path = reconstruct(s.manifold, src, s.rep().base());
    std::optional<Mat> frame;
    if (s.doc.contains("frame")) frame = decode_mat(s.doc.at("frame"));
    const auto bundle = s.bundle ? s.bundle : tangent_bundle(s.manifold);
    const PathTrivialization triv(path, bundle, frame);

    std::vector<double> times = src.tau;
    if (s.doc.contains("s")) times.push_back(to_number(s.doc.at("s")));
    if (s.doc.contains("t")) times.push_back(to_number(s.doc.at("t")));
    double defect = 0.0;
    for (double r : times)
        for (double a : times)
            for (double b : times)
                defect = std::max(defect, operator_norm(transport(triv, b, r) * transport(triv, a, b) - transport(triv, a, r)));
    const double bound = s.tol.value_or(0.0);

    Json line = check_line(common, "transport.groupoid", "lift.transport.groupoid", defect <= bound, defect, bound,
                           elapsed_ms(start));
    line["kappa"] = number(triv.kappa());
    line["frames"] = Json::array();
    for (const auto& c : triv.frames()) line["frames"].push_back(encode(c));
    line["holonomy"] = encode(transport(triv, 0.0, 1.0));
    if (s.doc.contains("s") && s.doc.contains("t"))
        line["transport"] = encode(transport(triv, to_number(s.doc.at("s")), to_number(s.doc.at("t"))));
    Emitter(common.out).line(line);
    return defect <= bound ? kPass : kFail;
}

int cmd_margin(const Scenario& s, const Common& common, std::optional<std::size_t> trials_flag) {
    const auto start = std::chrono::steady_clock::now();
    const PathChartSystem src = s.system("src");
    const PathRep rep = s.rep().base();
    const ManifoldPath path = reconstruct(s.manifold, src, rep);
    const OpennessCertificate certificate = openness_margin(path);
    const std::size_t trials = trials_flag.value_or(s.doc.value("trials", std::size_t{1000}));
    const double radius = std::min(certificate.eta, s.doc.contains("cap") ? to_number(s.doc.at("cap")) : 10.0);

    std::mt19937_64 rng(s.seed);
    std::size_t failures = 0;
    if (radius > 0.0) {
        for (std::size_t k = 0; k < trials; ++k) {
            try {
                reconstruct(s.manifold, src, perturb(rep, radius, rng));
            } catch (const DomainError&) {
                ++failures;
            }
        }
    }
    const bool ok = certificate.eta > 0.0 && failures == 0;
    Json line = check_line(common, "margin.perturbations", "path.openness.margin", ok, static_cast<double>(failures), 0.0,
                           elapsed_ms(start));
    line["trials"] = trials;
    line["radius"] = number(radius);
    line["certificate"] = encode(certificate);
    Emitter(common.out).line(line);
    return ok ? kPass : kFail;
}

int cmd_reconstruct(const Scenario& s, const Common& common) {
    const auto start = std::chrono::steady_clock::now();
    const PathChartSystem src = s.system("src");
    const PathRep rep = s.rep();
    Json line;
    if (rep.has_fibers()) {
        if (!s.bundle) throw UsageError("rep carries fibers but the scenario names no bundle");
        const BundleLift lift = reconstruct_lift(s.bundle, src, rep);
        const PathRep back = lift_chart_map(lift);
        const double gap = rep_distance(back, rep);
        line = check_line(common, "reconstruct.inverse", "path.chart-map.reconstruct.inverse", back == rep, gap, 0.0,
                          elapsed_ms(start));
        line["pieces"] = Json::array();
        for (const auto& piece : lift.base.pieces()) line["pieces"].push_back(encode(piece));
        line["fibers"] = Json::array();
        for (const auto& u : lift.fibers) line["fibers"].push_back(encode(u));
        line["start"] = encode_point(evaluate_path(lift.base, 0.0));
        line["end"] = encode_point(evaluate_path(lift.base, 1.0));
        Emitter(common.out).line(line);
        return back == rep ? kPass : kFail;
    }
    const ManifoldPath path = reconstruct(s.manifold, src, rep);
    const PathRep back = chart_map(path);
    line = check_line(common, "reconstruct.inverse", "path.chart-map.reconstruct.inverse", back == rep,
                      rep_distance(back, rep), 0.0, elapsed_ms(start));
    line["pieces"] = Json::array();
    for (const auto& piece : path.pieces()) line["pieces"].push_back(encode(piece));
    line["start"] = encode_point(evaluate_path(path, 0.0));
    line["end"] = encode_point(evaluate_path(path, 1.0));
    Emitter(common.out).line(line);
    return back == rep ? kPass : kFail;
}

int cmd_validate(const std::string& selector, const SuiteOptions& options, const Common& common) {
    std::vector<const Suite*> chosen;
    if (selector == "all") {
        for (const auto& s : suites()) chosen.push_back(&s);
    } else if (const Suite* s = find_suite(selector)) {
        chosen.push_back(s);
    } else {
        throw UsageError("unknown suite \"" + selector + "\"");
    }
    Emitter out(common.out);
    bool failed = false;
    for (const Suite* suite : chosen) {
        const auto checks = run_suite(*suite, options);
        out.raw(render_report(checks, common.timing));
        failed |= std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == Status::fail; });
    }
    return failed ? kFail : kPass;
}

int cmd_corpus(const std::string& manifold_name, const BuiltinParams& params, std::uint64_t seed, std::size_t count,
               const Common& common) {
    const auto m = builtin_manifold(manifold_name, params);
    Emitter out(common.out);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(case_seed(seed, i));
        const ManifoldPath p = random_path(m, rng);
        Json scenario;
        scenario["manifold"] = {{"name", manifold_name}};
        scenario["operation"] = "reconstruct";
        scenario["src"] = encode(p.system());
        scenario["rep"] = encode(chart_map(p));
        scenario["seed"] = case_seed(seed, i);
        out.line(scenario);
    }
    return kPass;
}

Json error_line(const std::string& command, const char* kind, const std::string& message, std::optional<double> time) {
    Json out;
    out["name"] = command;
    out["status"] = "error";
    out["error"] = kind;
    out["message"] = message;
    if (time) out["time"] = number(*time);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regulated path spaces on manifolds: invariant suites and scenario runs"};
    app.require_subcommand(1);

    Common common;
    std::string scenario_path;
    std::optional<double> tol;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "Write the JSON-lines report to this file");
        sub->add_flag("!--no-timing", common.timing, "Leave runtime_ms out of the report");
    };
    auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        add_common(sub);
    };

    std::string suite_name;
    SuiteOptions suite_options;
    auto* validate = app.add_subcommand("validate", "Run an invariant suite on seeded random cases");
    validate->add_option("--suite", suite_name, "Suite name, or \"all\"")->required();
    validate->add_option("--seed", suite_options.seed, "Base seed");
    validate->add_option("--count", suite_options.count, "Number of cases (default: suite default)");
    validate->add_option("--tol", tol, "Tolerance override for suites that take one");
    add_common(validate);

    auto* transition = app.add_subcommand("transition", "Change chart system and report the round-trip error");
    transition->add_option("--tol", tol, "Transition tolerance");
    add_scenario(transition);
    auto* transport_cmd = app.add_subcommand("transport", "Frames, kappa and holonomy along a path");
    add_scenario(transport_cmd);
    std::optional<std::size_t> trials;
    auto* margin = app.add_subcommand("margin", "Openness margin and a perturbation check");
    margin->add_option("--count", trials, "Number of perturbation trials");
    add_scenario(margin);
    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Reconstruct a path from its rep");
    add_scenario(reconstruct_cmd);
    auto* run = app.add_subcommand("run", "Run a scenario by its operation field");
    add_scenario(run);

    std::string manifold_name;
    BuiltinParams params;
    std::uint64_t corpus_seed = 1;
    std::size_t corpus_count = 10;
    auto* corpus = app.add_subcommand("corpus", "Emit random valid paths as reconstruct scenarios");
    corpus->add_option("--manifold", manifold_name, "Builtin manifold name")->required();
    corpus->add_option("--dim", params.dim, "Dimension parameter");
    corpus->add_option("--radius", params.radius, "Radius parameter");
    corpus->add_option("--seed", corpus_seed, "Base seed");
    corpus->add_option("--count", corpus_count, "Number of paths");
    add_common(corpus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        if (validate->parsed()) {
            suite_options.tol = tol;
            return cmd_validate(suite_name, suite_options, common);
        }
        if (corpus->parsed()) return cmd_corpus(manifold_name, params, corpus_seed, corpus_count, common);

        const Scenario s = load_scenario(scenario_path, run->parsed() ? "" : command);
        command = s.operation;
        if (s.operation == "transition") return cmd_transition(s, common, tol);
        if (s.operation == "transport") return cmd_transport(s, common);
        if (s.operation == "margin") return cmd_margin(s, common, trials);
        if (s.operation == "reconstruct") return cmd_reconstruct(s, common);
        throw UsageError("unknown operation \"" + s.operation + "\"");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const CoverError& e) {
        std::cout << error_line(command, "cover", e.what(), e.time()).dump() << '\n';
        std::cerr << "cover error: " << e.what() << '\n';
        return kDomain;
    } catch (const DomainError& e) {
        std::cout << error_line(command, "domain", e.what(), e.time()).dump() << '\n';
        std::cerr << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Json::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
}
