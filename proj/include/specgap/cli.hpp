#pragma once

// Batch driver: subcommands for curve sampling, Monte Carlo enclosure
// checks, plain Galerkin solves, perturbation-method runs, and convergence
// tables.  Every output file carries a header record (tool version, config
// echo, seed); identical configurations produce byte-identical files.
//
// Exit codes: 0 success, 1 usage error, 2 numerical/solver failure,
// 3 verification violations found.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specgap/geometry.hpp"
#include "specgap/matrix_lab.hpp"
#include "specgap/perturbation.hpp"
#include "specgap/problems.hpp"
#include "specgap/report.hpp"

namespace specgap::cli {

struct RunConfig {
    std::string subcommand;
    std::string problem = "block";
    double h = 0.25;
    int refine = 5;
    std::optional<Interval> gap;
    int trials = 1000;
    std::uint64_t seed = 1;
    std::string format;  // csv | json; default depends on the subcommand
    std::string out = "-";

    // curves
    RegionParams rect{0.0, 1.0, -1.0, 1.0};
    int samples = 101;
    // random-check
    std::vector<double> spec_a{-1.0, 0.0, 2.0};
    std::vector<double> spec_b{-0.25, 0.0, 0.25};
    double tol = 1e-8;
    // converge
    std::vector<double> h_list{0.5, 0.25, 0.125};
    std::optional<double> lambda;
    // perturb
    ClassifyThresholds thresholds{};

    // config echo for output headers; the output path itself is not part of
    // the computation and is omitted so reruns compare byte-identical
    nlohmann::json echo() const {
        nlohmann::json j{{"subcommand", subcommand}, {"format", format}};
        if (subcommand == "curves") {
            j["rect"] = {rect.re_lo, rect.re_hi, rect.im_lo, rect.im_hi};
            j["samples"] = samples;
        } else if (subcommand == "random-check") {
            j["spec-a"] = spec_a;
            j["spec-b"] = spec_b;
            j["trials"] = trials;
            j["tol"] = tol;
        } else {
            j["problem"] = problem;
            j["h"] = h;
            if (subcommand != "solve") j["refine"] = refine;
            if (gap) j["gap"] = {gap->lo, gap->hi};
            if (subcommand == "converge") {
                j["h-list"] = h_list;
                if (lambda) j["lambda"] = *lambda;
            }
        }
        return j;
    }
};

namespace detail {

inline std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

inline std::string csv_header_comments(const RunConfig& cfg) {
    std::ostringstream os;
    os << kToolName << ' ' << kToolVersion;
    return os.str();
}

// Prefix every CSV file with the header record.
inline void add_header(CsvWriter& csv, const RunConfig& cfg) {
    csv.comment(std::string(kToolName) + " " + kToolVersion);
    csv.comment("config: " + cfg.echo().dump());
    csv.comment("seed: " + std::to_string(cfg.seed));
}

inline void emit(const RunConfig& cfg, const std::string& content) {
    if (cfg.out == "-") {
        std::cout << content;
    } else {
        write_text_file(cfg.out, content);
    }
}

inline std::string interval_cell(const std::optional<Interval>& iv, bool lo) {
    if (!iv) return "";
    return format_double(lo ? iv->lo : iv->hi);
}

}  // namespace detail

inline int cmd_curves(const RunConfig& cfg) {
    cfg.rect.validate();
    if (cfg.samples < 1) throw std::invalid_argument("curves: samples < 1");
    if (cfg.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < cfg.samples; ++i) {
            const double t = cfg.samples == 1 ? 0.0 : double(i) / (cfg.samples - 1);
            const Complex f = curve_point(cfg.rect, t, Branch::lower);
            const Complex g = curve_point(cfg.rect, t, Branch::upper);
            rows.push_back({{"t", t},
                            {"lower", {f.real(), f.imag()}},
                            {"upper", {g.real(), g.imag()}}});
        }
        nlohmann::json j{{"header", report_header(cfg.echo(), cfg.seed)}, {"rows", rows}};
        detail::emit(cfg, j.dump(2) + "\n");
        return 0;
    }
    CsvWriter csv({"t", "lower_re", "lower_im", "upper_re", "upper_im"});
    detail::add_header(csv, cfg);
    for (int i = 0; i < cfg.samples; ++i) {
        const double t = cfg.samples == 1 ? 0.0 : double(i) / (cfg.samples - 1);
        const Complex f = curve_point(cfg.rect, t, Branch::lower);
        const Complex g = curve_point(cfg.rect, t, Branch::upper);
        csv.row({format_double(t), format_double(f.real()), format_double(f.imag()),
                 format_double(g.real()), format_double(g.imag())});
    }
    detail::emit(cfg, csv.str());
    return 0;
}

inline int cmd_random_check(const RunConfig& cfg) {
    const SpectrumModel sa = SpectrumModel::simple(cfg.spec_a);
    const SpectrumModel sb = SpectrumModel::simple(cfg.spec_b);
    std::vector<EnclosurePoint> points;
    const EnclosureReport report =
        enclosure_trial(sa, sb, cfg.trials, cfg.seed, cfg.tol, &points);
    if (cfg.format == "csv") {
        CsvWriter csv({"trial", "re", "im", "inside"});
        detail::add_header(csv, cfg);
        for (const auto& p : points)
            csv.row({std::to_string(p.trial), format_double(p.z.real()),
                     format_double(p.z.imag()), p.inside ? "1" : "0"});
        csv.footer({"violations", std::to_string(report.violations),
                    format_double(report.worst_margin)});
        detail::emit(cfg, csv.str());
    } else {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : points)
            pts.push_back({{"trial", p.trial},
                           {"re", p.z.real()},
                           {"im", p.z.imag()},
                           {"inside", p.inside}});
        nlohmann::json j{{"header", report_header(cfg.echo(), cfg.seed)},
                         {"trials", report.trials},
                         {"violations", report.violations},
                         {"worst_margin", report.worst_margin},
                         {"points", pts}};
        detail::emit(cfg, j.dump(2) + "\n");
    }
    return report.violations > 0 ? 3 : 0;
}

inline int cmd_solve(const RunConfig& cfg) {
    const ProblemSpec& problem = problem_registry(cfg.problem);
    const ProductSpace space = problem.make_space(elements_for_mesh_size(problem, cfg.h));
    const HermitianPencil pencil = problem.assemble(space);
    const VectorXd eigs = herm_gen_eig(pencil).eigenvalues;
    if (cfg.format == "json") {
        nlohmann::json vals = nlohmann::json::array();
        for (Index i = 0; i < eigs.size(); ++i) vals.push_back(eigs(i));
        nlohmann::json j{{"header", report_header(cfg.echo(), cfg.seed)},
                         {"dim", space.dim()},
                         {"eigenvalues", vals}};
        detail::emit(cfg, j.dump(2) + "\n");
        return 0;
    }
    CsvWriter csv({"index", "eigenvalue"});
    detail::add_header(csv, cfg);
    for (Index i = 0; i < eigs.size(); ++i)
        csv.row({std::to_string(i), format_double(eigs(i))});
    detail::emit(cfg, csv.str());
    return 0;
}

inline int cmd_perturb(const RunConfig& cfg) {
    const ProblemSpec& problem = problem_registry(cfg.problem);
    const MethodReport report =
        run_method(problem, cfg.h, cfg.refine, cfg.gap, cfg.thresholds);
    if (cfg.format == "csv") {
        CsvWriter csv({"re", "im", "class", "curve_dist", "folded_re", "folded_im",
                       "enclosure_lo", "enclosure_hi", "refined_lo", "refined_hi"});
        detail::add_header(csv, cfg);
        for (const auto& ce : report.classified)
            csv.row({format_double(ce.z.real()), format_double(ce.z.imag()),
                     to_string(ce.cls), format_double(ce.curve_dist),
                     format_double(ce.folded.real()), format_double(ce.folded.imag()),
                     detail::interval_cell(ce.enclosure, true),
                     detail::interval_cell(ce.enclosure, false),
                     detail::interval_cell(ce.refined_enclosure, true),
                     detail::interval_cell(ce.refined_enclosure, false)});
        detail::emit(cfg, csv.str());
        return 0;
    }
    nlohmann::json eigs = nlohmann::json::array();
    for (const auto& ce : report.classified) {
        nlohmann::json e{{"re", ce.z.real()},
                         {"im", ce.z.imag()},
                         {"class", to_string(ce.cls)},
                         {"curve_dist", ce.curve_dist},
                         {"folded", {ce.folded.real(), ce.folded.imag()}}};
        if (ce.enclosure) e["enclosure"] = {ce.enclosure->lo, ce.enclosure->hi};
        if (ce.refined_enclosure)
            e["refined_enclosure"] = {ce.refined_enclosure->lo, ce.refined_enclosure->hi};
        eigs.push_back(std::move(e));
    }
    nlohmann::json galerkin = nlohmann::json::array();
    for (Index i = 0; i < report.galerkin.size(); ++i) galerkin.push_back(report.galerkin(i));
    nlohmann::json j{{"header", report_header(cfg.echo(), cfg.seed)},
                     {"gap", {report.ctx.lo, report.ctx.hi}},
                     {"h_coarse", report.h_coarse},
                     {"h_fine", report.h_fine},
                     {"coarse_dim", report.coarse_dim},
                     {"fine_dim", report.fine_dim},
                     {"eigenvalues", eigs},
                     {"galerkin", galerkin}};
    detail::emit(cfg, j.dump(2) + "\n");
    return 0;
}

inline int cmd_converge(const RunConfig& cfg) {
    const ProblemSpec& problem = problem_registry(cfg.problem);
    double lambda;
    if (cfg.lambda) {
        lambda = *cfg.lambda;
    } else if (cfg.problem == "block") {
        lambda = exact_block_eigs(1).second;
    } else {
        throw CLI::ValidationError("converge", "no --lambda and no default for this problem");
    }
    const ConvergenceRecord record =
        convergence_study(problem, lambda, cfg.h_list, cfg.refine);
    if (cfg.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : record.rows)
            rows.push_back({{"h", r.h},
                            {"galerkin_dist", r.galerkin_dist},
                            {"perturbed_dist", r.perturbed_dist}});
        nlohmann::json j{{"header", report_header(cfg.echo(), cfg.seed)},
                         {"lambda", lambda},
                         {"rows", rows},
                         {"galerkin_slope", record.galerkin_slope},
                         {"perturbed_slope", record.perturbed_slope},
                         {"galerkin_coarsest_excluded", record.galerkin_coarsest_excluded},
                         {"perturbed_coarsest_excluded", record.perturbed_coarsest_excluded}};
        detail::emit(cfg, j.dump(2) + "\n");
        return 0;
    }
    CsvWriter csv({"h", "galerkin_dist", "perturbed_dist"});
    detail::add_header(csv, cfg);
    for (const auto& r : record.rows)
        csv.row({format_double(r.h), format_double(r.galerkin_dist),
                 format_double(r.perturbed_dist)});
    csv.footer({"slope", format_double(record.galerkin_slope),
                format_double(record.perturbed_slope)});
    detail::emit(cfg, csv.str());
    return 0;
}

namespace detail {

// Merge precedence: command-line flag > config-file entry > built-in default.
class ConfigMerger {
public:
    explicit ConfigMerger(nlohmann::json config) : config_(std::move(config)) {}

    template <typename T>
    void merge(const CLI::Option* opt, const char* key, T& target) const {
        if (opt != nullptr && opt->count() > 0) return;  // flag wins
        if (!config_.contains(key)) return;
        config_.at(key).get_to(target);
    }

    void merge_doubles(const CLI::Option* opt, const char* key,
                       std::vector<double>& target) const {
        if (opt != nullptr && opt->count() > 0) return;
        if (!config_.contains(key)) return;
        const auto& v = config_.at(key);
        if (v.is_string()) target = parse_doubles(v.get<std::string>());
        else v.get_to(target);
    }

    bool has(const char* key) const { return config_.contains(key); }
    const nlohmann::json& at(const char* key) const { return config_.at(key); }

private:
    nlohmann::json config_;
};

}  // namespace detail

// Parses arguments (plus an optional JSON config file supplying any flag;
// explicit flags win) and dispatches to the subcommand.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"spectral-gap eigenvalue toolkit"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // keep -h free for --h style flags

    std::string config_path;
    app.add_option("--config", config_path, "JSON file supplying any flag; flags win");

    RunConfig cfg;
    std::string gap_text, rect_text, spec_a_text, spec_b_text, h_list_text;
    double lambda_value = 0.0;

    auto add_sub = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->set_help_flag("--help", "print help");
        sub->add_option("--seed", cfg.seed, "seed echoed into the output header");
        sub->add_option("--format", cfg.format, "csv or json");
        sub->add_option("--out", cfg.out, "output path, - for stdout");
        return sub;
    };

    CLI::App* curves = add_sub("curves", "sample the two boundary curves");
    curves->add_option("--rect", rect_text, "re_lo,re_hi,im_lo,im_hi");
    curves->add_option("--samples", cfg.samples, "number of parameter samples");

    CLI::App* random_check =
        add_sub("random-check", "Monte Carlo enclosure check for A+iB");
    random_check->add_option("--spec-a", spec_a_text, "eigenvalues of the real part");
    random_check->add_option("--spec-b", spec_b_text, "eigenvalues of the skew part");
    random_check->add_option("--trials", cfg.trials, "number of random pairs");
    random_check->add_option("--tol", cfg.tol, "membership tolerance");

    CLI::App* solve = add_sub("solve", "plain Galerkin spectrum");
    solve->add_option("--problem", cfg.problem, "registered problem name");
    solve->add_option("--h", cfg.h, "mesh size");

    CLI::App* perturb = add_sub("perturb", "perturbation-method run");
    perturb->add_option("--problem", cfg.problem, "registered problem name");
    perturb->add_option("--h", cfg.h, "coarse mesh size");
    perturb->add_option("--refine", cfg.refine, "dyadic refinements for the fine mesh");
    perturb->add_option("--gap", gap_text, "a,b gap override");

    CLI::App* converge = add_sub("converge", "convergence table with slopes");
    converge->add_option("--problem", cfg.problem, "registered problem name");
    converge->add_option("--h-list", h_list_text, "comma-separated mesh sizes");
    converge->add_option("--refine", cfg.refine, "dyadic refinements for the fine mesh");
    CLI::Option* lambda_opt =
        converge->add_option("--lambda", lambda_value, "target eigenvalue");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        cfg.subcommand = active->get_name();

        nlohmann::json file_config = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw CLI::ValidationError("--config", "cannot open " + config_path);
            in >> file_config;
        }
        const detail::ConfigMerger merger(std::move(file_config));

        merger.merge(active->get_option_no_throw("--seed"), "seed", cfg.seed);
        merger.merge(active->get_option_no_throw("--format"), "format", cfg.format);
        merger.merge(active->get_option_no_throw("--out"), "out", cfg.out);
        merger.merge(active->get_option_no_throw("--problem"), "problem", cfg.problem);
        merger.merge(active->get_option_no_throw("--h"), "h", cfg.h);
        merger.merge(active->get_option_no_throw("--refine"), "refine", cfg.refine);
        merger.merge(active->get_option_no_throw("--trials"), "trials", cfg.trials);
        merger.merge(active->get_option_no_throw("--tol"), "tol", cfg.tol);
        merger.merge(active->get_option_no_throw("--samples"), "samples", cfg.samples);
        merger.merge(active->get_option_no_throw("--rect"), "rect", rect_text);
        merger.merge(active->get_option_no_throw("--spec-a"), "spec-a", spec_a_text);
        merger.merge(active->get_option_no_throw("--spec-b"), "spec-b", spec_b_text);
        merger.merge(active->get_option_no_throw("--gap"), "gap", gap_text);
        merger.merge(active->get_option_no_throw("--h-list"), "h-list", h_list_text);

        if (!rect_text.empty()) {
            const auto v = detail::parse_doubles(rect_text);
            if (v.size() != 4)
                throw CLI::ValidationError("--rect", "need re_lo,re_hi,im_lo,im_hi");
            cfg.rect = {v[0], v[1], v[2], v[3]};
        }
        if (!spec_a_text.empty()) cfg.spec_a = detail::parse_doubles(spec_a_text);
        if (!spec_b_text.empty()) cfg.spec_b = detail::parse_doubles(spec_b_text);
        if (!gap_text.empty()) {
            const auto v = detail::parse_doubles(gap_text);
            if (v.size() != 2) throw CLI::ValidationError("--gap", "need a,b");
            cfg.gap = Interval{v[0], v[1]};
        }
        if (!h_list_text.empty()) cfg.h_list = detail::parse_doubles(h_list_text);
        if (lambda_opt->count() > 0) cfg.lambda = lambda_value;
        else if (merger.has("lambda")) cfg.lambda = merger.at("lambda").get<double>();

        if (cfg.format.empty())
            cfg.format = (cfg.subcommand == "random-check" || cfg.subcommand == "perturb")
                             ? "json"
                             : "csv";
        if (cfg.format != "csv" && cfg.format != "json")
            throw CLI::ValidationError("--format", "must be csv or json");

        if (cfg.subcommand == "curves") return cmd_curves(cfg);
        if (cfg.subcommand == "random-check") return cmd_random_check(cfg);
        if (cfg.subcommand == "solve") return cmd_solve(cfg);
        if (cfg.subcommand == "perturb") return cmd_perturb(cfg);
        if (cfg.subcommand == "converge") return cmd_converge(cfg);
        std::cerr << "unknown subcommand\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace specgap::cli
