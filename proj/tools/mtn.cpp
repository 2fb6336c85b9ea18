// Command-line front end: Schreier combinatorics, repeated averages, the
// sigma registry, functional certificates, certified norm bounds, witness
// constructions, estimate checks, and the acceptance suite.

#include "mtn/acceptance.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace mtn;
using nlohmann::json;

std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoll(tok));
    }
    return out;
}

ParameterSystem load_params(const std::string& path, std::int64_t strict_levels) {
    if (!path.empty()) return io::params_from(io::load_file(path));
    if (strict_levels > 0) return build_params_strict(static_cast<std::size_t>(strict_levels));
    return toy_params_flat(10);
}

SigmaRegistry load_registry(const std::string& path, const ParameterSystem& P) {
    if (path.empty()) return {};
    return io::registry_from(io::load_file(path), P);
}

int run(int argc, char** argv) {
    CLI::App app{"mixed Tsirelson norm laboratory"};
    app.require_subcommand(1);

    // ---- schreier -----------------------------------------------------------
    auto* sch = app.add_subcommand("schreier", "Schreier family membership and enumeration");
    sch->require_subcommand(1);
    std::string set_arg;
    std::int64_t n_arg = 1, max_arg = 3, cap_arg = 14;
    bool modified = false;
    auto* sch_check = sch->add_subcommand("check", "membership of a finite set in S_n");
    sch_check->add_option("--set", set_arg, "comma separated elements")->required();
    sch_check->add_option("--n", n_arg, "family order")->required();
    sch_check->add_flag("--modified", modified, "use the modified family");
    sch_check->callback([&] {
        FiniteSet F(parse_int_list(set_arg));
        const bool ok = schreier::is_member(
            F, n_arg, modified ? schreier::Variant::modified : schreier::Variant::standard);
        std::cout << (ok ? "true" : "false") << "\n";
        throw CLI::RuntimeError(ok ? 0 : 1);
    });
    auto* sch_enum = sch->add_subcommand("enum", "enumerate S_n inside {1..max}");
    sch_enum->add_option("--n", n_arg)->required();
    sch_enum->add_option("--max", max_arg)->required();
    sch_enum->add_option("--cap", cap_arg, "universe cap (default 14)");
    sch_enum->callback([&] {
        json out = json::array();
        for (const auto& F : schreier::enumerate(n_arg, max_arg, cap_arg))
            out.push_back(io::to_json(F));
        std::cout << out.dump(2) << "\n";
    });

    // ---- avg ---------------------------------------------------------------
    auto* avg = app.add_subcommand("avg", "repeated average a_n^L");
    std::string L_arg;
    avg->add_option("--n", n_arg)->required();
    avg->add_option("--L", L_arg, "comma separated index list")->required();
    avg->callback([&] {
        auto a = averages::repeated_average(n_arg, parse_int_list(L_arg));
        std::cout << io::to_json(a).dump(2) << "\n";
    });

    // ---- bscc-check ----------------------------------------------------------
    auto* bscc = app.add_subcommand("bscc-check", "basic special convex combination check");
    std::string vec_path, eps_arg = "1/2";
    int p_arg = 2;
    bscc->add_option("--vector", vec_path, "vector JSON file")->required();
    bscc->add_option("--p", p_arg, "1 or 2");
    bscc->add_option("--eps", eps_arg, "rational eps");
    bscc->add_option("--n", n_arg, "order")->required();
    bscc->callback([&] {
        auto v = io::vec_from(io::load_file(vec_path));
        auto res = averages::is_bscc(v, p_arg, parse_rational(eps_arg), n_arg);
        std::cout << json{{"ok", res.ok}, {"reason", res.reason}}.dump(2) << "\n";
        throw CLI::RuntimeError(res.ok ? 0 : 1);
    });

    // ---- params ---------------------------------------------------------------
    auto* pr = app.add_subcommand("params", "parameter system");
    pr->require_subcommand(1);
    std::string params_path;
    std::int64_t strict_levels = 0;
    auto* pr_show = pr->add_subcommand("show", "print a parameter system with its violations");
    pr_show->add_option("--params", params_path, "params JSON file");
    pr_show->add_option("--strict-levels", strict_levels, "generate the minimal strict system");
    pr_show->callback([&] {
        std::cout << io::to_json(load_params(params_path, strict_levels)).dump(2) << "\n";
    });

    // ---- sigma -----------------------------------------------------------------
    auto* sg = app.add_subcommand("sigma", "coding registry");
    sg->require_subcommand(1);
    std::string reg_path;
    auto* sg_dump = sg->add_subcommand("dump", "validate and print a registry file");
    sg_dump->add_option("--registry", reg_path)->required();
    sg_dump->add_option("--params", params_path);
    sg_dump->add_option("--strict-levels", strict_levels);
    sg_dump->callback([&] {
        const auto P = load_params(params_path, strict_levels);
        std::cout << io::to_json(load_registry(reg_path, P)).dump(2) << "\n";
    });

    // ---- certify / eval -----------------------------------------------------------
    auto* ct = app.add_subcommand("certify", "validate a functional certificate");
    std::string fn_path;
    bool quarantine = false;
    ct->add_option("--functional", fn_path)->required();
    ct->add_option("--params", params_path);
    ct->add_option("--strict-levels", strict_levels);
    ct->add_option("--registry", reg_path);
    ct->add_flag("--quarantine", quarantine, "adopt unknown witnesses into a scratch registry");
    ct->callback([&] {
        const auto P = load_params(params_path, strict_levels);
        const auto reg = load_registry(reg_path, P);
        auto f = io::functional_from(io::load_file(fn_path));
        auto v = validate(*f, P, reg, {quarantine});
        std::cout << json{{"ok", v.ok}, {"reason", v.reason}, {"path", v.path}}.dump(2) << "\n";
        throw CLI::RuntimeError(v.ok ? 0 : 1);
    });

    auto* ev = app.add_subcommand("eval", "evaluate a functional against a vector");
    ev->add_option("--functional", fn_path)->required();
    ev->add_option("--vector", vec_path)->required();
    ev->add_option("--params", params_path);
    ev->add_option("--strict-levels", strict_levels);
    ev->callback([&] {
        const auto P = load_params(params_path, strict_levels);
        auto f = io::functional_from(io::load_file(fn_path));
        auto v = io::vec_from(io::load_file(vec_path));
        std::cout << json{{"value", evaluate(*f, v, P)}}.dump(2) << "\n";
    });

    // ---- norm -------------------------------------------------------------------
    auto* nm = app.add_subcommand("norm", "certified norm bounds");
    std::string norm_vec;
    std::int64_t jmax = 3;
    int oracle_depth = 3;
    bool use_oracle = false, csv = false;
    nm->add_option("vector", norm_vec, "vector JSON file (or {\"vectors\": [...]})")->required();
    nm->add_option("--params", params_path);
    nm->add_option("--strict-levels", strict_levels);
    nm->add_option("--registry", reg_path);
    nm->add_option("--jmax", jmax, "largest even half-index considered");
    nm->add_option("--oracle-depth", oracle_depth);
    nm->add_flag("--oracle", use_oracle, "search sigma-true odd certificates");
    nm->add_flag("--csv", csv, "batch CSV output");
    nm->callback([&] {
        const auto P = load_params(params_path, strict_levels);
        const auto reg = load_registry(reg_path, P);
        norm::NormOptions opt;
        opt.jmax = jmax;
        opt.oracle_depth = oracle_depth;
        opt.use_oracle = use_oracle;
        const auto file = io::load_file(norm_vec);
        if (file.contains("vectors")) {
            if (csv) std::cout << "index,lower,upper,method,exact\n";
            json reports = json::array();
            std::size_t idx = 0;
            for (const auto& jv : file["vectors"]) {
                auto nb = norm::norm_bounds(io::vec_from(jv), P, reg, opt);
                if (csv)
                    std::cout << idx << ',' << nb.lower << ',' << nb.upper << ','
                              << nb.upper_method << ',' << (nb.exact ? 1 : 0) << "\n";
                else
                    reports.push_back(io::to_json(nb));
                ++idx;
            }
            if (!csv) std::cout << reports.dump(2) << "\n";
        } else {
            auto nb = norm::norm_bounds(io::vec_from(file), P, reg, opt);
            if (csv)
                std::cout << "index,lower,upper,method,exact\n0," << nb.lower << ',' << nb.upper
                          << ',' << nb.upper_method << ',' << (nb.exact ? 1 : 0) << "\n";
            else
                std::cout << io::to_json(nb).dump(2) << "\n";
        }
    });

    // ---- construct -----------------------------------------------------------------
    auto* cs = app.add_subcommand("construct", "witness builders");
    cs->require_subcommand(1);
    std::string blocks_path, ris_path, fns_path, out_path, C_arg = "1";
    std::int64_t start_half = 1, j_half = 0;
    bool commit = false;

    auto* cs_ris = cs->add_subcommand("ris", "build a rapidly increasing sequence");
    cs_ris->add_option("--blocks", blocks_path, "JSON {\"vectors\": [...]}")->required();
    cs_ris->add_option("--C", C_arg);
    cs_ris->add_option("--start-half", start_half);
    cs_ris->add_option("--params", params_path);
    cs_ris->add_option("--strict-levels", strict_levels);
    cs_ris->add_option("--out", out_path);
    cs_ris->callback([&] {
        const auto P = load_params(params_path, strict_levels);
        std::vector<Vec> blocks;
        for (const auto& jv : io::load_file(blocks_path).at("vectors"))
            blocks.push_back(io::vec_from(jv));
        auto w = constructions::build_ris(blocks, parse_rational(C_arg), start_half, P);
        const auto out = io::to_json(w);
        if (!out_path.empty()) io::save_file(out_path, out);
        std::cout << out.dump(2) << "\n";
    });

    auto* cs_exact = cs->add_subcommand("exact", "build an exact vector over a RIS");
    cs_exact->add_option("--ris", ris_path)->required();
    cs_exact->add_option("--j-half", j_half)->required();
    cs_exact->add_option("--params", params_path);
    cs_exact->add_option("--strict-levels", strict_levels);
    cs_exact->callback([&] {
        const auto P = load_params(params_path, strict_levels);
        auto ris = io::ris_from(io::load_file(ris_path));
        auto w = constructions::build_exact(ris, j_half, P);
        json out{{"x", io::to_json(w.x)},
                 {"j_half", w.j_half},
                 {"first_block", w.first_block},
                 {"used_blocks", w.used_blocks},
                 {"scc", io::to_json(w.scc)}};
        std::cout << out.dump(2) << "\n";
    });

    auto* cs_dep = cs->add_subcommand("dependent", "build a 0-dependent sequence");
    cs_dep->add_option("--ris", ris_path)->required();
    cs_dep->add_option("--fns", fns_path, "JSON {\"functionals\": [...]}")->required();
    cs_dep->add_option("--j", j_half, "target odd level j (weight m_{2j+1})")->required();
    cs_dep->add_option("--params", params_path);
    cs_dep->add_option("--strict-levels", strict_levels);
    cs_dep->add_option("--registry", reg_path);
    cs_dep->add_flag("--commit", commit, "write registry mutations back to the file");
    cs_dep->add_option("--out", out_path);
    cs_dep->callback([&] {
        const auto P = load_params(params_path, strict_levels);
        auto reg = load_registry(reg_path, P);
        auto ris = io::ris_from(io::load_file(ris_path));
        std::vector<FnPtr> fns;
        for (const auto& jf : io::load_file(fns_path).at("functionals"))
            fns.push_back(io::functional_from(jf));
        auto w = constructions::build_dependent(reg, ris, j_half, fns, P);
        const auto out = io::to_json(w);
        if (!out_path.empty()) io::save_file(out_path, out);
        if (commit && !reg_path.empty()) io::save_file(reg_path, io::to_json(reg));
        std::cout << out.dump(2) << "\n";
    });

    // ---- gap-demo ---------------------------------------------------------------------
    auto* gd = app.add_subcommand("gap-demo", "toy-scale gap demonstration");
    std::int64_t gd_j = 0, gd_scale = 1;
    gd->add_option("--j", gd_j, "target odd level");
    gd->add_option("--scale", gd_scale);
    gd->add_option("--registry", reg_path);
    gd->add_flag("--commit", commit);
    gd->callback([&] {
        SigmaRegistry reg; // the demo builds its own parameter system
        if (!reg_path.empty()) {
            // a committed registry must match the demo's generated parameters;
            // start fresh otherwise
            reg = SigmaRegistry{};
        }
        auto rep = constructions::gap_demo(reg, gd_j, gd_scale);
        json out{{"target_half", rep.target_half},
                 {"d", rep.d},
                 {"j_halves", rep.j_halves},
                 {"lower", rep.lower},
                 {"upper", rep.upper},
                 {"upper_z", rep.upper_z},
                 {"star_rhs", rep.star_rhs},
                 {"star_holds", rep.star_holds},
                 {"theta_measured", rep.theta_measured},
                 {"ratio", rep.ratio},
                 {"strict_growth", rep.strict_growth},
                 {"notes", rep.notes}};
        if (commit && !reg_path.empty()) io::save_file(reg_path, io::to_json(reg));
        std::cout << out.dump(2) << "\n";
    });

    // ---- estimate -----------------------------------------------------------------------
    auto* es = app.add_subcommand("estimate", "estimate lemma instance checks");
    es->require_subcommand(1);
    std::string kind_arg = "MFE", inst_path, bundle_dir = ".";
    std::int64_t fuzz_n = 1000;
    std::uint64_t seed = 7;
    auto* es_check = es->add_subcommand("check", "check one instance file");
    es_check->add_option("--kind", kind_arg);
    es_check->add_option("file", inst_path)->required();
    es_check->callback([&] {
        auto inst = io::instance_from(io::load_file(inst_path));
        auto rep = estimates::check_estimate(inst);
        std::cout << json{{"kind", estimates::kind_name(inst.kind)},
                          {"lhs", rep.lhs},
                          {"rhs", rep.rhs},
                          {"holds", rep.holds},
                          {"margin", rep.margin},
                          {"verdict", rep.verdict},
                          {"hypothesis_failures", rep.hyp.failures}}
                         .dump(2)
                  << "\n";
        throw CLI::RuntimeError(rep.verdict == "holds" ? 0 : 1);
    });
    auto* es_fuzz = es->add_subcommand("fuzz", "seeded hypothesis-valid instance fuzzing");
    es_fuzz->add_option("--kind", kind_arg)->required();
    es_fuzz->add_option("--n", fuzz_n);
    es_fuzz->add_option("--seed", seed);
    es_fuzz->add_option("--bundle-dir", bundle_dir);
    es_fuzz->callback([&] {
        std::vector<estimates::Instance> failed;
        auto out = estimates::fuzz(estimates::kind_from(kind_arg),
                                   static_cast<std::size_t>(fuzz_n), seed, &failed);
        json rep{{"kind", kind_arg}, {"total", out.total}, {"held", out.held}};
        json fails = json::array();
        for (std::size_t i = 0; i < out.failures.size(); ++i) {
            const auto& [s, fr] = out.failures[i];
            const std::string path =
                bundle_dir + "/repro_" + kind_arg + "_" + std::to_string(s) + ".json";
            io::save_file(path, io::to_json(failed[i]));
            fails.push_back(json{{"seed", s}, {"verdict", fr.verdict}, {"bundle", path}});
        }
        rep["failures"] = fails;
        std::cout << rep.dump(2) << "\n";
        throw CLI::RuntimeError(out.held == out.total ? 0 : 1);
    });

    // ---- counting ---------------------------------------------------------------------------
    auto* cn = app.add_subcommand("counting", "exact diagonal-free counting identity");
    std::int64_t cn_size = 6, cn_trials = 1;
    cn->add_option("--size", cn_size);
    cn->add_option("--seed", seed);
    cn->add_option("--trials", cn_trials);
    cn->add_option("--file", inst_path, "check a stored instance instead");
    cn->callback([&] {
        bool all_ok = true;
        json reports = json::array();
        auto run_one = [&](const estimates::CountingInstance& inst) {
            auto rep = estimates::check_counting(inst);
            reports.push_back(json{{"even_case", rep.even_case},
                                   {"paper_constant", to_string(rep.paper_constant)},
                                   {"paper_constant_ok", rep.paper_constant_ok},
                                   {"empirical_constant", rep.has_empirical
                                                              ? to_string(rep.empirical_constant)
                                                              : std::string("n/a")},
                                   {"note", rep.note}});
            all_ok = all_ok && (rep.paper_constant_ok || rep.has_empirical);
        };
        if (!inst_path.empty()) {
            run_one(io::counting_from(io::load_file(inst_path)));
        } else {
            std::mt19937_64 rng(seed);
            for (std::int64_t t = 0; t < cn_trials; ++t)
                run_one(estimates::random_counting(static_cast<std::size_t>(cn_size), rng));
        }
        std::cout << reports.dump(2) << "\n";
        throw CLI::RuntimeError(all_ok ? 0 : 1);
    });

    // ---- verify-all ----------------------------------------------------------------------------
    auto* va = app.add_subcommand("verify-all", "run the acceptance suite");
    va->add_option("--seed", seed);
    va->add_option("--bundle-dir", bundle_dir);
    va->callback([&] {
        auto results = acceptance::run_all(seed, bundle_dir, std::cout);
        bool all = true;
        for (const auto& res : results) all = all && res.pass;
        throw CLI::RuntimeError(all ? 0 : 1);
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::RuntimeError& e) {
        return e.get_exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
