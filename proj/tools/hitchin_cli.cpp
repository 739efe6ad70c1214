#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hitchin/flows.hpp"

namespace {

using hitchin::BadInput;
using hitchin::CheckReport;
using hitchin::Rational;

// Everything the three commands read; flags left at their zero value mean
// "use the per-check default" so the report can echo exactly what was asked.
struct RunConfig {
    int genus = 0;            // 0 = every supported genus
    int trials = 0;           // 0 = per-check default (20 two-point / 10 three-point)
    unsigned long seed = 7;
    long bound = 0;           // 0 = per-check default sampling bound
    int nodes = 0;            // 0 = node counts 2..6 for the interpolation checks
    std::string p1;           // empty = the default p_1 = 0
    bool mirror = false;      // also exercise the mirrored grouping
    int eps_order = 0;        // 0 = library default expansion budget
    std::string point_path;   // replay a recorded phase point instead of sampling
    std::string out_path;     // report / trajectory destination
    std::string dx_factor;    // weight rescaling for the Hamiltonian evaluator
    std::string scenario;     // integrate: initial-condition family
    double t1 = 1.0;          // integrate: end time
    int steps = 10000;        // integrate: RK4 step count
};

hitchin::PhasePoint load_point(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open point file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw BadInput("point file " + path + " is not valid JSON: " + e.what());
    }
    return hitchin::point_from_json(j);
}

void print_check_line(const CheckReport& rep) {
    std::cout << (rep.pass ? "pass  " : "FAIL  ") << rep.check;
    if (rep.genus > 0) std::cout << "  genus=" << rep.genus;
    if (rep.n > 0) std::cout << "  n=" << rep.n;
    std::cout << "  trials=" << rep.trials;
    for (const char* key : {"sigma", "sigma_H"})
        if (const auto it = rep.recorded.find(key); it != rep.recorded.end())
            std::cout << "  " << key << "=" << it->second;
    std::cout << "\n";
    std::size_t shown = 0;
    for (const std::string& line : rep.failures) {
        if (shown == 3) {
            std::cout << "        ... " << rep.failures.size() - shown << " more\n";
            break;
        }
        std::cout << "        " << line << "\n";
        ++shown;
    }
}

int run_verify(const std::string& target, const RunConfig& cfg) {
    const long rb = cfg.bound > 0 ? cfg.bound : 100;  // locus sampling bound
    const long nb = cfg.bound > 0 ? cfg.bound : 50;   // interpolation-node bound
    const auto tr = [&cfg](int def) { return cfg.trials > 0 ? cfg.trials : def; };
    const bool all = target == "all";
    std::vector<CheckReport> checks;

    if (!cfg.point_path.empty()) {
        if (!all && target != "admissibility" && target != "reduced-hamiltonian" &&
            target != "factorization" && target != "relations")
            throw BadInput("--point replays the locus identities; pick a reduction target or 'all'");
        checks.push_back(hitchin::replay_point(load_point(cfg.point_path), cfg.mirror));
    } else {
        if (cfg.genus != 0 && cfg.genus != 2 && cfg.genus != 3 && cfg.genus != 4)
            throw BadInput("--genus must be 2 or 3 (4 for the conjecture probe)");
        if (cfg.genus == 4 && !all && target != "conjecture")
            throw BadInput("genus 4 is covered by the conjecture probe only");
        const bool g2 = cfg.genus == 0 || cfg.genus == 2;
        const bool g3 = cfg.genus == 0 || cfg.genus == 3;
        const bool g4 = cfg.genus == 0 || cfg.genus == 4;
        if (all || target == "lagrange") {
            std::vector<int> ns;
            if (cfg.nodes > 0)
                ns.push_back(cfg.nodes);
            else
                for (int n = 2; n <= 6; ++n) ns.push_back(n);
            for (const int n : ns) {
                checks.push_back(hitchin::involution_check(n, tr(50), cfg.seed, nb));
                checks.push_back(hitchin::gradient_relation_check(n, tr(20), cfg.seed, nb));
            }
        }
        if (all || target == "admissibility") {
            if (g2) {
                checks.push_back(hitchin::check_admissibility(2, tr(20), cfg.seed, false, rb));
                if (cfg.mirror) checks.push_back(hitchin::check_admissibility(2, tr(20), cfg.seed, true, rb));
            }
            if (g3) {
                checks.push_back(hitchin::check_admissibility(3, tr(10), cfg.seed, false, rb));
                if (cfg.mirror) checks.push_back(hitchin::check_admissibility(3, tr(10), cfg.seed, true, rb));
            }
        }
        if (all || target == "reduced-hamiltonian") {
            if (g2) {
                checks.push_back(hitchin::check_reduced_hamiltonian(2, tr(20), cfg.seed, rb));
                checks.push_back(hitchin::check_vector_field(tr(20), cfg.seed, rb));
            }
            if (g3) checks.push_back(hitchin::check_reduced_hamiltonian(3, tr(10), cfg.seed, rb));
        }
        if (all || target == "factorization") {
            const Rational p1 = cfg.p1.empty() ? Rational(0) : hitchin::rat_parse(cfg.p1);
            if (cfg.genus == 3 && p1 != 0)
                throw BadInput("only the genus-2 reduction admits a free p_1");
            // A nonzero p_1 needs the p_1 = 0 pass first: it anchors the sign
            // before the shifted claim is examined and measured.
            const std::vector<Rational> p1s =
                p1 == 0 ? std::vector<Rational>{Rational(0)} : std::vector<Rational>{Rational(0), p1};
            if (g2) checks.push_back(hitchin::check_factorization(2, tr(20), cfg.seed, p1s, rb));
            if (g3) checks.push_back(hitchin::check_factorization(3, tr(10), cfg.seed, {Rational(0)}, rb));
        }
        if (all || target == "relations") {
            if (g2) checks.push_back(hitchin::check_relations(2, tr(20), cfg.seed, rb));
            if (g3) checks.push_back(hitchin::check_relations(3, tr(10), cfg.seed, rb));
        }
        if (all || target == "conjecture") {
            if (g2) checks.push_back(hitchin::conjecture_probe(2, tr(20), cfg.seed, {}, rb));
            if (g3) checks.push_back(hitchin::conjecture_probe(3, tr(10), cfg.seed, {}, rb));
            if (g4) checks.push_back(hitchin::conjecture_probe(4, tr(3), cfg.seed, {}, rb));
        }
    }

    bool ok = true;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CheckReport& rep : checks) {
        ok = ok && rep.pass;
        arr.push_back(hitchin::report_json(rep));
        print_check_line(rep);
    }
    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "verify";
    doc["target"] = target;
    doc["config"] = {{"genus", cfg.genus},   {"trials", cfg.trials}, {"seed", cfg.seed},
                     {"bound", cfg.bound},   {"n", cfg.nodes},       {"p1", cfg.p1.empty() ? "0" : cfg.p1},
                     {"mirror", cfg.mirror}, {"eps_order", cfg.eps_order}, {"point", cfg.point_path}};
    doc["checks"] = arr;
    doc["verdict"] = ok ? "pass" : "fail";
    const std::string path = cfg.out_path.empty() ? "report.json" : cfg.out_path;
    {
        std::ofstream out(path);
        if (!out) throw BadInput("cannot write report to " + path);
        out << doc.dump(2) << "\n";
    }
    std::cout << "report: " << path << " (verdict: " << (ok ? "pass" : "fail") << ")\n";
    return ok ? 0 : 1;
}

int run_hamiltonian(const RunConfig& cfg) {
    hitchin::PhasePoint pt;
    if (!cfg.point_path.empty()) {
        pt = load_point(cfg.point_path);
        if (cfg.genus != 0 && cfg.genus != pt.genus)
            throw BadInput("--genus disagrees with the genus of the replayed point");
    } else {
        const int genus = cfg.genus == 0 ? 2 : cfg.genus;
        if (genus != 2 && genus != 3)
            throw BadInput("the reduced Hamiltonian evaluator covers genus 2 and 3");
        const hitchin::ConstraintSet cs = hitchin::builtin_reduction(genus, cfg.mirror);
        std::mt19937_64 rng(cfg.seed);
        const long bound = cfg.bound > 0 ? cfg.bound : 100;
        if (cfg.p1.empty()) {
            pt = hitchin::sample_reduced(cs, rng, bound);
        } else {
            if (genus == 3 && hitchin::rat_parse(cfg.p1) != 0)
                throw BadInput("only the genus-2 reduction admits a free p_1");
            const std::map<int, Rational> over{{1, hitchin::rat_parse(cfg.p1)}};
            pt = hitchin::sample_reduced(cs, rng, bound, &over);
        }
    }
    const hitchin::ConstraintSet cs = hitchin::builtin_reduction(pt.genus, cfg.mirror);
    hitchin::HamiltonianSpec spec;
    if (!cfg.dx_factor.empty()) spec.dx_factor = hitchin::rat_parse(cfg.dx_factor);
    const hitchin::VectorField vf = hitchin::hamiltonian_vector_field(hitchin::bind_reduced(pt, cs), spec);

    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "hamiltonian";
    doc["genus"] = pt.genus;
    doc["locus"] = cs.label;
    doc["seed"] = cfg.seed;
    doc["dx_factor"] = cfg.dx_factor.empty() ? "1" : cfg.dx_factor;
    doc["H"] = hitchin::rat_str(vf.H.value());
    nlohmann::ordered_json flow = nlohmann::ordered_json::object();
    for (const auto& [v, val] : vf.comp) flow[hitchin::var_name(v)] = hitchin::rat_str(val);
    doc["flow"] = flow;
    doc["point"] = hitchin::to_json(pt);
    if (cfg.out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(cfg.out_path);
        if (!out) throw BadInput("cannot write " + cfg.out_path);
        out << doc.dump(2) << "\n";
        std::cout << "wrote " << cfg.out_path << "\n";
    }
    return 0;
}

int run_integrate(const RunConfig& cfg) {
    const hitchin::FlowScenario sc = hitchin::make_flow_scenario(cfg.scenario);
    const hitchin::Trajectory tr = hitchin::integrate(sc, cfg.t1, cfg.steps);
    const std::string path = cfg.out_path.empty() ? "trajectory.csv" : cfg.out_path;
    {
        std::ofstream out(path);
        if (!out) throw BadInput("cannot write " + path);
        hitchin::write_trajectory_csv(out, sc, tr);
    }
    std::cout << "wrote " << path << ": " << tr.states.size() << " samples";
    if (!tr.complete) std::cout << " (partial: " << tr.stop_reason << ")";
    std::cout << "\n";
    return tr.complete ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact verification and flow integration for two-group spectral reductions"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string target;

    const auto add_sampling = [&cfg](CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "Base RNG seed (HITCHIN_SEED overrides)");
        cmd->add_option("--bound", cfg.bound, "Numerator bound for sampled rationals")->check(CLI::PositiveNumber);
        cmd->add_option("--genus", cfg.genus, "Restrict to one genus")->check(CLI::Range(2, 4));
        cmd->add_option("--p1", cfg.p1, "Value of the curve coefficient p_1 (genus 2; default 0)");
        cmd->add_flag("--mirror", cfg.mirror, "Use the mirrored point grouping as well");
        cmd->add_option("--point", cfg.point_path, "Replay a recorded phase point (JSON file)");
        cmd->add_option("--eps-order", cfg.eps_order, "Coefficient budget for one-sided expansions")
            ->check(CLI::Range(1, 64));
    };

    CLI::App* ver = app.add_subcommand("verify", "Run exact identity checks and write a JSON report");
    ver->add_option("target", target, "lagrange|admissibility|reduced-hamiltonian|factorization|relations|conjecture|all")
        ->required()
        ->check(CLI::IsMember({"lagrange", "admissibility", "reduced-hamiltonian", "factorization",
                               "relations", "conjecture", "all"}));
    ver->add_option("--trials", cfg.trials, "Trials per check (default 20 two-point, 10 three-point)")
        ->check(CLI::PositiveNumber);
    ver->add_option("--n", cfg.nodes, "Single node count for the interpolation checks (default 2..6)")
        ->check(CLI::Range(2, 8));
    add_sampling(ver);
    ver->add_option("--out", cfg.out_path, "Report path (default report.json)");

    CLI::App* ham = app.add_subcommand("hamiltonian", "Evaluate the reduced Hamiltonian and its flow at one point");
    add_sampling(ham);
    ham->add_option("--dx-factor", cfg.dx_factor, "Rational rescaling of the residue weight");
    ham->add_option("--out", cfg.out_path, "Write the JSON here instead of stdout");

    CLI::App* itg = app.add_subcommand("integrate", "Integrate a flow scenario and dump the trajectory CSV");
    itg->add_option("--scenario", cfg.scenario,
                    "g2-generic|g2-linear-kappa|g3-generic|g3-equal-kappa")
        ->required();
    itg->add_option("--t1", cfg.t1, "End time (start is 0)");
    itg->add_option("--steps", cfg.steps, "RK4 step count")->check(CLI::PositiveNumber);
    itg->add_option("--out", cfg.out_path, "CSV path (default trajectory.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (const char* env = std::getenv("HITCHIN_SEED")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0') {
            std::cerr << "usage error: HITCHIN_SEED must be an unsigned integer\n";
            return 2;
        }
        cfg.seed = v;
    }

    try {
        std::optional<hitchin::EpsBudgetGuard> budget;
        if (cfg.eps_order > 0) budget.emplace(cfg.eps_order);
        if (ver->parsed()) return run_verify(target, cfg);
        if (ham->parsed()) return run_hamiltonian(cfg);
        return run_integrate(cfg);
    } catch (const BadInput& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
