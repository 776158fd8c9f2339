// belleff: exact lower bounds on communication cost for conditional
// distributions, certificate extraction/verification, the hidden-matching
// construction, and protocol reductions. See README.md for the formats.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "belleff/bounds.hpp"
#include "belleff/certificates.hpp"
#include "belleff/config.hpp"
#include "belleff/dist.hpp"
#include "belleff/hidden_matching.hpp"
#include "belleff/json_io.hpp"
#include "belleff/protocol.hpp"
#include "belleff/quantum.hpp"

using namespace belleff;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out << text;
}

Dist load_dist(const std::string& path) { return dist_from_json(parse_json_text(read_file(path))); }

/// Emit a document: canonical JSON under --json, flat "key: value" lines
/// otherwise (rationals get an approximate decimal alongside).
void emit(const Json& doc, bool as_json) {
    if (as_json) {
        std::cout << canonical_dump(doc);
        return;
    }
    for (const auto& [key, value] : doc.items()) {
        std::cout << key << ": ";
        if (value.is_string()) {
            const std::string s = value.get<std::string>();
            std::cout << s;
            if (s.find('/') != std::string::npos) {
                try {
                    std::cout << " (~" << to_double(parse_rat(s)) << ")";
                } catch (const input_error&) {
                }
            }
        } else {
            std::cout << value.dump();
        }
        std::cout << "\n";
    }
}

void put_rat(Json& doc, const char* key, const Rat& r) { doc[key] = rat_to_string(r); }

/// Shared flag bundle for the bound-computing commands.
struct BoundArgs {
    std::string dist_path;
    std::string eps, eta;  // parsed lazily so exact rationals survive
    bool colgen = false;
    long long cap = 0;  // 0: keep the config default
    bool as_json = false;
};

void add_bound_flags(CLI::App* cmd, BoundArgs& a, bool with_dist = true) {
    if (with_dist)
        cmd->add_option("-p,--dist", a.dist_path, "distribution JSON file")->required();
    cmd->add_option("--eps", a.eps, "slack parameter (rational, e.g. 1/4)");
    cmd->add_option("--eta", a.eta, "acceptance floor (rational in (0,1])");
    cmd->add_flag("--colgen", a.colgen, "solve by column generation");
    cmd->add_option("--cap", a.cap, "enumeration cap override");
    cmd->add_flag("--json", a.as_json, "print the report as canonical JSON");
}

BoundOptions bound_options(const BoundArgs& a, const Config& cfg) {
    BoundOptions opt;
    opt.cap = a.cap > 0 ? a.cap : cfg.cap;
    opt.column_generation = a.colgen;
    return opt;
}

BoundResult compute_bound(const std::string& name, const Dist& p, const BoundArgs& a,
                          const BoundOptions& opt) {
    auto need = [&](const std::string& flag, const std::string& raw) {
        if (raw.empty()) throw input_error(name + " requires --" + flag);
        return parse_rat(raw);
    };
    if (name == "eff") return eff_bound(p, opt);
    if (name == "eff-eps") return eff_eps_bound(p, need("eps", a.eps), opt);
    if (name == "eff-eta") return eff_eta_bound(p, need("eta", a.eta), opt);
    if (name == "eff-nc") return eff_nc_bound(p, opt);
    if (name == "eff-oneway") return eff_oneway_bound(p, opt);
    if (name == "nu") return nu_bound(p, opt);
    if (name == "prt") return prt_direct_bound(p, a.eta.empty() ? Rat(1) : parse_rat(a.eta), opt);
    if (name == "prt-via-eff") return prt_via_eff(p, opt);
    throw input_error("unknown bound \"" + name +
                      "\"; expected eff, eff-eps, eff-eta, eff-nc, eff-oneway, nu, prt, "
                      "prt-via-eff, or prt-fn");
}

Json bound_report(const BoundResult& r) {
    Json doc;
    doc["bound"] = r.bound_name;
    doc["finite"] = r.finite;
    if (r.finite) put_rat(doc, "value", r.bound_value);
    if (r.zeta) put_rat(doc, "zeta", *r.zeta);
    doc["strategies"] = r.weights.size();
    if (r.colgen_rounds > 0) doc["colgen_rounds"] = r.colgen_rounds;
    doc["lp_iterations"] = r.solution.iterations;
    return doc;
}

int cmd_dist_build(const std::string& kind, int n, const std::vector<int>& table, int nx, int ny,
                   int na, int nb, const std::string& out, const Config& cfg, long long cap) {
    HmOptions hopt;
    hopt.entry_cap = cap > 0 ? cap : cfg.cap;
    hopt.scale_rel_tol = cfg.scale_rel_tol;
    Dist d = [&] {
        if (kind == "pr") return pr_box();
        if (kind == "pf") {
            if (table.empty()) throw input_error("pf requires --table");
            return from_boolean_function(table, nx, ny);
        }
        if (kind == "uniform") return uniform_dist(nx, ny, na, nb);
        if (kind == "hm") return hm_distribution(n, hopt);
        if (kind == "quantum") return from_quantum(hm_quantum_setup(n, hopt));
        throw input_error("unknown construction \"" + kind +
                          "\"; expected pr, pf, uniform, hm, or quantum");
    }();
    const std::string text = canonical_dump(dist_to_json(d));
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
        std::cout << "wrote " << out << " (nx=" << d.nx() << " ny=" << d.ny() << " na=" << d.na()
                  << " nb=" << d.nb() << ")\n";
    }
    return 0;
}

int cmd_dist_check(const std::string& path, bool as_json) {
    const RawDist raw = raw_dist_from_json(parse_json_text(read_file(path)));
    const RawDistReport rep = check_raw_dist(raw);
    Json doc;
    doc["well_formed"] = true;
    doc["nonnegative"] = rep.nonnegative;
    doc["normalized"] = rep.normalized;
    doc["nonsignaling"] = rep.nonsignaling;
    doc["shape"] = Json::array({raw.nx(), raw.ny(), raw.na(), raw.nb()});
    doc["problems"] = rep.problems;
    emit(doc, as_json);
    return 0;  // diagnostics only: a signaling file is still a readable file
}

int cmd_bound(const std::string& name, const BoundArgs& a, const Config& cfg) {
    const BoundResult r = compute_bound(name, load_dist(a.dist_path), a, bound_options(a, cfg));
    emit(bound_report(r), a.as_json);
    return 0;
}

int cmd_bound_fn(const std::vector<int>& table, int nx, int ny, int nz, const BoundArgs& a,
                 const Config& cfg) {
    const Rat eps = a.eps.empty() ? Rat(0) : parse_rat(a.eps);
    const PartitionFnResult r = prt_function_bound(table, nx, ny, nz, eps, bound_options(a, cfg));
    Json doc;
    doc["bound"] = r.bound_name;
    put_rat(doc, "value", r.bound_value);
    Json rects = Json::array();
    for (const auto& w : r.weights)
        rects.push_back(Json{{"x_mask", w.x_mask},
                             {"y_mask", w.y_mask},
                             {"z", w.z},
                             {"weight", rat_to_string(w.weight)}});
    doc["rectangles"] = std::move(rects);
    doc["lp_iterations"] = r.solution.iterations;
    emit(doc, a.as_json);
    return 0;
}

int cmd_cert_extract(const std::string& name, const BoundArgs& a, const std::string& out,
                     const Config& cfg) {
    const BoundResult r = compute_bound(name, load_dist(a.dist_path), a, bound_options(a, cfg));
    if (!r.certificate)
        throw input_error(name + " does not carry a certificate at these parameters");
    const Certificate cert = extract_certificate(r, r.certificate->kind);
    const std::string text = canonical_dump(certificate_to_json(cert));
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
        std::cout << "wrote " << out << " (kind=" << cert_kind_name(cert.kind)
                  << " claimed=" << rat_to_string(cert.claimed_value) << ")\n";
    }
    return 0;
}

int cmd_cert_verify(const std::string& cert_path, const std::string& dist_path, long long cap,
                    bool as_json, const Config& cfg) {
    const Certificate cert = certificate_from_json(parse_json_text(read_file(cert_path)));
    const Dist p = load_dist(dist_path);
    const VerifyReport rep = verify_certificate(cert, p, cap > 0 ? cap : cfg.verify_cap);
    Json doc;
    doc["kind"] = cert_kind_name(cert.kind);
    put_rat(doc, "claimed_value", cert.claimed_value);
    put_rat(doc, "value_on_dist", rep.value_on_dist);
    put_rat(doc, "strategy_max", rep.strategy_max);
    if (cert.kind == CertKind::normalized) put_rat(doc, "strategy_min", rep.strategy_min);
    doc["normalization_ok"] = rep.normalization_ok;
    doc["value_ok"] = rep.value_ok;
    doc["valid"] = rep.valid;
    doc["evaluated_terms"] = rep.evaluated_terms.str();
    doc["detail"] = rep.detail;
    emit(doc, as_json);
    return rep.valid ? 0 : 2;
}

int cmd_hm_bell(int n, const Rat& C, const std::string& out, const Config& cfg, long long cap) {
    HmOptions hopt;
    hopt.entry_cap = cap > 0 ? cap : cfg.cap;
    hopt.scale_rel_tol = cfg.scale_rel_tol;
    const BellFunctional f = hm_bell(n, C, hopt);
    const Rat claimed = hm_scale(n, C, hopt.scale_rel_tol) / (2 * n);
    const Certificate cert{CertKind::inefficiency_resistant, f, claimed};
    const std::string text = canonical_dump(certificate_to_json(cert));
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
        std::cout << "wrote " << out << " (claimed=" << rat_to_string(claimed) << ")\n";
    }
    return 0;
}

int cmd_hm_objective(int n, const Rat& C, bool as_json, const Config& cfg, long long cap) {
    HmOptions hopt;
    hopt.entry_cap = cap > 0 ? cap : cfg.cap;
    hopt.scale_rel_tol = cfg.scale_rel_tol;
    const HmObjective r = hm_objective_check(n, C, hopt);
    Json doc;
    put_rat(doc, "computed", r.computed);
    put_rat(doc, "closed_form", r.closed_form);
    doc["equal"] = r.equal;
    put_rat(doc, "scale", r.scale);
    doc["support_entries"] = r.support_entries;
    emit(doc, as_json);
    return r.equal ? 0 : 2;
}

int cmd_hm_scan(int n, const Rat& C, const std::vector<int>& grid, bool as_json,
                const Config& cfg, long long cap) {
    HmOptions hopt;
    hopt.entry_cap = cap > 0 ? cap : cfg.cap;
    hopt.scale_rel_tol = cfg.scale_rel_tol;
    const HmScan r = hm_constraint_scan(n, C, grid, hopt);
    Json doc;
    put_rat(doc, "max_value", r.max_value);
    doc["le_one"] = r.le_one;
    doc["maps_scanned"] = r.maps_scanned;
    doc["grid"] = r.grid;
    Json bob = Json::array();
    for (const auto& [d, i, j] : r.bob_witness)
        bob.push_back(std::to_string(d) + ":" + std::to_string(i) + "-" + std::to_string(j));
    doc["bob_witness"] = std::move(bob);
    Json alice = Json::array();
    for (int v : r.alice_witness) alice.push_back(v == kAbort ? Json("bot") : Json(v));
    doc["alice_witness"] = std::move(alice);
    emit(doc, as_json);
    return r.le_one ? 0 : 2;
}

int cmd_hm_fourier(int n, const std::vector<unsigned long long>& subset, bool as_json) {
    Json doc;
    put_rat(doc, "mass", degree2_fourier_mass(subset, n));
    doc["subset_size"] = subset.size();
    emit(doc, as_json);
    return 0;
}

int cmd_sim_reduce(const std::string& proto_path, const std::string& out, bool as_json) {
    const MixedProtocol mp = protocol_from_json(parse_json_text(read_file(proto_path)));
    const ReductionResult r = transcript_reduction(mp);
    Json doc;
    doc["class"] = strategy_class_name(r.cls);
    put_rat(doc, "zeta", r.zeta);
    doc["strategies"] = r.weights.size();
    if (!out.empty()) {
        write_file(out, canonical_dump(dist_to_json(r.conditional)));
        doc["conditional_written_to"] = out;
    }
    emit(doc, as_json);
    return 0;
}

int cmd_sim_partition(const std::string& proto_path, bool as_json) {
    const MixedProtocol mp = protocol_from_json(parse_json_text(read_file(proto_path)));
    const PartitionEmbedding r = protocol_to_partition(mp);
    Json doc;
    put_rat(doc, "total_weight", r.total_weight);
    doc["strategies"] = r.weights.size();
    doc["feasible"] = true;  // protocol_to_partition re-checks by substitution
    emit(doc, as_json);
    return 0;
}

int cmd_sim_amplify(const std::string& zeta, const std::string& eta, int na, int nb,
                    bool as_json) {
    const Amplification r = amplify_sm(parse_rat(zeta), parse_rat(eta), na, nb);
    Json doc;
    doc["repetitions"] = r.repetitions;
    put_rat(doc, "abort_prob", r.abort_prob);
    doc["implied_bits"] = r.implied_bits;
    emit(doc, as_json);
    return 0;
}

int cmd_sim_mc(const std::string& proto_path, long long samples, std::uint64_t seed,
               bool as_json) {
    const MixedProtocol mp = protocol_from_json(parse_json_text(read_file(proto_path)));
    const ReductionResult r = transcript_reduction(mp);
    const MonteCarloReport rep = monte_carlo_check(r.weights, r.conditional, r.zeta, samples, seed);
    Json doc;
    doc["samples_per_input"] = rep.samples_per_input;
    doc["seed"] = seed;
    doc["max_l1"] = static_cast<double>(rep.max_l1);
    doc["l1_tolerance"] = static_cast<double>(rep.l1_tolerance);
    doc["max_abort_dev"] = static_cast<double>(rep.max_abort_dev);
    doc["abort_tolerance"] = static_cast<double>(rep.abort_tolerance);
    doc["conditional_ok"] = rep.conditional_ok;
    doc["abort_ok"] = rep.abort_ok;
    doc["ok"] = rep.ok;
    emit(doc, as_json);
    return rep.ok ? 0 : 2;
}

int run(int argc, char** argv) {
    const Config cfg = config_from_env();
    int rc = 0;

    CLI::App app{"exact communication lower bounds for conditional distributions"};
    app.require_subcommand(1);

    // ---- dist ----
    auto* dist = app.add_subcommand("dist", "build and inspect distribution files");
    dist->require_subcommand(1);
    {
        auto* build = dist->add_subcommand("build", "write a named construction");
        static std::string kind, out;
        static int n = 4, nx = 2, ny = 2, na = 2, nb = 2;
        static long long cap = 0;
        static std::vector<int> table;
        build->add_option("kind", kind, "pr | pf | uniform | hm | quantum")->required();
        build->add_option("-n", n, "hidden-matching size (power of two)");
        build->add_option("--table", table, "pf truth table, row-major over (x,y)")
            ->delimiter(',');
        build->add_option("--nx", nx, "number of x inputs");
        build->add_option("--ny", ny, "number of y inputs");
        build->add_option("--na", na, "number of a outputs (uniform)");
        build->add_option("--nb", nb, "number of b outputs (uniform)");
        build->add_option("--cap", cap, "entry cap override");
        build->add_option("-o,--out", out, "output file (default: stdout)");
        build->callback([&]() { rc = cmd_dist_build(kind, n, table, nx, ny, na, nb, out, cfg, cap); });

        auto* check = dist->add_subcommand("check", "diagnose a distribution file");
        static std::string path;
        static bool as_json = false;
        check->add_option("file", path, "distribution JSON file")->required();
        check->add_flag("--json", as_json, "print the report as canonical JSON");
        check->callback([&]() { rc = cmd_dist_check(path, as_json); });
    }

    // ---- bound ----
    auto* bound = app.add_subcommand("bound", "compute a lower bound");
    {
        static std::string name;
        static BoundArgs a;
        static std::vector<int> table;
        static int nx = 2, ny = 2, nz = 2;
        bound->add_option("name", name,
                          "eff | eff-eps | eff-eta | eff-nc | eff-oneway | nu | prt | "
                          "prt-via-eff | prt-fn")
            ->required();
        bound->add_option("-p,--dist", a.dist_path, "distribution JSON file");
        bound->add_option("--eps", a.eps, "slack parameter (rational)");
        bound->add_option("--eta", a.eta, "acceptance floor (rational)");
        bound->add_flag("--colgen", a.colgen, "solve by column generation");
        bound->add_option("--cap", a.cap, "enumeration cap override");
        bound->add_flag("--json", a.as_json, "print the report as canonical JSON");
        bound->add_option("--table", table, "prt-fn: function table, -1 outside the domain")
            ->delimiter(',');
        bound->add_option("--nx", nx, "prt-fn: number of x inputs");
        bound->add_option("--ny", ny, "prt-fn: number of y inputs");
        bound->add_option("--nz", nz, "prt-fn: number of outputs");
        bound->callback([&]() {
            if (name == "prt-fn") {
                rc = cmd_bound_fn(table, nx, ny, nz, a, cfg);
            } else {
                if (a.dist_path.empty()) throw input_error(name + " requires --dist");
                rc = cmd_bound(name, a, cfg);
            }
        });
    }

    // ---- cert ----
    auto* cert = app.add_subcommand("cert", "extract and verify certificates");
    cert->require_subcommand(1);
    {
        auto* extract = cert->add_subcommand("extract", "compute a bound and write its certificate");
        static std::string name, out;
        static BoundArgs a;
        extract->add_option("--bound", name, "eff | eff-eps | eff-eta | eff-nc | eff-oneway | nu | prt")
            ->required();
        add_bound_flags(extract, a);
        extract->add_option("-o,--out", out, "certificate file (default: stdout)");
        extract->callback([&]() { rc = cmd_cert_extract(name, a, out, cfg); });

        auto* verify = cert->add_subcommand("verify", "check a certificate against a distribution");
        static std::string cert_path, dist_path;
        static long long cap = 0;
        static bool as_json = false;
        verify->add_option("-c,--cert", cert_path, "certificate JSON file")->required();
        verify->add_option("-p,--dist", dist_path, "distribution JSON file")->required();
        verify->add_option("--cap", cap, "term cap override");
        verify->add_flag("--json", as_json, "print the report as canonical JSON");
        verify->callback([&]() { rc = cmd_cert_verify(cert_path, dist_path, cap, as_json, cfg); });
    }

    // ---- hm ----
    auto* hm = app.add_subcommand("hm", "hidden-matching construction");
    hm->require_subcommand(1);
    {
        static int n = 4;
        static std::string C = "1";
        static std::string out;
        static long long cap = 0;
        static bool as_json = false;
        static std::vector<int> grid;
        static std::vector<unsigned long long> subset;

        auto* hdist = hm->add_subcommand("dist", "write the hidden-matching distribution");
        hdist->add_option("-n", n, "size (power of two)")->required();
        hdist->add_option("--cap", cap, "entry cap override");
        hdist->add_option("-o,--out", out, "output file (default: stdout)");
        hdist->callback([&]() {
            rc = cmd_dist_build("hm", n, {}, 0, 0, 0, 0, out, cfg, cap);
        });

        auto* hbell = hm->add_subcommand("bell", "write the scaled functional as a certificate");
        hbell->add_option("-n", n, "size (power of two)")->required();
        hbell->add_option("-C", C, "scale constant (rational)");
        hbell->add_option("--cap", cap, "entry cap override");
        hbell->add_option("-o,--out", out, "output file (default: stdout)");
        hbell->callback([&]() { rc = cmd_hm_bell(n, parse_rat(C), out, cfg, cap); });

        auto* hobj = hm->add_subcommand("objective", "streamed objective vs the closed form");
        hobj->add_option("-n", n, "size (power of two)")->required();
        hobj->add_option("-C", C, "scale constant (rational)");
        hobj->add_option("--cap", cap, "entry cap override");
        hobj->add_flag("--json", as_json, "print the report as canonical JSON");
        hobj->callback([&]() { rc = cmd_hm_objective(n, parse_rat(C), as_json, cfg, cap); });

        auto* hscan = hm->add_subcommand("scan", "matching-consistent normalization scan");
        hscan->add_option("-n", n, "size (power of two)")->required();
        hscan->add_option("-C", C, "scale constant (rational)");
        hscan->add_option("--grid", grid, "alice inputs to include (default: all)")
            ->delimiter(',');
        hscan->add_option("--cap", cap, "map cap override");
        hscan->add_flag("--json", as_json, "print the report as canonical JSON");
        hscan->callback([&]() { rc = cmd_hm_scan(n, parse_rat(C), grid, as_json, cfg, cap); });

        auto* hfour = hm->add_subcommand("fourier", "level-two fourier mass of a subset");
        hfour->add_option("-n", n, "bit width")->required();
        hfour->add_option("--set", subset, "subset of {0,1}^n as integers")
            ->delimiter(',')
            ->required();
        hfour->add_flag("--json", as_json, "print the report as canonical JSON");
        hfour->callback([&]() { rc = cmd_hm_fourier(n, subset, as_json); });
    }

    // ---- sim ----
    auto* sim = app.add_subcommand("sim", "protocol reductions and sampling");
    sim->require_subcommand(1);
    {
        static std::string proto, out, zeta, eta;
        static int na = 2, nb = 2;
        static long long samples = 100000;
        static std::uint64_t seed = cfg.seed;
        static bool as_json = false;

        auto* reduce = sim->add_subcommand("reduce", "strategy mixture of a protocol");
        reduce->add_option("-P,--protocol", proto, "protocol JSON file")->required();
        reduce->add_option("-o,--out", out, "write the conditional distribution here");
        reduce->add_flag("--json", as_json, "print the report as canonical JSON");
        reduce->callback([&]() { rc = cmd_sim_reduce(proto, out, as_json); });

        auto* part = sim->add_subcommand("partition", "partition-LP feasible point of a protocol");
        part->add_option("-P,--protocol", proto, "protocol JSON file")->required();
        part->add_flag("--json", as_json, "print the report as canonical JSON");
        part->callback([&]() { rc = cmd_sim_partition(proto, as_json); });

        auto* amp = sim->add_subcommand("amplify", "repetitions for a target acceptance");
        amp->add_option("--zeta", zeta, "per-round acceptance (rational)")->required();
        amp->add_option("--eta", eta, "target acceptance (rational in (0,1))")->required();
        amp->add_option("--na", na, "alice output alphabet size");
        amp->add_option("--nb", nb, "bob output alphabet size");
        amp->add_flag("--json", as_json, "print the report as canonical JSON");
        amp->callback([&]() { rc = cmd_sim_amplify(zeta, eta, na, nb, as_json); });

        auto* mc = sim->add_subcommand("mc", "sample a protocol's reduction");
        mc->add_option("-P,--protocol", proto, "protocol JSON file")->required();
        mc->add_option("--samples", samples, "samples per input pair");
        mc->add_option("--seed", seed, "RNG seed (default: BELL_EFF_SEED or built-in)");
        mc->add_flag("--json", as_json, "print the report as canonical JSON");
        mc->callback([&]() { rc = cmd_sim_mc(proto, samples, seed, as_json); });
    }

    CLI11_PARSE(app, argc, argv);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const too_large_error& e) {
        std::cerr << "too large: " << e.what() << "\n";
        return 1;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
