#include "hkr/tree.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace hkr;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kBudget = 3, kFailure = 4 };

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string rat(const mpq_class& v) { return v.get_num().get_str() + "/" + v.get_den().get_str(); }

// "I:n:eps" or the Gram DSL
Gram parse_lattice(const std::string& text, const RingConfig& R) {
    if (text.rfind("I:", 0) == 0) {
        std::vector<std::string> parts;
        std::stringstream ss(text.substr(2));
        for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
        if (parts.size() != 2) throw UsageError("lattice parse error at '" + text + "': expected I:n:eps");
        int n = 0, eps = 0;
        for (int i = 0; i < 2; ++i) {
            try {
                size_t used = 0;
                int v = std::stoi(parts[i], &used);
                if (used != parts[i].size()) throw std::invalid_argument("");
                (i == 0 ? n : eps) = v;
            } catch (const std::exception&) {
                throw UsageError("lattice parse error at '" + parts[i] + "': expected an integer");
            }
        }
        if (eps != 1 && eps != -1) throw UsageError("lattice parse error at '" + parts[1] + "': eps must be 1 or -1");
        return unimodular(n, eps, R);
    }
    try {
        return parse_gram(text, R);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

void emit(const json& j, bool as_json) {
    if (as_json) {
        std::cout << j.dump() << "\n";
        return;
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        std::cout << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
}

// ------------------------------------------------------------ density

struct DensityOpts {
    std::string target, gram, mode = "poly";
    int d = 0, k = 0, ell = 0;
    bool engine = false;
};

json cmd_density(const DensityOpts& o, const RingConfig& R) {
    Gram M = parse_lattice(o.target, R), L = parse_lattice(o.gram, R);
    json j;
    j["target"] = gram_dsl(M, R);
    j["gram"] = gram_dsl(L, R);
    if (o.mode == "count") {
        Gram Mk = with_hyperbolic(M, o.k, R);
        int d = o.d > 0 ? o.d : stable_level(L, R);
        RepCount c = o.ell > 0 ? count_reps_primitive(Mk, L, d, o.ell, R) : count_reps(Mk, L, d, R);
        j["d"] = d;
        j["k"] = o.k;
        j["raw"] = c.raw.get_str();
        j["normalized"] = rat(c.normalized);
        j["method"] = o.ell > 0 ? "count-primitive" : "count";
    } else if (o.mode == "poly") {
        Poly a;
        if (o.engine) {
            a = o.ell > 0 ? beta_prim_poly(M, L, o.ell, R) : alpha_engine(M, L, R);
            j["method"] = o.ell > 0 ? "superlattice-inversion" : "engine";
        } else {
            AlphaFit f = alpha_poly_fit(M, L, R, o.ell);
            a = f.poly;
            j["method"] = "interpolation";
            j["degree_cap"] = f.degree_cap;
            j["level"] = f.level;
        }
        j["alpha"] = a.str();
        j["alpha_prime"] = rat(alpha_prime(a));
    } else if (o.mode == "closed") {
        Poly a;
        std::string id;
        if (L.n() == 1) {
            a = alpha_rank1(SplitForm::of(M, R), L.m[0][0].a, R);
            id = "rank1-character-sum";
        } else {
            auto inv = invariants(M, R);
            auto jf = jordan_form(L, R);
            bool unimodular_target = inv.fund.empty() || *std::max_element(inv.fund.begin(), inv.fund.end()) == 0;
            bool diag2 = L.n() == 2 && jf.blocks.size() == 2 && !jf.blocks[0].hyperbolic && !jf.blocks[1].hyperbolic;
            if (!unimodular_target || !diag2) throw UsageError("no closed form for this shape");
            int m = M.n(), chiS = inv.sign;
            int a1 = jf.blocks[0].exp, b1 = jf.blocks[1].exp;
            int chiT = chi(-jf.blocks[0].unit * jf.blocks[1].unit, R.pi0(), R.p);
            if (m % 2) {
                a = closed::rank2_odd(m, chiS, a1, b1, jf.blocks[0].unit, R);
                id = "rank2-odd";
            } else if (m == 2 && chiS == -1) {
                a = closed::rank2_m2(chiS, a1, b1, chiT, R);
                id = "rank2-m2";
            } else {
                a = closed::rank2_even(m, chiS, a1, b1, chiT, R);
                id = "rank2-even";
            }
        }
        j["alpha"] = a.str();
        j["alpha_prime"] = rat(alpha_prime(a));
        j["formula"] = id;
    } else {
        throw UsageError("unknown mode '" + o.mode + "'");
    }
    return j;
}

// ------------------------------------------------------------ coeffs / pden / int

json cmd_coeffs(int n, int eps, const RingConfig& R) {
    if (eps != 1 && eps != -1) throw UsageError("eps must be 1 or -1");
    if (n < 1) throw UsageError("n must be positive");
    const auto& t = coeffs(n, eps, R);
    json j;
    j["n"] = n;
    j["eps"] = eps;
    j["q"] = t.q;
    json A = json::array();
    for (auto& row : t.A) {
        json r = json::array();
        for (auto& v : row) r.push_back(rat(v));
        A.push_back(r);
    }
    json B = json::array(), C = json::array();
    for (auto& v : t.B) B.push_back(rat(v));
    for (auto& v : t.C) C.push_back(rat(v));
    j["A"] = A;
    j["B"] = B;
    j["C"] = C;
    return j;
}

json cmd_pden(const std::string& text, int prim, const RingConfig& R) {
    Gram L = parse_lattice(text, R);
    json j;
    j["gram"] = gram_dsl(L, R);
    if (prim > 0) {
        j["pden_prim"] = rat(pden_prim(L, prim, R));
        j["n1"] = prim;
        j["method"] = "superlattice-inversion";
    } else {
        j["pden"] = rat(pden(L, R));
        j["method"] = "engine+coefficients";
    }
    return j;
}

json cmd_int(const std::string& text, int prim, const RingConfig& R) {
    Gram L = parse_lattice(text, R);
    if (L.n() != 3) throw UsageError("int needs a rank-3 gram");
    json j;
    j["gram"] = gram_dsl(L, R);
    if (prim > 0) {
        if (prim != 2) throw UsageError("int supports only the split n1 = 2");
        j["int_prim"] = tree::int_prim2(L, R).get_str();
        j["n1"] = 2;
        j["method"] = "vertex-lattice-sum";
        return j;
    }
    auto rep = tree::int_total_report(L, R);
    j["int"] = rep.value.get_str();
    j["route"] = rep.route;
    j["bridge_terms"] = rep.bridge_terms;
    j["geometric_terms"] = rep.geometric_terms;
    if (rep.v0_count >= 0) j["v0_count"] = rep.v0_count;
    return j;
}

// ------------------------------------------------------------ verify

struct Case {
    std::string id, shape;
    bool twist = false;
    Gram L;
    RingConfig R;
};

struct Record {
    json body;
    bool match = false;
    double ms = 0;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');)
        if (!t.empty()) out.push_back(t);
    return out;
}

std::vector<Case> build_grid(int p, const std::vector<bool>& twists, int max_exp, const std::vector<std::string>& units,
                             const std::vector<std::string>& shapes) {
    for (auto& u : units)
        if (u != "1" && u != "s") throw UsageError("unit class parse error at '" + u + "': expected 1 or s");
    for (auto& s : shapes)
        if (s != "diag" && s != "hblock" && s != "negative")
            throw UsageError("shape parse error at '" + s + "': expected diag, hblock or negative");
    auto has = [&](const char* s) { return std::find(shapes.begin(), shapes.end(), s) != shapes.end(); };
    std::vector<Case> out;
    for (bool tw : twists) {
        RingConfig R = RingConfig::make(p, tw);
        auto unit = [&](const std::string& u) { return u == "s" ? mpq_class(R.nonresidue()) : mpq_class(1); };
        std::string pre = "q" + std::to_string(p) + "/t" + std::to_string(int(tw)) + "/";
        if (has("diag"))
            for (int a = 0; a <= max_exp; ++a)
                for (int b = a; b <= max_exp; ++b)
                    for (int c = b; c <= max_exp; ++c)
                        for (auto& u1 : units)
                            for (auto& u2 : units)
                                for (auto& u3 : units) {
                                    std::string id = pre + "diag/" + std::to_string(a) + std::to_string(b) + std::to_string(c) +
                                                     "/" + u1 + u2 + u3;
                                    out.push_back({id, "diag", tw,
                                                   diag_lattice({{unit(u1), a}, {unit(u2), b}, {unit(u3), c}}, R), R});
                                }
        if (has("hblock"))
            for (int a = 1; a <= 2 * max_exp - 1; a += 2)
                for (int c = 0; c <= max_exp; ++c)
                    for (auto& u : units)
                        out.push_back({pre + "hblock/" + std::to_string(a) + std::to_string(c) + "/" + u, "hblock", tw,
                                       orth(hodd(a, R), diag_lattice({{unit(u), c}}, R)), R});
        if (has("negative"))
            for (int c = 0; c <= max_exp; ++c)
                for (auto& u : units)
                    out.push_back({pre + "negative/" + std::to_string(c) + "/" + u, "negative", tw,
                                   orth(hodd(-1, R), diag_lattice({{unit(u), c}}, R)), R});
    }
    return out;
}

Record run_case(const Case& c) {
    Record rec;
    json& j = rec.body;
    j["case_id"] = c.id;
    j["shape"] = c.shape;
    j["gram"] = gram_dsl(c.L, c.R);
    j["q"] = c.R.q();
    j["twist"] = c.twist;
    auto t0 = std::chrono::steady_clock::now();
    try {
        mpq_class pd = pden(c.L, c.R);
        auto rep = tree::int_total_report(c.L, c.R);
        rec.match = pd == mpq_class(rep.value);
        j["pden"] = rat(pd);
        j["int"] = rep.value.get_str();
        j["match"] = rec.match;
        j["pden_integral"] = pd.get_den() == 1;
        j["pden_path"] = "engine+coefficients";
        j["int_route"] = rep.route;
        j["bridge_terms"] = rep.bridge_terms;
        j["geometric_terms"] = rep.geometric_terms;
        j["n2_bridge"] = rep.route == "unit-split" || rep.bridge_terms > 0;
        j["error"] = "";
    } catch (const std::exception& e) {
        rec.match = false;
        j["pden"] = "";
        j["int"] = "";
        j["match"] = false;
        j["pden_integral"] = false;
        j["pden_path"] = "";
        j["int_route"] = "";
        j["bridge_terms"] = 0;
        j["geometric_terms"] = 0;
        j["n2_bridge"] = false;
        j["error"] = e.what();
    }
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

const std::vector<std::string> kCsvCols = {"case_id", "shape", "gram", "q", "twist", "pden", "int", "match",
                                           "pden_integral", "pden_path", "int_route", "bridge_terms",
                                           "geometric_terms", "n2_bridge", "error", "timing_ms"};

std::string csv_field(const json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

struct VerifyOpts {
    std::string twists = "both", units = "1,s", shapes = "diag,hblock,negative", out = "-", format = "jsonl";
    int max_exp = 2;
    int jobs = 0;
    bool timing = true;
};

int cmd_verify(const VerifyOpts& o, int p) {
    std::vector<bool> tws;
    if (o.twists == "both") tws = {false, true};
    else if (o.twists == "0") tws = {false};
    else if (o.twists == "1") tws = {true};
    else throw UsageError("twist parse error at '" + o.twists + "': expected 0, 1 or both");
    if (o.format != "jsonl" && o.format != "csv") throw UsageError("format parse error at '" + o.format + "'");
    auto grid = build_grid(p, tws, o.max_exp, split_list(o.units), split_list(o.shapes));

    // workers pull case indices; records land in their slot so output order is fixed
    std::vector<Record> recs(grid.size());
    std::atomic<size_t> next{0};
    int jobs = o.jobs > 0 ? o.jobs : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (size_t i; (i = next++) < grid.size();) recs[i] = run_case(grid[i]);
        });
    for (auto& t : pool) t.join();

    std::ofstream file;
    if (o.out != "-") {
        file.open(o.out);
        if (!file) throw UsageError("cannot open output '" + o.out + "'");
    }
    std::ostream& os = o.out == "-" ? std::cout : file;
    if (o.format == "csv") {
        for (size_t i = 0; i < kCsvCols.size(); ++i) os << (i ? "," : "") << kCsvCols[i];
        os << "\n";
    }
    size_t matched = 0, failed = 0;
    for (auto& r : recs) {
        json b = r.body;
        b["timing_ms"] = o.timing ? std::llround(r.ms) : 0;
        if (r.match) ++matched;
        if (!b["error"].get<std::string>().empty()) ++failed;
        if (o.format == "jsonl") {
            os << b.dump() << "\n";
        } else {
            for (size_t i = 0; i < kCsvCols.size(); ++i) os << (i ? "," : "") << csv_field(b[kCsvCols[i]]);
            os << "\n";
        }
    }
    std::cerr << "verify: " << recs.size() << " cases, " << matched << " match, " << recs.size() - matched
              << " mismatch, " << failed << " errors\n";
    return matched == recs.size() ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact local densities, derived densities and tree intersection numbers"};
    app.require_subcommand(1);
    int q = 3;
    bool twist = false, as_json = false;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--q", q, "residue characteristic (odd prime)")->check(CLI::PositiveNumber);
        s->add_flag("--twist", twist, "use pi0 = s*q instead of q");
        s->add_flag("--json", as_json, "print one JSON object");
    };

    DensityOpts dens;
    auto* sd = app.add_subcommand("density", "representation counts and density polynomials");
    add_common(sd);
    sd->add_option("--target", dens.target, "target lattice M (I:n:eps or Gram DSL)")->required();
    sd->add_option("--gram", dens.gram, "represented lattice L")->required();
    sd->add_option("--mode", dens.mode, "count, poly or closed")->check(CLI::IsMember({"count", "poly", "closed"}));
    sd->add_option("--d", dens.d, "level for count mode (default: stable level)");
    sd->add_option("--k", dens.k, "hyperbolic planes added to the target in count mode");
    sd->add_option("--primitive", dens.ell, "require the first ell images independent mod pi");
    sd->add_flag("--engine", dens.engine, "poly mode: use the recursive engine instead of interpolation");

    int cn = 3, ceps = 1;
    auto* sc = app.add_subcommand("coeffs", "correction coefficient system");
    add_common(sc);
    sc->add_option("--n", cn, "rank")->required();
    sc->add_option("--eps", ceps, "sign (1 or -1)");

    std::string pg;
    int pprim = 0;
    auto* sp = app.add_subcommand("pden", "derived local density");
    add_common(sp);
    sp->add_option("--gram", pg, "lattice (Gram DSL)")->required();
    sp->add_option("--prim", pprim, "primitive part with respect to the first n1 vectors");

    std::string ig;
    int iprim = 0;
    auto* si = app.add_subcommand("int", "intersection number from vertex lattices");
    add_common(si);
    si->add_option("--gram", ig, "rank-3 lattice (Gram DSL)")->required();
    si->add_option("--prim", iprim, "primitive part (only 2)");

    VerifyOpts vo;
    bool no_timing = false;
    auto* sv = app.add_subcommand("verify", "sweep a grid and compare both sides");
    sv->add_option("--q", q, "residue characteristic")->check(CLI::PositiveNumber);
    sv->add_option("--twists", vo.twists, "0, 1 or both");
    sv->add_option("--max-exp", vo.max_exp, "largest exponent in the grid");
    sv->add_option("--units", vo.units, "unit classes, comma separated from {1,s}");
    sv->add_option("--shapes", vo.shapes, "comma separated from {diag,hblock,negative}");
    sv->add_option("--out", vo.out, "report path, - for stdout");
    sv->add_option("--format", vo.format, "jsonl or csv");
    sv->add_option("--jobs", vo.jobs, "worker threads (default: up to 8)");
    sv->add_flag("--no-timing", no_timing, "write timing_ms = 0 for byte-identical reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (q < 3 || mpz_probab_prime_p(mpz_class(q).get_mpz_t(), 25) == 0)
            throw UsageError("q must be an odd prime");
        RingConfig R = RingConfig::make(q, twist);
        if (*sd) emit(cmd_density(dens, R), as_json);
        else if (*sc) emit(cmd_coeffs(cn, ceps, R), as_json);
        else if (*sp) emit(cmd_pden(pg, pprim, R), as_json);
        else if (*si) emit(cmd_int(ig, iprim, R), as_json);
        else if (*sv) {
            vo.timing = !no_timing;
            return cmd_verify(vo, q);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << " (raise HKR_BUDGET)\n";
        return kBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
