// apm: verification-lab CLI over the library headers. Every command's
// output is deterministic byte-for-byte for fixed flags.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apm/verify.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace apm;
using analytic::Cplx;
using singular::DeltaModulus;
using singular::LocalProfile;

namespace {

json cplx_json(Cplx v, double tail = -1.0) {
  json j;
  j["value_re"] = v.real();
  j["value_im"] = v.imag();
  if (tail >= 0) j["tail_bound"] = tail;
  return j;
}

Cplx parse_cplx(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) return Cplx(std::stod(s), 0.0);
  return Cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

LocalProfile profile_from(const std::string& path) {
  if (path.empty()) return LocalProfile{};
  return LocalProfile::load(path);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analytic-progressions verification lab"};
  app.require_subcommand(1);

  // ---- sieve ----
  auto* sieve = app.add_subcommand("sieve", "build the Lambda table");
  std::uint64_t sv_limit = 1000000;
  std::string sv_cache;
  sieve->add_option("--limit", sv_limit, "table limit N");
  sieve->add_option("--cache", sv_cache, "binary cache path");
  sieve->callback([&] {
    auto t = arith::SieveTable::build(sv_limit);
    double sum = 0;
    for (std::uint64_t n = 1; n <= sv_limit; ++n) sum += t.lambda(n);
    if (!sv_cache.empty()) arith::write_lambda_cache(t, sv_cache);
    json j;
    j["limit"] = sv_limit;
    j["psi"] = sum;
    if (!sv_cache.empty()) j["cache"] = sv_cache;
    std::cout << j.dump() << "\n";
  });

  // ---- singular ----
  auto* sing = app.add_subcommand("singular", "singular-series data");
  std::string sg_op = "f", sg_profile;
  std::uint64_t sg_n = 1, sg_delta = 1;
  sing->add_option("--op", sg_op, "f, g, R or I");
  sing->add_option("--n", sg_n, "argument n");
  sing->add_option("--delta", sg_delta, "Delta modulus");
  sing->add_option("--profile", sg_profile, "profile file: lines 'p num/den'");
  sing->callback([&] {
    LocalProfile prof = profile_from(sg_profile);
    DeltaModulus dm(sg_delta);
    Rat v;
    if (sg_op == "f")
      v = singular::f_delta(sg_n, dm, prof);
    else if (sg_op == "g")
      v = singular::g_delta(sg_n, dm, prof);
    else if (sg_op == "R")
      v = singular::r_delta(sg_n, dm, prof);
    else if (sg_op == "I")
      v = singular::big_i(sg_n, prof);
    else
      throw DomainError("singular: unknown --op " + sg_op);
    json j;
    j["op"] = sg_op;
    j["n"] = sg_n;
    j["delta"] = dm.value();
    j["value"] = rat_str(v);
    std::cout << j.dump() << "\n";
  });

  // ---- chars ----
  auto* chars = app.add_subcommand("chars", "Dirichlet character tables");
  std::uint64_t ch_mod = 5;
  bool ch_table = false;
  chars->add_option("--mod", ch_mod, "modulus q");
  chars->add_flag("--table", ch_table, "emit the full value table");
  chars->callback([&] {
    dirichlet::CharacterGroup g(ch_mod);
    std::printf("chi_index,n,re,im\n");
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::uint64_t upto =
          ch_table ? ch_mod : std::min<std::uint64_t>(ch_mod, 1);
      for (std::uint64_t n = 1; n <= upto; ++n) {
        Cplx v = g[i].value(n);
        std::printf("%zu,%" PRIu64 ",%.17g,%.17g\n", i, n, v.real(),
                    v.imag());
      }
    }
  });

  // ---- analytic ----
  auto* ana = app.add_subcommand("analytic", "L-functions and Euler products");
  std::string an_fn = "zeta", an_s = "2,0", an_profile;
  std::uint64_t an_delta = 1, an_q = 1, an_chi_mod = 1, an_chi_index = 0;
  double an_x = 10.0;
  bool an_variant_b = false;
  ana->add_option("--fn", an_fn, "zeta,L,Fchi,P,Q,theta,A,Z");
  ana->add_option("--s", an_s, "complex point RE,IM");
  ana->add_option("--delta", an_delta, "Delta modulus");
  ana->add_option("--q", an_q, "modulus for theta");
  ana->add_option("--chi-mod", an_chi_mod, "character modulus");
  ana->add_option("--chi-index", an_chi_index, "character index");
  ana->add_option("--X", an_x, "cutoff for A");
  ana->add_flag("--variant-b", an_variant_b, "Z variant B");
  ana->add_option("--profile", an_profile, "profile file");
  ana->callback([&] {
    LocalProfile prof = profile_from(an_profile);
    DeltaModulus dm(an_delta);
    Cplx s = parse_cplx(an_s);
    json j;
    if (an_fn == "zeta") {
      j = cplx_json(analytic::zeta(s));
    } else if (an_fn == "L") {
      dirichlet::CharacterGroup g(an_chi_mod);
      j = cplx_json(analytic::dirichlet_l(s, g[an_chi_index]));
    } else if (an_fn == "Fchi") {
      dirichlet::CharacterGroup g(an_chi_mod);
      j = cplx_json(analytic::f_chi(s, g[an_chi_index], dm, prof));
    } else if (an_fn == "P") {
      auto v = analytic::p_delta(s, dm, prof);
      j = cplx_json(v.value, v.tail_bound);
    } else if (an_fn == "Q") {
      auto v = analytic::q_delta(s, dm, prof);
      j = cplx_json(v.value, v.tail_bound);
    } else if (an_fn == "theta") {
      j = cplx_json(analytic::theta_s(an_q, s, prof));
    } else if (an_fn == "A") {
      auto [less, greater] = analytic::a_split(an_x, dm, prof);
      j["A_less_re"] = less.value.real();
      j["A_greater_re"] = greater.value.real();
      j["tail_bound"] = less.tail_bound + greater.tail_bound;
    } else if (an_fn == "Z") {
      auto v = analytic::z_kernel(s, dm, prof, {}, an_variant_b);
      j = cplx_json(v.value, v.tail_bound);
    } else {
      throw DomainError("analytic: unknown --fn " + an_fn);
    }
    std::cout << j.dump() << "\n";
  });

  // ---- contour ----
  auto* con = app.add_subcommand("contour", "vertical-line integrals");
  std::string co_which = "E", co_u = "-0.75,0", co_params = "0.5,1,0.5,1",
              co_profile;
  double co_x = 10.0, co_T = 0.0, co_tol = 1e-9;
  std::uint64_t co_delta = 1;
  con->add_option("--which", co_which, "E,Eless,Egreater,R,meijer,jkernel");
  con->add_option("--X", co_x, "argument X");
  con->add_option("--delta", co_delta, "Delta modulus");
  con->add_option("--T", co_T, "truncation height");
  con->add_option("--tol", co_tol, "target tolerance");
  con->add_option("--u", co_u, "kernel argument RE,IM");
  con->add_option("--params", co_params, "meijer a,a2,b,b2");
  con->add_option("--profile", co_profile, "profile file");
  con->callback([&] {
    LocalProfile prof = profile_from(co_profile);
    DeltaModulus dm(co_delta);
    contour::QuadratureSpec spec;
    if (co_T > 0) spec.truncation = co_T;
    spec.tolerance = co_tol;
    json j;
    j["eps_contour"] = 0.125;  // fixed eps for all paper contours
    auto fill = [&](Cplx v, double trunc, double quad) {
      j["re"] = v.real();
      j["im"] = v.imag();
      j["trunc_err"] = trunc;
      j["quad_err"] = quad;
    };
    if (co_which == "E") {
      auto r = contour::e_delta(co_x, dm, prof, spec);
      fill(r.value, r.trunc_err, r.quad_err);
      j["product_tail"] = r.product_tail;
    } else if (co_which == "Eless" || co_which == "Egreater") {
      auto r = contour::e_secondary(co_which == "Eless" ? '<' : '>', co_x, dm,
                                    prof, spec);
      fill(r.value, r.trunc_err, r.quad_err);
      j["variant_q_delta_re"] = r.variant.real();
      j["product_tail"] = r.product_tail;
    } else if (co_which == "R") {
      auto r = contour::r_delta_contour(co_x, dm, prof, spec);
      fill(r.value, r.trunc_err, r.quad_err);
      j["product_tail"] = r.product_tail;
    } else if (co_which == "meijer") {
      auto ps = parse_list(co_params);
      if (ps.size() != 4) throw DomainError("meijer needs --params a,a2,b,b2");
      auto m = contour::meijer_g(Cplx(ps[0]), Cplx(ps[1]), Cplx(ps[2]),
                                 Cplx(ps[3]));
      fill(m.quadrature, m.detail.trunc_err, m.detail.quad_err);
      j["closed_re"] = m.closed.real();
      j["closed_im"] = m.closed.imag();
    } else if (co_which == "jkernel") {
      auto pk = contour::parity_kernels(parse_cplx(co_u));
      fill(pk.j, 0.0, 0.0);
      j["g_E_re"] = pk.g_e.real();
      j["g_E_im"] = pk.g_e.imag();
      j["g_O_re"] = pk.g_o.real();
      j["g_O_im"] = pk.g_o.imag();
      j["duplication_constant"] = "2^u/pi (replaces the stray 2^s/sqrt(pi))";
    } else {
      throw DomainError("contour: unknown --which " + co_which);
    }
    std::cout << j.dump() << "\n";
  });

  // ---- sums ----
  auto* sums_cmd = app.add_subcommand("sums", "brute-force identity sums");
  std::string su_op = "sdelta", su_u = "2,0", su_s = "2,0", su_variant = "p",
              su_profile;
  std::uint64_t su_x = 50, su_delta = 1, su_q = 1, su_p = 3, su_n = 1,
                su_d1 = 1, su_d2 = 1, su_amax = 1000;
  int su_k = 1;
  sums_cmd->add_option("--op", su_op,
                       "sdelta,ldelta,jstar,h,frakh,aq,kq,lattice");
  sums_cmd->add_option("--X", su_x, "threshold X");
  sums_cmd->add_option("--delta", su_delta, "Delta modulus");
  sums_cmd->add_option("--q", su_q, "modulus q");
  sums_cmd->add_option("--p", su_p, "prime p");
  sums_cmd->add_option("--k", su_k, "exponent k (N = p^k)");
  sums_cmd->add_option("--n", su_n, "argument n");
  sums_cmd->add_option("--u", su_u, "complex u RE,IM");
  sums_cmd->add_option("--s", su_s, "complex s RE,IM");
  sums_cmd->add_option("--variant", su_variant, "frak-h variant: p, 1 or *");
  sums_cmd->add_option("--D", su_d1, "lattice D");
  sums_cmd->add_option("--D2", su_d2, "lattice D'");
  sums_cmd->add_option("--A-max", su_amax, "a_q brute cutoff");
  sums_cmd->add_option("--profile", su_profile, "profile file");
  sums_cmd->callback([&] {
    LocalProfile prof = profile_from(su_profile);
    DeltaModulus dm(su_delta);
    json j;
    j["op"] = su_op;
    if (su_op == "sdelta") {
      auto v = sums::s_delta_brute(su_x, dm, prof);
      j["X"] = su_x;
      j["value"] = rat_str(v.value);
      j["terms"] = v.terms;
    } else if (su_op == "ldelta") {
      auto v = sums::l_delta(su_q, Rat(long(su_x)), dm, prof);
      j["q"] = su_q;
      j["X"] = su_x;
      j["value"] = rat_str(v.value);
      j["terms"] = v.terms;
    } else if (su_op == "jstar") {
      j["X"] = su_x;
      j["value"] = rat_str(sums::j_star(su_x, prof));
    } else if (su_op == "h") {
      auto h = sums::h_small(su_q, parse_cplx(su_u), su_p, su_k, dm, prof);
      j["exact_equal"] = h.exact_equal;
      j["brute_re"] = h.brute_value.real();
      j["brute_im"] = h.brute_value.imag();
      j["closed_re"] = h.closed_value.real();
      j["closed_im"] = h.closed_value.imag();
    } else if (su_op == "frakh") {
      auto f = sums::frak_h(su_p, parse_cplx(su_u), dm, prof, su_variant[0]);
      j["series_re"] = f.series.real();
      j["series_im"] = f.series.imag();
      j["closed_re"] = f.closed.real();
      j["closed_im"] = f.closed.imag();
      j["residual_re"] = f.residual.real();
    } else if (su_op == "aq") {
      auto v = sums::a_q(su_n, su_q, dm, prof, su_amax);
      j["brute"] = v.brute;
      j["brute_tail"] = v.brute_tail;
      j["euler"] = v.euler;
      j["euler_tail"] = v.euler_tail;
    } else if (su_op == "kq") {
      auto v = sums::k_q(parse_cplx(su_s), su_q, dm, prof);
      j["series_re"] = v.series.real();
      j["series_im"] = v.series.imag();
      j["series_tail"] = v.series_tail;
      j["closed_re"] = v.closed.real();
      j["closed_im"] = v.closed.imag();
      j["closed_tail"] = v.closed_tail;
    } else if (su_op == "lattice") {
      auto v = sums::lattice_pair_count(su_n, su_d1, su_d2);
      j["exact"] = v.exact;
      j["main"] = rat_str(v.main);
    } else {
      throw DomainError("sums: unknown --op " + su_op);
    }
    std::cout << j.dump() << "\n";
  });

  // ---- moment ----
  auto* mom = app.add_subcommand("moment", "third moment over residues");
  double mo_x = 100000;
  std::uint64_t mo_q = 100;
  std::string mo_weighting = "phi", mo_perq;
  mom->add_option("--x", mo_x, "prime cutoff x");
  mom->add_option("--Q", mo_q, "modulus cutoff Q");
  mom->add_option("--weighting", mo_weighting, "phi or hooley");
  mom->add_option("--per-q", mo_perq, "write per-q CSV here");
  mom->callback([&] {
    auto table =
        arith::SieveTable::build(static_cast<std::uint64_t>(mo_x) + 1);
    auto w = (mo_weighting == "hooley") ? moments::Weighting::Hooley
                                        : moments::Weighting::Phi;
    auto rec = moments::third_moment(mo_x, mo_q, w, table);
    if (!mo_perq.empty()) {
      std::FILE* f = std::fopen(mo_perq.c_str(), "wb");
      if (!f) throw ResourceError("cannot write " + mo_perq);
      std::fprintf(f, "q,a_count,sum_E3,phi_q\n");
      for (auto& pq : rec.per_q)
        std::fprintf(f, "%" PRIu64 ",%" PRIu64 ",%.17g,%" PRIu64 "\n", pq.q,
                     pq.a_count, pq.sum_E3, pq.phi_q);
      std::fclose(f);
    }
    json j;
    j["x"] = mo_x;
    j["Q"] = mo_q;
    j["weighting"] = mo_weighting;
    j["moment"] = rec.value;
    std::cout << j.dump() << "\n";
  });

  // ---- scan ----
  auto* scan = app.add_subcommand("scan", "moment exponent scan");
  std::string sc_xgrid = "1e5,2e5,4e5,1e6", sc_qrule = "x/(log x)^2",
              sc_qlist, sc_weighting = "phi";
  scan->add_option("--x-grid", sc_xgrid, "comma list of x values");
  scan->add_option("--q-rule", sc_qrule, "\"x/(log x)^2\" or \"sqrt\"");
  scan->add_option("--q-list", sc_qlist, "explicit Q list (zipped or crossed)");
  scan->add_option("--weighting", sc_weighting, "phi or hooley");
  scan->callback([&] {
    auto xs = parse_list(sc_xgrid);
    std::vector<std::pair<double, std::uint64_t>> grid;
    if (!sc_qlist.empty()) {
      auto qs = parse_list(sc_qlist);
      if (xs.size() == 1)
        for (double q : qs) grid.emplace_back(xs[0], std::uint64_t(q));
      else if (qs.size() == xs.size())
        for (std::size_t i = 0; i < xs.size(); ++i)
          grid.emplace_back(xs[i], std::uint64_t(qs[i]));
      else
        throw DomainError("scan: --q-list must match --x-grid length");
    } else {
      for (double x : xs) grid.emplace_back(x, moments::q_rule(sc_qrule, x));
    }
    double x_max = 0;
    for (auto& [x, q] : grid) {
      (void)q;
      x_max = std::max(x_max, x);
    }
    auto table = arith::SieveTable::build(std::uint64_t(x_max) + 1);
    auto w = (sc_weighting == "hooley") ? moments::Weighting::Hooley
                                        : moments::Weighting::Phi;
    auto res = moments::exponent_scan(
        grid, w, [&](double) -> const arith::SieveTable& { return table; });
    std::printf("x,Q,moment,comparison\n");
    for (auto& r : res.rows)
      std::printf("%.17g,%" PRIu64 ",%.17g,%.17g\n", r.x, r.Q, r.moment,
                  r.comparison);
    json j;
    j["slope"] = res.slope;
    j["slope_stderr"] = res.slope_stderr;
    j["comparison_curve"] = "Q^3 (x/Q)^1.2";
    std::cout << j.dump() << "\n";
  });

  // ---- fit ----
  auto* fitc = app.add_subcommand("fit", "main-term fit on a series CSV");
  std::string fi_input;
  bool fi_with_e = false;
  std::uint64_t fi_delta = 1;
  fitc->add_option("--input", fi_input, "CSV of X,value rows")->required();
  fitc->add_flag("--with-e-delta", fi_with_e,
                 "subtract E_Delta before fitting");
  fitc->add_option("--delta", fi_delta, "Delta modulus");
  fitc->callback([&] {
    std::ifstream in(fi_input);
    if (!in) throw ResourceError("cannot read " + fi_input);
    fit::SampleSeries s;
    s.provenance = fi_input;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0])))
        continue;
      auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      s.x.push_back(std::stod(line.substr(0, comma)));
      s.value.push_back(std::stod(line.substr(comma + 1)));
    }
    auto r =
        fit::fit_main(s, fi_with_e, DeltaModulus(fi_delta), LocalProfile{});
    json j;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["gamma"] = r.gamma;
    j["e_delta_included"] = r.e_delta_included;
    j["residual_slope"] = r.residual_slope.slope;
    j["residual_slope_stderr"] = r.residual_slope.stderr_;
    j["excluded_sign_changes"] = r.residual_slope.excluded_sign_changes;
    j["below_noise_floor"] = r.residual_slope.below_noise_floor;
    json res = json::array();
    for (double v : r.residuals) res.push_back(v);
    j["residuals"] = res;
    std::cout << j.dump() << "\n";
  });

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "run invariant batteries");
  std::string ve_suite = "exact";
  ver->add_option("--suite", ve_suite, "exact, analytic, endgame or all");
  ver->callback([&] {
    auto results = verify::run_suite(ve_suite);
    bool all = true;
    for (auto& r : results) {
      std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                  r.detail.c_str());
      all = all && r.pass;
    }
    if (!all) std::exit(1);
  });

  // ---- report ----
  auto* rep = app.add_subcommand("report", "bundle suite output");
  std::string re_out = "apm-report";
  rep->add_option("--out", re_out, "output directory");
  rep->callback([&] {
    std::string mk = "mkdir -p " + re_out;
    if (std::system(mk.c_str()) != 0)
      throw ResourceError("cannot create " + re_out);
    json j;
    json suites = json::array();
    bool all = true;
    double slope5 = 0, slope6 = 0;
    std::string scan_csv;
    std::vector<verify::Outcome> res;
    res.push_back(verify::exact_identity_suite());
    res.push_back(verify::local_closed_forms());
    res.push_back(verify::analytic_cross_checks());
    res.push_back(verify::section4_closed_forms());
    res.push_back(verify::endgame_exponent(&slope5));
    res.push_back(verify::cancellation_check(&slope6));
    res.push_back(verify::theorem_scan(&scan_csv));
    for (auto& r : res) {
      json e;
      e["name"] = r.name;
      e["pass"] = r.pass;
      e["detail"] = r.detail;
      suites.push_back(e);
      all = all && r.pass;
    }
    j["suites"] = suites;
    j["endgame_residual_slope"] = slope5;
    j["cancellation_slope"] = slope6;
    j["all_pass"] = all;
    std::ofstream(re_out + "/report.json") << j.dump(2) << "\n";
    std::ofstream(re_out + "/scan.csv") << scan_csv;
    std::cout << "wrote " << re_out << "/report.json and scan.csv\n";
    if (!all) std::exit(1);
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
