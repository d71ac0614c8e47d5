#include <omp.h>

#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>

#include <CLI11.hpp>

#include "cli_io.hpp"
#include "thetasing/boundary.hpp"
#include "thetasing/gauss_tangency.hpp"
#include "thetasing/jets.hpp"
#include "thetasing/local_function.hpp"
#include "thetasing/pencils.hpp"
#include "thetasing/sing_locus.hpp"
#include "thetasing/theta_core.hpp"
#include "thetasing/types.hpp"

using namespace thetasing;
using cli::num;
using cli::ordered_json;
using cli::to_json;

namespace {

struct RunConfig {
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int threads = 0;
};

ordered_json header(const std::string& command, const RunConfig& rc, ordered_json tolerances) {
  if (!tolerances.contains("exact")) tolerances["theta"] = num(rc.tol);
  return ordered_json{{"tool", "thetasing"},
                      {"version", cli::kVersion},
                      {"command", command},
                      {"seed", rc.seed},
                      {"tolerances", std::move(tolerances)}};
}

void emit(const ordered_json& j) { std::cout << cli::dump(j) << "\n"; }

ThetaContext load_context(const std::string& path, double tol) {
  return ThetaContext(cli::tau_from_json(cli::read_json_file(path)), tol);
}

ordered_json indices_json(const MultiIndex& m) { return m.entries(); }

ordered_json form_json(const HomogeneousForm& f) {
  ordered_json coeffs = ordered_json::array();
  for (const auto& [index, c] : f.coeffs) coeffs.push_back({{"index", indices_json(index)}, {"value", to_json(c)}});
  return ordered_json{{"degree", f.degree}, {"coefficients", coeffs}};
}

ordered_json record_json(const SingularPointRecord& r) {
  ordered_json kernel = ordered_json::array();
  for (const CVector& v : r.kernel_basis) kernel.push_back(to_json(v));
  return ordered_json{{"z", to_json(r.z)},
                      {"order", r.order},
                      {"corank", r.corank},
                      {"residual", num(r.residual)},
                      {"hessian", to_json(r.hessian.mat)},
                      {"hessian_indeterminate", r.hessian.indeterminate},
                      {"kernel", kernel},
                      {"order_consistent", r.order_consistent},
                      {"smooth_on_sg", r.smooth_on_sg}};
}

ordered_json witness_json(const TangencyWitness& w) {
  ordered_json shifts = ordered_json::array();
  for (const CVector& s : w.shifts) shifts.push_back(to_json(s));
  return ordered_json{{"z", to_json(w.z)},
                      {"shifts", shifts},
                      {"residual_theta", num(w.residual_theta)},
                      {"residual_rank", num(w.residual_rank)},
                      {"regular", w.regular},
                      {"singular_row", w.singular_row}};
}

ordered_json vsing_json(const VerticalSingRecord& r) {
  ordered_json torus = ordered_json::array();
  for (cplx u : r.torus) torus.push_back(to_json(u));
  ordered_json eqs = ordered_json::array();
  for (double e : r.equations) eqs.push_back(num(e));
  ordered_json out{{"z", to_json(r.z)},
                   {"torus", torus},
                   {"type", to_string(r.type)},
                   {"equations", eqs},
                   {"residual", num(r.residual)},
                   {"type_condition", r.type_condition}};
  if (r.quadric) {
    out["quadric"] = to_json(*r.quadric);
    out["corank"] = r.corank;
  }
  return out;
}

ordered_json report_json(const PencilReport& rep) {
  ordered_json disc_coeffs = ordered_json::array();
  for (const Rational& q : rep.disc.coeffs) disc_coeffs.push_back(format_rational(q));
  ordered_json roots = ordered_json::array();
  for (const RootInfo& ri : rep.roots) {
    ordered_json kernel = ordered_json::array();
    for (const QVec& v : ri.kernel) kernel.push_back(to_json(v));
    roots.push_back({{"factor", ri.at_infinity ? std::string("infinity") : ri.factor.to_string()},
                     {"value", ri.value ? ordered_json(format_rational(*ri.value)) : ordered_json(nullptr)},
                     {"multiplicity", ri.multiplicity},
                     {"rank", ri.rank},
                     {"kernel_dim", ri.kernel_dim},
                     {"kernel", kernel},
                     {"clauses_evaluated", ri.clauses_evaluated},
                     {"base_point", ri.base_point},
                     {"tangent_along_line", ri.tangent_along_line},
                     {"bound_ok", ri.bound_ok},
                     {"double_ok", ri.double_ok},
                     {"exactly_two_ok", ri.exactly_two_ok}});
  }
  ordered_json basis = ordered_json::array();
  for (const PVec& v : rep.corank.kernel) basis.push_back(to_json(v));
  ordered_json out{{"n", rep.n},
                   {"disc", {{"degree", rep.disc.degree}, {"coefficients", disc_coeffs}, {"form", rep.disc.to_string()}}},
                   {"disc_zero", rep.disc_zero},
                   {"roots", roots},
                   {"generic_corank", rep.corank.r},
                   {"kernel_basis", basis},
                   {"vertex_curve", rep.corank.vertex_curve ? to_json(*rep.corank.vertex_curve) : ordered_json(nullptr)}};
  if (rep.vertex) {
    ordered_json span = ordered_json::array();
    for (const QVec& v : rep.vertex->span_basis) span.push_back(to_json(v));
    out["vertex"] = {{"span_dim", rep.vertex->m},
                     {"degree", rep.vertex->degree},
                     {"span", span},
                     {"degree_ok", rep.vertex->degree_ok},
                     {"bounds_ok", rep.vertex->bounds_ok}};
  } else {
    out["vertex"] = nullptr;
  }
  if (!rep.vertex_note.empty()) out["vertex_note"] = rep.vertex_note;
  if (rep.lower) {
    ordered_json members = ordered_json::array();
    for (const LowerRankMember& lm : rep.lower->members) {
      members.push_back({{"factor", lm.at_infinity ? std::string("infinity") : lm.factor.to_string()},
                         {"rank", lm.rank},
                         {"weight_minors", lm.weight_minors},
                         {"weight_restricted", lm.weight_restricted},
                         {"weight_ok", lm.weight_ok}});
    }
    out["lower_rank"] = {{"expected", rep.lower->expected},
                         {"by_minors", rep.lower->by_minors},
                         {"by_restriction", rep.lower->by_restriction},
                         {"meetings", rep.lower->meetings},
                         {"restricted_disc_nonzero", rep.lower->restricted_disc_nonzero},
                         {"attempts", rep.lower->attempts},
                         {"members", members}};
  }
  out["intersection"] = {{"r", rep.intersection.r}, {"s", rep.intersection.s}, {"holds", rep.intersection.holds}};
  out["tangency"] = {{"applicable", rep.tangency.applicable},
                     {"span_dim", rep.tangency.m},
                     {"span_in_base_locus", rep.tangency.span_in_base_locus},
                     {"common_tangent_dim", rep.tangency.common_tangent_dim},
                     {"expected_dim", rep.tangency.expected_dim},
                     {"holds", rep.tangency.holds}};
  ordered_json checks = ordered_json::array();
  for (const ClauseCheck& c : rep.checks) checks.push_back({{"clause", c.clause}, {"pass", c.pass}, {"detail", c.detail}});
  out["checks"] = checks;
  out["all_pass"] = rep.all_pass();
  return out;
}

std::unique_ptr<LocalFunction> load_function(const std::string& tau_path, const std::string& poly, int dim, double tol) {
  if (!tau_path.empty() && !poly.empty()) throw Error(ErrorCode::InvalidInput, "give either --tau or --poly");
  if (!tau_path.empty()) return std::make_unique<ThetaFunction>(load_context(tau_path, tol));
  if (poly.empty()) throw Error(ErrorCode::InvalidInput, "one of --tau or --poly is required");
  if (dim < 1) throw Error(ErrorCode::InvalidInput, "--dim is required with --poly");
  return std::make_unique<PolynomialFunction>(parse_polynomial(poly, dim));
}

void require_dim(const CVector& v, int g, const char* what) {
  if (v.size() != g) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " has " + std::to_string(v.size()) +
                                             " entries, expected " + std::to_string(g));
  }
}

std::vector<std::vector<Rational>> rational_fields(const ordered_json& j) {
  std::vector<std::vector<Rational>> out;
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "fields must be a list of rational vectors");
  for (const auto& row : j) {
    std::vector<Rational> v;
    for (const auto& e : row) {
      if (e.is_string()) {
        v.push_back(parse_rational(e.get<std::string>()));
      } else if (e.is_number_integer()) {
        v.emplace_back(e.get<long>());
      } else {
        throw Error(ErrorCode::InvalidInput, "field entries must be integers or \"p/q\" strings");
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

ordered_json parse_inline_json(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("bad JSON: ") + e.what());
  }
}

// Reads JSON from a file path, or parses the text itself when it starts with '['.
ordered_json json_arg(const std::string& text) {
  const auto b = text.find_first_not_of(" \t");
  if (b != std::string::npos && (text[b] == '[' || text[b] == '{')) return parse_inline_json(text);
  return cli::read_json_file(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theta divisor singularities and pencils of quadrics"};
  app.set_version_flag("--version", std::string("thetasing ") + cli::kVersion);
  app.require_subcommand(1);
  RunConfig rc;
  std::function<void()> action;

  auto common = [&rc](CLI::App* sub) {
    sub->add_option("--tol", rc.tol, "absolute tolerance for theta evaluation")->check(CLI::PositiveNumber);
    sub->add_option("--seed", rc.seed, "seed for every random choice");
    sub->add_option("--threads", rc.threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  };

  // ---------------------------------------------------------------- theta
  auto* theta = app.add_subcommand("theta", "Riemann theta function")->require_subcommand(1);
  std::string tau_path, z_text;
  int order = 0;
  {
    auto* eval = theta->add_subcommand("eval", "theta and its derivatives at a point");
    common(eval);
    eval->add_option("--tau", tau_path, "period matrix JSON")->required();
    eval->add_option("--z", z_text, "point, e.g. \"0.5+0.5i,0\"")->required();
    eval->add_option("--order", order, "highest derivative order")->check(CLI::Range(0, kMaxThetaOrder));
    eval->callback([&] {
      action = [&] {
        const ThetaContext ctx = load_context(tau_path, rc.tol);
        const CVector z = cli::parse_vector(z_text);
        require_dim(z, ctx.g(), "--z");
        const Jet jet = theta_jet(ctx, z, order);
        ordered_json out = header("theta eval", rc, ordered_json::object());
        out["z"] = to_json(z);
        out["theta"] = to_json(jet.value());
        if (order > 0) {
          ordered_json ders = ordered_json::array();
          for (std::size_t k = 0; k < jet.indices().size(); ++k) {
            ders.push_back({{"index", indices_json(jet.indices()[k])}, {"value", to_json(jet.values()[k])}});
          }
          out["derivatives"] = ders;
        }
        emit(out);
      };
    });
  }

  // ---------------------------------------------------------------- sing
  auto* sing = app.add_subcommand("sing", "singular points of the theta divisor")->require_subcommand(1);
  SingularSearchOptions sopts;
  std::string poly;
  int dim = 0;
  int cone_extra = 0;
  {
    auto* find = sing->add_subcommand("find", "seeded search for singular points");
    common(find);
    find->add_option("--tau", tau_path, "period matrix JSON")->required();
    find->add_option("--grid", sopts.grid_per_dim, "seeds per lattice direction")->check(CLI::PositiveNumber);
    find->add_option("--newton-tol", sopts.newton_tol, "solver residual tolerance")->check(CLI::PositiveNumber);
    find->add_option("--rank-tol", sopts.rank_tol, "relative rank cutoff")->check(CLI::PositiveNumber);
    find->callback([&] {
      action = [&] {
        const ThetaContext ctx = load_context(tau_path, rc.tol);
        const auto records = find_singular_points(ctx, sopts);
        ordered_json out = header("sing find", rc,
                                  {{"newton", num(sopts.newton_tol)}, {"rank", num(sopts.rank_tol)},
                                   {"dedup", num(sopts.dedup_radius)}});
        out["grid_per_dim"] = sopts.grid_per_dim;
        ordered_json pts = ordered_json::array();
        for (const auto& r : records) pts.push_back(record_json(r));
        out["points"] = pts;
        emit(out);
      };
    });

    auto* report = sing->add_subcommand("report", "local data at one point");
    common(report);
    report->add_option("--tau", tau_path, "period matrix JSON");
    report->add_option("--poly", poly, "polynomial stand-in in z1..zg");
    report->add_option("--dim", dim, "number of variables of --poly");
    report->add_option("--z", z_text, "point")->required();
    report->add_option("--rank-tol", sopts.rank_tol, "relative rank cutoff")->check(CLI::PositiveNumber);
    report->add_option("--cone-order", cone_extra, "extra orders of the asymptotic cone")->check(CLI::NonNegativeNumber);
    report->callback([&] {
      action = [&] {
        const auto f = load_function(tau_path, poly, dim, rc.tol);
        const CVector z = cli::parse_vector(z_text);
        require_dim(z, f->dim(), "--z");
        const double eps = sopts.rank_tol;
        const OrderReport ord = singularity_order(*f, z, eps);
        ordered_json out = header("sing report", rc, {{"rank", num(eps)}});
        out["z"] = to_json(z);
        out["order"] = ord.order;
        out["exceeds_dimension"] = ord.exceeds_dimension;
        ordered_json mags = ordered_json::array();
        for (double m : ord.magnitudes) mags.push_back(num(m));
        out["magnitudes"] = mags;
        if (ord.order >= 2) {
          const Quadric q = hessian_quadric(*f, z, eps);
          const RankInfo ri = corank_and_kernel(q, eps);
          ordered_json kernel = ordered_json::array();
          for (const CVector& v : ri.kernel) kernel.push_back(to_json(v));
          out["hessian"] = to_json(q);
          out["corank"] = ri.corank;
          out["kernel"] = kernel;
          const SmoothnessReport sm = smoothness_report(*f, z, eps);
          out["smoothness"] = {{"rank", sm.rank},
                               {"smooth", sm.smooth},
                               {"conormal_dim", sm.conormal.dim_projective},
                               {"conormal_maximal", sm.conormal_maximal}};
          const HomogeneousForm cone = tangent_cone(*f, z, ord.order, eps);
          out["tangent_cone"] = form_json(cone);
          if (ord.order >= 3) {
            const QuadricSystem polars = polar_quadrics(cone, eps);
            out["polar_quadrics_dim"] = polars.dim_projective;
            const auto coincidence = polar_coincidence(cone, 1e-8);
            out["polar_coincidence"] = coincidence
                                           ? ordered_json{{"hyperplane", to_json(coincidence->hyperplane)},
                                                          {"residual", num(coincidence->residual)}}
                                           : ordered_json(nullptr);
          }
          ordered_json vertex = ordered_json::array();
          for (const CVector& v : vertex_of_form(cone, eps)) vertex.push_back(to_json(v));
          out["cone_vertex"] = vertex;
          if (cone_extra > 0) {
            ordered_json forms = ordered_json::array();
            for (const auto& form : asymptotic_cone(*f, z, ord.order + cone_extra, eps)) forms.push_back(form_json(form));
            out["asymptotic_cone"] = forms;
          }
        }
        emit(out);
      };
    });
  }

  // ---------------------------------------------------------------- jets
  auto* jets = app.add_subcommand("jets", "curvi-linear jet operators")->require_subcommand(1);
  int jet_k = 2;
  std::string f_text, g_text, fields_text, b_text;
  int const_n = 0;
  bool extend = false;
  {
    auto* expand = jets->add_subcommand("expand", "terms of the order-k operator");
    common(expand);
    expand->add_option("--k", jet_k, "order")->required()->check(CLI::Range(1, kMaxJetOrder));
    expand->callback([&] {
      action = [&] {
        const JetTerms terms = delta_expand(jet_k);
        ordered_json out = header("jets expand", rc, {{"exact", 0}});
        out["k"] = jet_k;
        ordered_json list = ordered_json::array();
        for (const auto& [mono, c] : terms) list.push_back({{"monomial", mono}, {"coeff", format_rational(c)}});
        out["terms"] = list;
        out["equals_recursive"] = terms == delta_recursive(jet_k);
        emit(out);
      };
    });

    auto* check = jets->add_subcommand("check", "operator identities up to order k");
    common(check);
    check->add_option("--k", jet_k, "order")->required()->check(CLI::Range(1, kMaxJetOrder));
    check->add_option("--f", f_text, "first polynomial")->required();
    check->add_option("--g", g_text, "second polynomial")->required();
    check->add_option("--dim", dim, "number of variables")->required()->check(CLI::PositiveNumber);
    check->add_option("--fields", fields_text, "JSON list of k rational vectors (random from --seed if absent)");
    check->callback([&] {
      action = [&] {
        const QPolynomial f = parse_polynomial(f_text, dim);
        const QPolynomial g = parse_polynomial(g_text, dim);
        std::vector<std::vector<Rational>> fields;
        if (!fields_text.empty()) {
          fields = rational_fields(json_arg(fields_text));
        } else {
          std::mt19937_64 rng(rc.seed);
          std::uniform_int_distribution<int> num_d(-3, 3), den_d(1, 3);
          for (int i = 0; i < jet_k; ++i) {
            std::vector<Rational> v;
            for (int l = 0; l < dim; ++l) {
              const int a = num_d(rng);
              Rational q(a, den_d(rng));
              q.canonicalize();
              v.push_back(q);
            }
            fields.push_back(std::move(v));
          }
        }
        if (static_cast<int>(fields.size()) < jet_k) throw Error(ErrorCode::InvalidInput, "need k fields");
        for (const auto& v : fields) {
          if (static_cast<int>(v.size()) != dim) throw Error(ErrorCode::InvalidInput, "field length must equal --dim");
        }
        ordered_json out = header("jets check", rc, {{"exact", 0}});
        out["k"] = jet_k;
        ordered_json fj = ordered_json::array();
        for (const auto& v : fields) {
          ordered_json row = ordered_json::array();
          for (const auto& q : v) row.push_back(format_rational(q));
          fj.push_back(row);
        }
        out["fields"] = fj;
        ordered_json per = ordered_json::array();
        bool all = true;
        for (int k = 1; k <= jet_k; ++k) {
          const bool leibniz = leibniz_check(k, f, g, fields);
          const bool same = delta_expand(k) == delta_recursive(k);
          all = all && leibniz && same;
          per.push_back({{"k", k}, {"leibniz", leibniz}, {"expand_equals_recursive", same}});
        }
        out["orders"] = per;
        out["all_pass"] = all;
        emit(out);
      };
    });

    auto* residual = jets->add_subcommand("residual", "containment residuals of a curvi-linear jet");
    common(residual);
    residual->add_option("--tau", tau_path, "period matrix JSON");
    residual->add_option("--poly", poly, "polynomial stand-in in z1..zg");
    residual->add_option("--dim", dim, "number of variables of --poly");
    residual->add_option("--z", z_text, "base point")->required();
    residual->add_option("--fields", fields_text, "JSON list of complex vectors (inline or file)");
    residual->add_option("--b", b_text, "constant field b (use with --n)");
    residual->add_option("--n", const_n, "number of orders for the constant field")->check(CLI::PositiveNumber);
    residual->add_flag("--extend", extend, "also solve for the next field");
    residual->callback([&] {
      action = [&] {
        const auto f = load_function(tau_path, poly, dim, rc.tol);
        const CVector z = cli::parse_vector(z_text);
        require_dim(z, f->dim(), "--z");
        ordered_json out = header("jets residual", rc, {{"extend", num(1e-8)}});
        out["z"] = to_json(z);
        auto put = [&out](const ResidualReport& rep) {
          ordered_json raw = ordered_json::array(), normalized = ordered_json::array();
          for (double x : rep.raw) raw.push_back(num(x));
          for (double x : rep.normalized) normalized.push_back(num(x));
          out["raw"] = raw;
          out["normalized"] = normalized;
        };
        if (!b_text.empty()) {
          if (const_n < 1) throw Error(ErrorCode::InvalidInput, "--b needs --n");
          const CVector b = cli::parse_vector(b_text);
          require_dim(b, f->dim(), "--b");
          out["b"] = to_json(b);
          put(constant_field_residuals(*f, z, b, const_n));
        } else {
          if (fields_text.empty()) throw Error(ErrorCode::InvalidInput, "give --fields or --b");
          const std::vector<CVector> fields = cli::vectors_from_json(json_arg(fields_text));
          for (const CVector& v : fields) require_dim(v, f->dim(), "field");
          ordered_json fj = ordered_json::array();
          for (const CVector& v : fields) fj.push_back(to_json(v));
          out["fields"] = fj;
          put(curvilinear_residuals(*f, z, fields));
          if (extend) {
            const auto next = jet_extend(*f, z, fields, 1e-8);
            out["extension"] = next ? ordered_json{{"eta", to_json(next->eta)}, {"residual", num(next->residual)}}
                                    : ordered_json(nullptr);
          }
        }
        emit(out);
      };
    });
  }

  // ---------------------------------------------------------------- tangency
  auto* tangency = app.add_subcommand("tangency", "tangential degeneracy of theta translates")->require_subcommand(1);
  TangencyOptions topts;
  std::string path_file;
  int samples = 50;
  double t0 = 0.0, t1 = 1.0, enter_tol = 1e-6, exit_tol = 1e-4;
  std::string format = "csv";
  {
    auto* check = tangency->add_subcommand("check", "residual at a point, or a membership search for a shift");
    common(check);
    check->add_option("--tau", tau_path, "period matrix JSON")->required();
    check->add_option("--b", b_text, "shift")->required();
    check->add_option("--z", z_text, "evaluate the residual at this point instead of searching");
    check->add_option("--grid", topts.grid_per_dim, "seeds per lattice direction")->check(CLI::PositiveNumber);
    check->add_option("--accept-tol", topts.tol, "acceptance on the combined residual")->check(CLI::PositiveNumber);
    check->callback([&] {
      action = [&] {
        const ThetaContext ctx = load_context(tau_path, rc.tol);
        const CVector b = cli::parse_vector(b_text);
        require_dim(b, ctx.g(), "--b");
        ordered_json out = header("tangency check", rc, {{"accept", num(topts.tol)}, {"rank", num(kRankEps)}});
        out["b"] = to_json(b);
        if (!z_text.empty()) {
          const CVector z = cli::parse_vector(z_text);
          require_dim(z, ctx.g(), "--z");
          out["witness"] = witness_json(degeneracy_residual(ctx, z, {b}));
        } else {
          out["grid_per_dim"] = topts.grid_per_dim;
          const MembershipResult m = n0_membership(ctx, b, topts);
          out["member"] = m.member;
          ordered_json ws = ordered_json::array(), ss = ordered_json::array();
          for (const auto& w : m.witnesses) ws.push_back(witness_json(w));
          for (const auto& w : m.singular_witnesses) ss.push_back(witness_json(w));
          out["witnesses"] = ws;
          out["singular_witnesses"] = ss;
          out["doubled_divisor_distance"] = num(doubled_divisor_distance(ctx, b));
        }
        emit(out);
      };
    });

    auto* scan = tangency->add_subcommand("scan", "tangency residual along a path of shifts");
    common(scan);
    scan->add_option("--tau", tau_path, "period matrix JSON")->required();
    scan->add_option("--path", path_file, "JSON {\"base\", \"direction\"} or a list of waypoints")->required();
    scan->add_option("--samples", samples, "number of samples")->check(CLI::Range(2, 1000000));
    scan->add_option("--t0", t0, "start parameter");
    scan->add_option("--t1", t1, "end parameter");
    scan->add_option("--enter-tol", enter_tol, "a dip opens below this residual")->check(CLI::PositiveNumber);
    scan->add_option("--exit-tol", exit_tol, "a dip closes above this residual")->check(CLI::PositiveNumber);
    scan->add_option("--grid", topts.grid_per_dim, "seeds per lattice direction")->check(CLI::PositiveNumber);
    scan->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    scan->callback([&] {
      action = [&] {
        const ThetaContext ctx = load_context(tau_path, rc.tol);
        const ordered_json pj = json_arg(path_file);
        std::function<CVector(double)> path;
        if (pj.is_object()) {
          if (!pj.contains("base") || !pj.contains("direction")) {
            throw Error(ErrorCode::InvalidInput, "path object needs base and direction");
          }
          const CVector base = cli::vector_from_json(pj.at("base"));
          const CVector dir = cli::vector_from_json(pj.at("direction"));
          require_dim(base, ctx.g(), "base");
          require_dim(dir, ctx.g(), "direction");
          path = [base, dir](double t) -> CVector { return base + t * dir; };
        } else {
          std::vector<CVector> pts = cli::vectors_from_json(pj);
          if (pts.size() < 2) throw Error(ErrorCode::InvalidInput, "need at least two waypoints");
          for (const CVector& p : pts) require_dim(p, ctx.g(), "waypoint");
          path = waypoint_path(std::move(pts));
        }
        const ScanResult res = scan_path(ctx, path, t0, t1, samples, enter_tol, exit_tol, topts);
        if (format == "json") {
          ordered_json out = header("tangency scan", rc, {{"enter", num(enter_tol)}, {"exit", num(exit_tol)}});
          ordered_json sj = ordered_json::array(), dj = ordered_json::array();
          for (const auto& s : res.samples) sj.push_back({{"t", num(s.t)}, {"residual", num(s.residual)}});
          for (const auto& d : res.dips) {
            dj.push_back({{"t_begin", num(d.t_begin)},
                          {"t_end", num(d.t_end)},
                          {"t_min", num(d.t_min)},
                          {"residual_min", num(d.residual_min)}});
          }
          out["samples"] = sj;
          out["dips"] = dj;
          emit(out);
          return;
        }
        std::cout << "# thetasing " << cli::kVersion << " tangency scan seed=" << rc.seed
                  << " tol=" << cli::format_double(rc.tol) << " enter_tol=" << cli::format_double(enter_tol)
                  << " exit_tol=" << cli::format_double(exit_tol) << " grid=" << topts.grid_per_dim << "\n";
        for (const auto& d : res.dips) {
          std::cout << "# dip t_begin=" << cli::format_double(d.t_begin) << " t_end=" << cli::format_double(d.t_end)
                    << " t_min=" << cli::format_double(d.t_min)
                    << " residual_min=" << cli::format_double(d.residual_min) << "\n";
        }
        std::cout << "t,residual\n";
        for (const auto& s : res.samples) {
          std::cout << cli::format_double(s.t) << "," << cli::format_double(s.residual) << "\n";
        }
      };
    });
  }

  // ---------------------------------------------------------------- boundary
  auto* boundary = app.add_subcommand("boundary", "vertical singularities over the boundary")->require_subcommand(1);
  BoundaryScanOptions bopts;
  std::string omega_text, omega2_text, u_text, u2_text, t_text = "1,0", sign_text = "minus";
  bool scan_flag = false;
  {
    auto* rank1 = boundary->add_subcommand("rank1", "torus rank 1");
    common(rank1);
    rank1->add_option("--base", tau_path, "period matrix JSON of the base")->required();
    rank1->add_option("--omega", omega_text, "extension class")->required();
    rank1->add_flag("--scan", scan_flag, "seeded search over the (z, u) chart");
    rank1->add_option("--z", z_text, "point to classify");
    rank1->add_option("--u", u_text, "torus coordinate, \"re,im\"");
    rank1->add_option("--grid", bopts.z_grid_per_dim, "z seeds per lattice direction")->check(CLI::PositiveNumber);
    rank1->add_option("--accept-tol", bopts.tol, "accepted residual")->check(CLI::PositiveNumber);
    rank1->callback([&] {
      action = [&] {
        const Rank1Data d(load_context(tau_path, rc.tol), cli::parse_vector(omega_text));
        require_dim(d.omega, d.base.g(), "--omega");
        ordered_json out = header("boundary rank1", rc, {{"accept", num(bopts.tol)}});
        out["omega"] = to_json(d.omega);
        ordered_json recs = ordered_json::array();
        if (scan_flag) {
          out["grid_per_dim"] = bopts.z_grid_per_dim;
          for (const auto& r : vsing_scan_rank1(d, bopts)) recs.push_back(vsing_json(r));
        } else {
          if (z_text.empty() || u_text.empty()) throw Error(ErrorCode::InvalidInput, "give --scan or both --z and --u");
          const CVector z = cli::parse_vector(z_text);
          require_dim(z, d.base.g(), "--z");
          const cplx u = cli::parse_scalar(u_text);
          ordered_json rec = vsing_json(vsing_residual_rank1(d, z, u, bopts.tol));
          try {
            const Quadric q = quadric_rank1(d, z, u, bopts.tol);
            rec["quadric"] = to_json(q);
            rec["corank"] = corank_and_kernel(q).corank;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NotAVerticalSingularity) throw;
            rec["quadric"] = nullptr;
          }
          recs.push_back(rec);
        }
        out["records"] = recs;
        emit(out);
      };
    });

    auto* rank2 = boundary->add_subcommand("rank2", "torus rank 2");
    common(rank2);
    rank2->add_option("--base", tau_path, "period matrix JSON of the base")->required();
    rank2->add_option("--omega1", omega_text, "first extension class")->required();
    rank2->add_option("--omega2", omega2_text, "second extension class")->required();
    rank2->add_option("--t", t_text, "gluing parameter, \"re,im\"");
    rank2->add_option("--sign", sign_text, "sign of the t u1 u2 term")->check(CLI::IsMember({"minus", "plus"}));
    rank2->add_flag("--scan", scan_flag, "seeded search over the (z, u1, u2) chart");
    rank2->add_option("--z", z_text, "point to classify");
    rank2->add_option("--u1", u_text, "first torus coordinate");
    rank2->add_option("--u2", u2_text, "second torus coordinate");
    rank2->add_option("--grid", bopts.z_grid_per_dim, "z seeds per lattice direction")->check(CLI::PositiveNumber);
    rank2->add_option("--accept-tol", bopts.tol, "accepted residual")->check(CLI::PositiveNumber);
    rank2->callback([&] {
      action = [&] {
        const Rank2Data d(load_context(tau_path, rc.tol), cli::parse_vector(omega_text), cli::parse_vector(omega2_text),
                          cli::parse_scalar(t_text));
        require_dim(d.omega1, d.base.g(), "--omega1");
        require_dim(d.omega2, d.base.g(), "--omega2");
        ordered_json out = header("boundary rank2", rc, {{"accept", num(bopts.tol)}});
        out["omega1"] = to_json(d.omega1);
        out["omega2"] = to_json(d.omega2);
        out["t"] = to_json(d.t);
        out["sign"] = sign_text;
        ordered_json recs = ordered_json::array();
        if (scan_flag) {
          out["grid_per_dim"] = bopts.z_grid_per_dim;
          for (const auto& r : vsing_scan_rank2(d, bopts)) recs.push_back(vsing_json(r));
        } else {
          if (z_text.empty() || u_text.empty() || u2_text.empty()) {
            throw Error(ErrorCode::InvalidInput, "give --scan or all of --z, --u1, --u2");
          }
          const CVector z = cli::parse_vector(z_text);
          require_dim(z, d.base.g(), "--z");
          const Rank2Sign sign = sign_text == "plus" ? Rank2Sign::Plus : Rank2Sign::Minus;
          recs.push_back(vsing_json(
              vsing_classify_rank2(d, z, cli::parse_scalar(u_text), cli::parse_scalar(u2_text), sign, bopts.tol)));
        }
        out["records"] = recs;
        emit(out);
      };
    });
  }

  // ---------------------------------------------------------------- pencil
  auto* pencil = app.add_subcommand("pencil", "exact pencils of quadrics")->require_subcommand(1);
  std::string pencil_file, vertex_text;
  bool with_report = false;
  {
    auto* analyze_cmd = pencil->add_subcommand("analyze", "discriminant, vertices and clause checks");
    common(analyze_cmd);
    analyze_cmd->add_option("--file", pencil_file, "pencil JSON")->required();
    analyze_cmd->callback([&] {
      action = [&] {
        const Pencil p = cli::pencil_from_json(cli::read_json_file(pencil_file));
        ordered_json out = header("pencil analyze", rc, {{"exact", 0}});
        out["pencil"] = cli::pencil_to_json(p);
        out["report"] = report_json(analyze(p, rc.seed));
        emit(out);
      };
    });

    auto* generate = pencil->add_subcommand("generate", "pencil with a prescribed vertex curve");
    common(generate);
    generate->add_option("--vertex", vertex_text, "polynomial vector in t, e.g. \"1,t,t^2,0,0\"")->required();
    generate->add_flag("--analyze", with_report, "attach the full report");
    generate->callback([&] {
      action = [&] {
        const PVec nu = parse_vertex_curve(vertex_text);
        const Pencil p = prescribed_vertex_generator(nu, rc.seed);
        ordered_json out = header("pencil generate", rc, {{"exact", 0}});
        out["vertex_curve"] = to_json(nu);
        out["pencil"] = cli::pencil_to_json(p);
        if (with_report) out["report"] = report_json(analyze(p, rc.seed));
        emit(out);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (rc.threads > 0) omp_set_num_threads(rc.threads);
  try {
    if (action) action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::SolverBudgetExceeded ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
