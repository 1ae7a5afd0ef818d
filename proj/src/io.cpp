#include "kscope/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "kscope/errors.hpp"

namespace kscope::io {

namespace {

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

std::string verdict_text(const Verdict& v) { return v.describe(); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string table_csv(const ValueTable& t) {
  std::string out = "n,value\n";
  for (std::int64_t n = 1; n <= t.size(); ++n) {
    out += std::to_string(n);
    out += ',';
    out += std::to_string(t(n));
    out += '\n';
  }
  return out;
}

Json table_json(const ValueTable& t) {
  Json params = Json::object();
  if (t.id().param()) params["param"] = *t.id().param();
  if (t.id().modulus()) params["modulus"] = *t.id().modulus();
  Json j;
  j["id"] = std::string(tag_name(t.id().tag()));
  j["params"] = params;
  j["N"] = t.size();
  j["values"] = std::vector<std::int64_t>(t.values().begin(), t.values().end());
  return j;
}

Json profile_json(const KernelProfile& p) {
  Json j;
  j["k"] = p.k;
  j["M"] = p.M;
  j["L"] = p.L;
  j["counts"] = p.distinct_counts;
  j["verdict"] = verdict_text(p.verdict);
  return j;
}

Json profile_json(const RankProfile& p) {
  Json j;
  j["k"] = p.k;
  j["M"] = p.M;
  j["L"] = p.L;
  j["ranks"] = p.ranks;
  j["verdict"] = verdict_text(p.verdict);
  return j;
}

std::string profile_csv(const KernelProfile& p) {
  std::string out = "depth,count\n";
  for (std::size_t d = 0; d < p.distinct_counts.size(); ++d) {
    out += std::to_string(d) + "," + std::to_string(p.distinct_counts[d]) + "\n";
  }
  return out;
}

std::string profile_csv(const RankProfile& p) {
  std::string out = "depth,count\n";
  for (std::size_t d = 0; d < p.ranks.size(); ++d) out += std::to_string(d) + "," + std::to_string(p.ranks[d]) + "\n";
  return out;
}

Json representation_json(const LinearRepresentation& rep) {
  Json j;
  j["k"] = rep.base();
  j["t"] = rep.dimension();
  j["matrices"] = rep.matrices();
  j["seed"] = rep.seed();
  j["initial"] = rep.initial();
  j["output_coord"] = rep.output_coord();
  Json labels = Json::array();
  for (const KernelLabel& l : rep.labels()) labels.push_back(Json::array({l.l, l.r}));
  j["labels"] = labels;
  j["verified_to"] = rep.verified_to();
  return j;
}

LinearRepresentation representation_from_json(const Json& j) {
  try {
    const int k = j.at("k").get<int>();
    auto matrices = j.at("matrices").get<std::vector<IntMatrix>>();
    std::vector<std::vector<std::int64_t>> initial;
    if (j.contains("initial")) {
      initial = j.at("initial").get<std::vector<std::vector<std::int64_t>>>();
    } else {
      initial.push_back(j.at("seed").get<std::vector<std::int64_t>>());
    }
    std::vector<KernelLabel> labels;
    if (j.contains("labels")) {
      for (const auto& l : j.at("labels")) labels.push_back({l.at(0).get<int>(), l.at(1).get<std::int64_t>()});
    }
    const std::int64_t verified = j.value("verified_to", std::int64_t{0});
    return LinearRepresentation(k, std::move(matrices), std::move(initial), j.at("output_coord").get<int>(),
                                std::move(labels), verified);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed representation: ") + e.what());
  }
}

Json lattice_json(const PoleLattice& lattice) {
  Json j;
  j["k"] = lattice.k;
  Json eig = Json::array();
  for (std::size_t i = 0; i < lattice.eigenvalues.size(); ++i) {
    eig.push_back({{"alpha", complex_json(lattice.eigenvalues[i])}, {"multiplicity", lattice.multiplicities[i]}});
  }
  j["eigenvalues"] = eig;
  j["skipped"] = lattice.skipped;
  std::vector<std::string> charpoly;
  for (const mpq_class& c : lattice.charpoly) charpoly.push_back(c.get_str());
  j["charpoly"] = charpoly;
  j["eigenvalue_one_certified"] = lattice.eigenvalue_one_certified;
  j["m_max"] = lattice.m_max;
  j["l_max"] = lattice.l_max;
  j["points"] = lattice.points.size();
  return j;
}

std::string lattice_csv(const std::vector<PolePoint>& points) {
  std::string out = "re,im,alpha_index,m,l\n";
  for (const PolePoint& p : points) {
    out += format_double(p.s.real()) + "," + format_double(p.s.imag()) + "," + std::to_string(p.alpha_index) + "," +
           std::to_string(p.m) + "," + std::to_string(p.l) + "\n";
  }
  return out;
}

Json eval_json(const EvalResult& r) {
  Json j;
  j["s"] = complex_json(r.s);
  j["value"] = r.value ? complex_json(*r.value) : Json(nullptr);
  j["method"] = std::string(method_name(r.method));
  j["error_estimate"] = r.error_estimate;
  j["flags"] = {{"near_singular", r.flags.near_singular},
                {"det_magnitude", r.flags.det_magnitude},
                {"truncated", r.flags.truncated},
                {"terms", r.flags.terms},
                {"removable", r.flags.removable}};
  return j;
}

Json identity_json(const IdentityReport& report) {
  Json j;
  j["function"] = report.function;
  j["formula"] = report.formula;
  j["N"] = report.N_terms;
  Json samples = Json::array();
  for (const IdentitySample& s : report.samples) {
    samples.push_back({{"s", complex_json(s.s)},
                       {"lhs", complex_json(s.lhs)},
                       {"rhs", complex_json(s.rhs)},
                       {"residual", s.residual},
                       {"bound", s.bound},
                       {"pass", s.pass}});
  }
  j["samples"] = samples;
  j["pass"] = report.all_pass();
  return j;
}

Json pole_scan_json(const PoleScanReport& report) {
  Json j;
  j["rectangle"] = {{"a", report.a}, {"b", report.b}, {"T", report.T}, {"step", report.step}};
  j["grid_points"] = report.grid_points;
  Json cands = Json::array();
  for (const PoleCandidate& c : report.candidates) {
    cands.push_back({{"s", complex_json(c.s)},
                     {"level", c.level},
                     {"det_magnitude", c.det_magnitude},
                     {"growth_ratio", std::isnan(c.growth_ratio) ? Json(nullptr) : Json(c.growth_ratio)},
                     {"genuine", c.genuine},
                     {"matches_lattice", c.matches_lattice}});
  }
  j["candidates"] = cands;
  j["observed_poles"] = report.observed_poles();
  j["predicted_points"] = report.predicted.size();
  j["observed_within_predicted"] = report.observed_within_predicted();
  return j;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "re,im,abs_value,det_magnitude,flags\n";
  for (const ScanRow& r : rows) {
    std::string flags;
    if (r.near_singular) flags += "S";
    if (r.truncated) flags += "T";
    if (flags.empty()) flags = "-";
    out += format_double(r.re) + "," + format_double(r.im) + "," + format_double(r.abs_value) + "," +
           format_double(r.det_magnitude) + "," + flags + "\n";
  }
  return out;
}

std::string zeros_csv(const std::vector<ZeroRecord>& zeros) {
  std::string out = "index,ordinate\n";
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_double(zeros[i].ordinate) + "\n";
  }
  return out;
}

std::string count_csv(const std::vector<TlogTRow>& rows) {
  std::string out = "T,N,ratio_TlogT\n";
  for (const TlogTRow& r : rows) {
    out += format_double(r.T) + "," + std::to_string(r.N) + "," + format_double(r.ratio_TlogT) + "\n";
  }
  return out;
}

Json zero_count_json(const ZeroCount& c) {
  Json j;
  j["T"] = c.T;
  j["count"] = c.count;
  j["sign_changes"] = c.sign_changes;
  j["winding"] = c.winding;
  j["contour_evaluations"] = c.contour_evaluations;
  j["agrees"] = c.agrees();
  return j;
}

Json series_json(const FpSeries& s) {
  Json j;
  j["p"] = s.p;
  j["reliable_len"] = s.reliable_len;
  std::vector<int> coeffs(s.coeffs.begin(), s.coeffs.end());
  j["coeffs"] = coeffs;
  return j;
}

Json orbit_json(const OrbitReport& report) {
  const AlgebraicityVerdict v = algebraicity_verdict(report);
  Json j;
  switch (report.kind) {
    case OrbitReport::Kind::finite: j["verdict"] = "finite"; break;
    case OrbitReport::Kind::growing: j["verdict"] = "growing"; break;
    case OrbitReport::Kind::exhausted: j["verdict"] = "inconclusive"; break;
  }
  j["size_or_depth"] = report.kind == OrbitReport::Kind::exhausted ? report.depth : report.size;
  j["window"] = report.window;
  j["depth"] = report.depth;
  j["budget"] = report.budget;
  j["evidence"] = v.describe();
  return j;
}

}  // namespace kscope::io
