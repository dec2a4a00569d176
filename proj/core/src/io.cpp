#include "memcell/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include "memcell/errors.hpp"
#include "memcell/linalg.hpp"

namespace memcell::io {

namespace {

constexpr const char* kModule = "io";

std::string field(const std::string& path, const std::string& what) { return "field " + path + ": " + what; }

Complex parse_entry(const Json& j, const std::string& path, const std::string& source) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(kModule, source + ": " + field(path, "expected [re, im]"));
  }
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw ParseError(kModule, source + ": " + field(path, "non-finite entry"));
  }
  return {re, im};
}

Matrix parse_matrix(const Json& j, Index dim, const std::string& path, const std::string& source) {
  if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
    throw ParseError(kModule, source + ": " + field(path, "expected " + std::to_string(dim) + " rows"));
  }
  Matrix m(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
      throw ParseError(kModule, source + ": " + field(rp, "expected " + std::to_string(dim) + " entries"));
    }
    for (Index c = 0; c < dim; ++c) {
      m(r, c) = parse_entry(row[static_cast<std::size_t>(c)], rp + "[" + std::to_string(c) + "]", source);
    }
  }
  return m;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports "parse error at line L, column C: ..."
    throw ParseError(kModule, source + ": " + e.what());
  }
}

Json entries_json(const std::vector<SpectrumEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) out.push_back(to_json(e));
  return out;
}

Json header(const std::string& command, const AnalysisConfig& config) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = to_json(config);
  return j;
}

}  // namespace

std::string read_text(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(kModule, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ChannelFile parse_channel_file(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  if (!j.is_object()) throw ParseError(kModule, source + ": top level must be an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw ParseError(kModule, source + ": " + field("dim", "expected a positive integer"));
  }
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty()) {
    throw ParseError(kModule, source + ": " + field("kraus", "expected a non-empty array of matrices"));
  }
  ChannelFile out;
  out.source = source;
  out.dim = static_cast<Index>(j["dim"].get<long long>());
  for (std::size_t k = 0; k < j["kraus"].size(); ++k) {
    out.kraus.push_back(parse_matrix(j["kraus"][k], out.dim, "kraus[" + std::to_string(k) + "]", source));
  }
  return out;
}

ChannelFile load_channel_file(const std::string& path) {
  return parse_channel_file(read_text(path), path == "-" ? "<stdin>" : path);
}

QuantumChannel load_channel(const std::string& path, double tol_cptp) {
  ChannelFile file = load_channel_file(path);
  const auto report = validate_cptp(file.kraus, tol_cptp);
  if (!report.pass) {
    std::ostringstream os;
    os << file.source << ": Kraus operators are not trace preserving, residual " << report.residual;
    throw DomainError("channel", os.str());
  }
  return QuantumChannel::from_kraus(std::move(file.kraus), tol_cptp);
}

Json channel_to_json(const QuantumChannel& channel) {
  Json j;
  j["dim"] = channel.dim();
  j["kraus"] = Json::array();
  // Full precision: a rounded Kraus set would no longer be exactly CPTP.
  for (const auto& k : channel.kraus()) {
    Json rows = Json::array();
    for (Index r = 0; r < k.rows(); ++r) {
      Json row = Json::array();
      for (Index c = 0; c < k.cols(); ++c) row.push_back(Json::array({k(r, c).real(), k(r, c).imag()}));
      rows.push_back(std::move(row));
    }
    j["kraus"].push_back(std::move(rows));
  }
  return j;
}

double rounded(double x) {
  const double r = std::round(x * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

Json to_json(Complex z) { return Json::array({rounded(z.real()), rounded(z.imag())}); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Shape& shape) {
  Json j = Json::array();
  for (Index d : shape.dims) j.push_back(d);
  return j;
}

Json to_json(const SpectrumEntry& entry) {
  return {{"value", to_json(entry.value)},
          {"magnitude", rounded(std::abs(entry.value))},
          {"phase", rounded(linalg::phase(entry.value, 1e-12))},
          {"multiplicity", entry.multiplicity}};
}

Json to_json(const PeripheralSpectrum& spectrum) {
  Json j;
  j["eta"] = entries_json(spectrum.entries());
  j["size"] = spectrum.size();
  if (spectrum.classification) {
    Json internal = Json::array();
    for (const auto& per : spectrum.classification->internal) internal.push_back(entries_json(per));
    j["internal"] = internal;
    j["external"] = entries_json(spectrum.classification->external);
  }
  return j;
}

Json to_json(const StructureDecomposition& dec) {
  Json j;
  j["dim"] = dec.dim;
  j["shape"] = to_json(dec.shape());
  j["seed_used"] = dec.seed_used;
  j["attempts"] = dec.attempts;
  j["fix_dimension"] = dec.fix_basis.size();
  j["decaying_rank"] = static_cast<Index>(std::llround(dec.decaying_projector.trace().real()));
  j["sectors"] = Json::array();
  for (const auto& s : dec.sectors) {
    j["sectors"].push_back({{"index", s.index},
                            {"d", s.d},
                            {"m", s.m},
                            {"sigma", to_json(s.sigma.matrix())},
                            {"projector", to_json(s.projector())}});
  }
  return j;
}

Json to_json(const CyclicFamily& family) {
  Json j;
  j["period"] = family.period;
  j["states"] = Json::array();
  for (const auto& s : family.states) j["states"].push_back(to_json(s.matrix()));
  return j;
}

Json to_json(const EntanglementCertificate& cert) {
  return {{"min_pt_eigenvalue", rounded(cert.min_pt_eigenvalue)},
          {"dim_e", cert.dim_e},
          {"dim_f", cert.dim_f},
          {"entangled", cert.entangled},
          {"verdict", cert.verdict}};
}

Json to_json(const SuperactivationReport& report) {
  Json j;
  j["shape_e"] = to_json(report.shape_e);
  j["shape_f"] = to_json(report.shape_f);
  j["shape_product"] = to_json(report.shape_product);

  Json classical;
  classical["applicable"] = report.classical_applicable;
  classical["verdict"] = report.classical_verdict;
  classical["m"] = report.classical_m;
  classical["states"] = Json::array();
  for (const auto& s : report.classical_states) {
    Json terms = Json::array();
    for (const auto& t : s.terms) {
      Json factors = Json::array();
      for (const auto& f : t.factors) factors.push_back(to_json(f));
      terms.push_back({{"weight", rounded(t.weight)}, {"factors", factors}});
    }
    classical["states"].push_back({{"state", to_json(s.state.matrix())}, {"terms", terms}});
  }
  j["classical"] = classical;

  Json quantum;
  quantum["applicable"] = report.quantum.applicable;
  quantum["verdict"] = report.quantum.superactivates;
  if (report.quantum.pair) {
    const auto& p = *report.quantum.pair;
    quantum["pair"] = {{"a", to_json(p.a)},
                       {"b", to_json(p.b)},
                       {"a_external", p.a_external},
                       {"b_external", p.b_external}};
  } else {
    quantum["pair"] = nullptr;
  }
  j["quantum"] = quantum;

  if (report.witness) {
    const auto& w = *report.witness;
    j["witness"] = {{"state", to_json(w.state.matrix())},
                    {"epsilon", rounded(w.epsilon)},
                    {"normalization", rounded(w.normalization)},
                    {"e_sectors", {w.e_sectors[0], w.e_sectors[1]}},
                    {"f_sectors", {w.f_sectors[0], w.f_sectors[1]}},
                    {"stationarity_residual", rounded(w.stationarity_residual)},
                    {"certificate", to_json(w.certificate)}};
  } else {
    j["witness"] = nullptr;
  }
  if (!report.witness_error.empty()) j["witness_error"] = report.witness_error;

  j["certificates"] = Json::array();
  for (const auto& c : report.certificates) {
    Json cj = to_json(c.certificate);
    cj["state"] = c.state;
    j["certificates"].push_back(cj);
  }

  Json growth;
  growth["requested"] = report.growth.requested;
  growth["truncated"] = report.growth.truncated;
  if (report.growth.truncated) growth["truncation_reason"] = report.growth.truncation_reason;
  growth["rows"] = Json::array();
  for (const auto& r : report.growth.rows) {
    growth["rows"].push_back({{"t", r.t}, {"length", r.length}, {"max", r.max}, {"fix_dimension", r.fix_dimension}});
  }
  j["growth"] = growth;
  return j;
}

AnalysisOptions AnalysisConfig::options() const {
  AnalysisOptions o;
  o.tol = tol;
  o.seed = seed;
  return o;
}

void AnalysisConfig::check() const {
  for (double t : {tol.cptp, tol.psd, tol.eig, tol.cluster}) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("cli", "tolerances must be positive");
  }
  if (t_max < 1) throw DomainError("cli", "t_max must be at least 1");
  if (budget.max_dim < 1 || budget.max_fix_dimension < 1) throw DomainError("cli", "budget must be positive");
  if (format != "json" && format != "text") throw DomainError("cli", "format must be json or text");
}

AnalysisConfig parse_config(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  if (!j.is_object()) throw ParseError(kModule, source + ": top level must be an object");
  AnalysisConfig c;
  auto number = [&](const std::string& key) {
    if (!j[key].is_number()) throw ParseError(kModule, source + ": " + field(key, "expected a number"));
    return j[key].get<double>();
  };
  auto integer = [&](const std::string& key) {
    if (!j[key].is_number_unsigned()) {
      throw ParseError(kModule, source + ": " + field(key, "expected a non-negative integer"));
    }
    return j[key].get<std::uint64_t>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "tol_cptp") {
      c.tol.cptp = number(key);
    } else if (key == "tol_psd") {
      c.tol.psd = number(key);
    } else if (key == "tol_eig") {
      c.tol.eig = number(key);
    } else if (key == "clustering") {
      c.tol.cluster = number(key);
    } else if (key == "seed") {
      c.seed = integer(key);
    } else if (key == "t_max") {
      c.t_max = static_cast<int>(integer(key));
    } else if (key == "max_dim") {
      c.budget.max_dim = static_cast<Index>(integer(key));
    } else if (key == "max_fix_dimension") {
      c.budget.max_fix_dimension = static_cast<std::size_t>(integer(key));
    } else if (key == "format") {
      if (!value.is_string()) throw ParseError(kModule, source + ": " + field(key, "expected a string"));
      c.format = value.get<std::string>();
    } else {
      throw ParseError(kModule, source + ": unknown key " + key);
    }
  }
  return c;
}

Json to_json(const AnalysisConfig& config) {
  return {{"tol_cptp", config.tol.cptp},
          {"tol_psd", config.tol.psd},
          {"tol_eig", config.tol.eig},
          {"clustering", config.tol.cluster},
          {"seed", config.seed},
          {"t_max", config.t_max},
          {"max_dim", config.budget.max_dim},
          {"max_fix_dimension", config.budget.max_fix_dimension}};
}

DensityOperator parse_payload(const std::string& spec, Index dim, std::uint64_t seed) {
  if (spec.rfind("basis:", 0) == 0) {
    Index i = -1;
    try {
      std::size_t used = 0;
      i = static_cast<Index>(std::stoll(spec.substr(6), &used));
      if (used != spec.size() - 6) i = -1;
    } catch (const std::exception&) {
      i = -1;
    }
    if (i < 0 || i >= dim) throw DomainError("memory", "payload " + spec + " is outside dimension " + std::to_string(dim));
    Matrix m = Matrix::Zero(dim, dim);
    m(i, i) = 1.0;
    return DensityOperator::from_matrix(m);
  }
  if (spec == "plus") {
    const Vector v = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
    return DensityOperator::from_matrix(v * v.adjoint());
  }
  if (spec == "mixed") return DensityOperator::from_matrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
  if (spec == "random") {
    std::mt19937_64 rng(seed);
    return DensityOperator::from_matrix(linalg::random_density(dim, rng));
  }
  if (!spec.empty() && spec[0] == '@') {
    const std::string path = spec.substr(1);
    const Json j = parse_json(read_text(path), path);
    const Matrix m = parse_matrix(j, dim, "payload", path);
    return DensityOperator::from_matrix(m);
  }
  throw ParseError(kModule, "unknown payload spec '" + spec + "' (basis:i, plus, mixed, random, @file)");
}

Json validate_report(const ChannelFile& file, const CptpReport& report, double tol) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = "validate";
  j["source"] = file.source;
  j["dim"] = report.dim;
  j["kraus_count"] = report.kraus_count;
  j["residual"] = report.residual;
  j["tol_cptp"] = tol;
  j["valid"] = report.pass;
  return j;
}

Json analyze_report(const CellAnalysis& analysis, const AnalysisConfig& config) {
  Json j = header("analyze", config);
  j["shape"] = to_json(analysis.shape);
  j["structure"] = to_json(analysis.structure);
  j["spectrum"] = to_json(analysis.spectrum);
  if (analysis.cyclic) {
    j["period"] = analysis.cyclic->period;
    j["cyclic_states"] = to_json(*analysis.cyclic);
  }
  return j;
}

Json superactivate_report(const SuperactivationReport& report, const AnalysisConfig& config) {
  Json j = header("superactivate", config);
  j.update(to_json(report));
  return j;
}

Json roundtrip_report(const std::vector<RoundTrip>& rows, const std::string& payload_spec,
                      const AnalysisConfig& config) {
  Json j = header("roundtrip", config);
  j["payload"] = payload_spec;
  j["address"] = rows.empty() ? 0 : rows.front().address;
  j["rows"] = Json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"n", r.n}, {"address_recovered", r.address_recovered}, {"fidelity", rounded(r.fidelity)}});
  }
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace memcell::io
