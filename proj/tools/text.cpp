#include "text.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace memcell::cli {

namespace {

using io::Json;

std::string tuple(const Json& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i].get<long long>());
  }
  return s + ")";
}

std::string polar(const Json& z) {
  const double re = z[0].get<double>();
  const double im = z[1].get<double>();
  double ph = std::atan2(im, re);
  if (ph < 0) ph += 2 * M_PI;
  if (std::abs(ph - 2 * M_PI) < 1e-12) ph = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f∠%.6f", std::hypot(re, im), ph);
  return buf;
}

std::string entries(const Json& list) {
  std::string s = "{";
  bool first = true;
  for (const auto& e : list) {
    if (!first) s += ", ";
    first = false;
    s += polar(e["value"]);
    if (e["multiplicity"].get<long long>() > 1) s += " x" + std::to_string(e["multiplicity"].get<long long>());
  }
  return s + "}";
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void analyze(const Json& r, std::ostringstream& os) {
  os << "shape " << tuple(r["shape"]) << "\n";
  const auto& st = r["structure"];
  os << "dim " << st["dim"] << ", fix dimension " << st["fix_dimension"] << ", decaying rank " << st["decaying_rank"]
     << "\n";
  for (const auto& s : st["sectors"]) {
    os << "  sector " << s["index"] << ": d=" << s["d"] << " m=" << s["m"] << "\n";
  }
  const auto& sp = r["spectrum"];
  os << "eta " << entries(sp["eta"]) << "\n";
  if (sp.contains("internal")) {
    for (std::size_t k = 0; k < sp["internal"].size(); ++k) {
      os << "  eta_" << k << " " << entries(sp["internal"][k]) << "\n";
    }
    os << "external " << entries(sp["external"]) << "\n";
  }
  if (r.contains("period")) os << "period " << r["period"] << "\n";
}

void superactivate(const Json& r, std::ostringstream& os) {
  os << "shape(e) " << tuple(r["shape_e"]) << ", shape(f) " << tuple(r["shape_f"]) << ", shape(e x f) "
     << tuple(r["shape_product"]) << "\n";
  const auto& c = r["classical"];
  os << "classical: " << (c["applicable"].get<bool>() ? (c["verdict"].get<bool>() ? "super-activates" : "no")
                                                         : "not applicable")
     << ", m=" << c["m"] << ", states " << c["states"].size() << "\n";
  const auto& q = r["quantum"];
  os << "quantum: " << (q["applicable"].get<bool>() ? (q["verdict"].get<bool>() ? "super-activates" : "no")
                                                       : "not applicable");
  if (!q["pair"].is_null()) os << ", pair a=" << polar(q["pair"]["a"]) << " b=" << polar(q["pair"]["b"]);
  os << "\n";
  if (!r["witness"].is_null()) {
    const auto& w = r["witness"];
    os << "witness: epsilon " << num(w["epsilon"].get<double>()) << ", min PT eigenvalue "
       << num(w["certificate"]["min_pt_eigenvalue"].get<double>()) << " (" << w["certificate"]["verdict"].get<std::string>()
       << "), stationarity residual " << num(w["stationarity_residual"].get<double>()) << "\n";
  }
  if (r.contains("witness_error")) os << "witness: " << r["witness_error"].get<std::string>() << "\n";
  for (const auto& cert : r["certificates"]) {
    os << "  " << cert["state"].get<std::string>() << ": " << cert["verdict"].get<std::string>() << ", min PT eigenvalue "
       << num(cert["min_pt_eigenvalue"].get<double>()) << "\n";
  }
  os << "growth (t, |shape|, max, fix):\n";
  for (const auto& row : r["growth"]["rows"]) {
    os << "  " << row["t"] << " " << row["length"] << " " << row["max"] << " " << row["fix_dimension"] << "\n";
  }
  if (r["growth"]["truncated"].get<bool>()) {
    os << "  truncated: " << r["growth"]["truncation_reason"].get<std::string>() << "\n";
  }
}

void roundtrip(const Json& r, std::ostringstream& os) {
  os << "address " << r["address"] << ", payload " << r["payload"].get<std::string>() << "\n";
  for (const auto& row : r["rows"]) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", row["fidelity"].get<double>());
    os << "  n=" << row["n"] << " address " << (row["address_recovered"].get<bool>() ? "ok" : "LOST")
       << " fidelity " << buf << "\n";
  }
}

}  // namespace

std::string render_text(const Json& report) {
  std::ostringstream os;
  const std::string cmd = report.value("command", "");
  if (cmd == "validate") {
    os << report["source"].get<std::string>() << ": " << (report["valid"].get<bool>() ? "valid" : "INVALID")
       << " (dim " << report["dim"] << ", " << report["kraus_count"] << " Kraus operators, residual "
       << num(report["residual"].get<double>()) << ")\n";
  } else if (cmd == "analyze") {
    analyze(report, os);
  } else if (cmd == "superactivate") {
    superactivate(report, os);
  } else if (cmd == "roundtrip") {
    roundtrip(report, os);
  } else if (cmd == "oracle") {
    for (const auto& c : report["checks"]) {
      os << (c["pass"].get<bool>() ? "PASS  " : "FAIL  ") << c["name"].get<std::string>();
      if (!c["detail"].get<std::string>().empty()) os << "  [" << c["detail"].get<std::string>() << "]";
      os << "\n";
    }
  } else {
    os << report.dump(2) << "\n";
  }
  return os.str();
}

}  // namespace memcell::cli
