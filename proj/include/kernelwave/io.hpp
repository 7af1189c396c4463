#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expansion.hpp"
#include "kernels.hpp"

namespace kernelwave::io {

/// Shortest form that round-trips a double: 17 significant digits.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size())
    throw UsageError("not a number: '" + s + "'");
  return x;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    out.push_back(item);
  if (!s.empty() && s.back() == sep)
    out.emplace_back();
  return out;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ','))
    out.push_back(parse_double(item));
  return out;
}

/// "u,v,tau1,tau2"
inline Point parse_point(const std::string& s) {
  const auto x = parse_list(s);
  if (x.size() != 4)
    throw UsageError("a point needs four values u,v,tau1,tau2: '" + s + "'");
  return {x[0], x[1], x[2], x[3]};
}

inline const char* kernel_csv_header = "kernel,a,tau1,tau2,u,v,re,im,err,backend";

inline std::string kernel_csv_row(const KernelQuery& q, const KernelValue& v) {
  std::string row = to_string(q.kernel) + ",";
  row += q.a_param ? fmt(*q.a_param) : std::string();
  for (double x : {q.tau1, q.tau2, q.u, q.v, v.value.real(), v.value.imag(), v.error_estimate})
    row += "," + fmt(x);
  return row + "," + to_string(v.backend_used);
}

/// One query from a JSON object with keys kernel, tau1, tau2, u, v and
/// optionally a, backend.
inline KernelQuery query_from_json(const nlohmann::json& j, const KernelQuery& defaults) {
  if (!j.is_object())
    throw UsageError("query must be a JSON object");
  KernelQuery q = defaults;
  try {
    q.kernel = parse_kernel(j.at("kernel").get<std::string>());
    q.tau1 = j.value("tau1", 0.0);
    q.tau2 = j.value("tau2", 0.0);
    q.u = j.at("u").get<double>();
    q.v = j.at("v").get<double>();
    q.a_param.reset();
    if (j.contains("a") && !j.at("a").is_null())
      q.a_param = j.at("a").get<double>();
    if (j.contains("backend"))
      q.backend = parse_backend(j.at("backend").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad query: ") + e.what());
  }
  q.validate();
  return q;
}

/// Queries from JSON lines, or from CSV with a header naming at least
/// kernel,tau1,tau2,u,v (the eval output format reads back as-is).
inline std::vector<KernelQuery> read_queries(std::istream& in, const KernelQuery& defaults) {
  std::vector<KernelQuery> out;
  std::string line;
  std::vector<std::string> header;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    try {
      if (line[0] == '{') {
        out.push_back(query_from_json(nlohmann::json::parse(line), defaults));
        continue;
      }
      if (header.empty()) {
        header = split(line, ',');
        continue;
      }
      const auto cells = split(line, ',');
      if (cells.size() != header.size())
        throw UsageError("expected " + std::to_string(header.size()) + " fields");
      nlohmann::json j = nlohmann::json::object();
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const std::string& key = header[k];
        if (key == "kernel" || key == "backend")
          j[key] = cells[k];
        else if (key == "a")
          j[key] = cells[k].empty() ? nlohmann::json() : nlohmann::json(parse_double(cells[k]));
        else if (key == "tau1" || key == "tau2" || key == "u" || key == "v")
          j[key] = parse_double(cells[k]);
      }
      out.push_back(query_from_json(j, defaults));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const UsageError& e) {
      throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

/// Row k holds coefficients (k, 0..order-k).
inline nlohmann::json series_json(const Series2& s) {
  nlohmann::json m = nlohmann::json::array();
  for (int k = 0; k <= s.order(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; k + l <= s.order(); ++l)
      row.push_back(complex_json(s(k, l)));
    m.push_back(row);
  }
  return m;
}

inline nlohmann::json coefficients_json(const ExpansionCoefficients& ec) {
  const Point& p = ec.at_point;
  return {{"transition", to_string(ec.transition)},
          {"point", {{"u", p.u}, {"v", p.v}, {"tau1", p.tau1}, {"tau2", p.tau2}}},
          {"order", ec.order},
          {"b", series_json(ec.b)},
          {"c", series_json(ec.c)}};
}

} // namespace kernelwave::io
