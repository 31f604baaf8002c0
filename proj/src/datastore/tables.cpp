// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "moelaw/datastore.hpp"
#include "moelaw/error.hpp"
#include "moelaw/optimizer.hpp"

namespace moelaw {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string percent_with_size(double ratio, double N) {
  return fixed(100.0 * ratio, 2) + "% (" +
         format_scaled_number(ratio * N, 1) + ")";
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  RenderedTable render() const {
    std::ostringstream md, csv;
    const auto md_row = [&](const std::vector<std::string>& cells) {
      md << '|';
      for (const auto& c : cells) md << ' ' << c << " |";
      md << '\n';
    };
    md_row(header);
    md << '|';
    for (std::size_t i = 0; i < header.size(); ++i) md << " --- |";
    md << '\n';
    for (const auto& r : rows) md_row(r);

    const auto csv_row = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        csv << (i ? "," : "") << csv_cell(cells[i]);
      }
      csv << '\n';
    };
    csv_row(header);
    for (const auto& r : rows) csv_row(r);
    return {md.str(), csv.str()};
  }
};

std::string range_cell(const Interval& i, int decimals) {
  std::string s = "[" + fixed(i.lo, decimals) + ", " + fixed(i.hi, decimals) + "]";
  if (i.clipped_lo || i.clipped_hi) s += " (clipped)";
  return s;
}

std::string threshold_text(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

double parse_scaled_number(std::string_view text) {
  std::string s(text);
  double scale = 1.0;
  if (!s.empty()) {
    switch (s.back()) {
      case 'K': case 'k': scale = 1e3; break;
      case 'M': case 'm': scale = 1e6; break;
      case 'B': case 'b': scale = 1e9; break;
      case 'T': case 't': scale = 1e12; break;
      default: break;
    }
    if (scale != 1.0) s.pop_back();
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw DomainError("'" + std::string(text) +
                      "' is not a number (suffixes K, M, B, T allowed)");
  }
  return v * scale;
}

std::string format_scaled_number(double v, int decimals) {
  const struct {
    double scale;
    const char* suffix;
  } units[] = {{1e12, "T"}, {1e9, "B"}, {1e6, "M"}, {1e3, "K"}};
  for (const auto& u : units) {
    if (std::abs(v) >= u.scale) {
      const double x = v / u.scale;
      if (decimals >= 0) return fixed(x, decimals) + u.suffix;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4g%s", x, u.suffix);
      return buf;
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<ModelSpec> reference_models() {
  return {
      {"gpt-oss-20b", 3.6e9, 21e9, 0, 4},
      {"Qwen3-30B-A3B", 3e9, 30e9, 0, 8},
      {"Hunyuan-A13B", 13e9, 80e9, 1, 8},
      {"GLM-4.5-Air", 12e9, 106e9, 1, 8},
      {"gpt-oss-120b", 5.1e9, 117e9, 0, 4},
      {"Qwen3-235B-A22B", 22e9, 235e9, 0, 8},
      {"GLM-4.5", 32e9, 355e9, 1, 8},
      {"Deepseek-V3.1", 37e9, 671e9, 1, 8},
      {"Kimi-K2", 32e9, 1e12, 1, 8},
  };
}

ModelSpec parse_model_spec(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos || a == 0) {
    throw DomainError("model spec must look like Name:Na:N, got '" +
                      std::string(text) + "'");
  }
  ModelSpec m;
  m.name = std::string(text.substr(0, a));
  m.Na = parse_scaled_number(text.substr(a + 1, b - a - 1));
  m.N = parse_scaled_number(text.substr(b + 1));
  if (!(m.Na > 0) || !(m.N > 0) || m.Na > m.N) {
    throw DomainError("model '" + m.name + "' needs 0 < Na <= N");
  }
  return m;
}

TableKind parse_table_kind(std::string_view name) {
  if (name == "table3") return TableKind::Table3;
  if (name == "table4") return TableKind::Table4;
  throw DomainError("unknown table '" + std::string(name) +
                    "' (expected table3 or table4)");
}

RenderedTable render_table(TableKind kind, std::span<const ModelSpec> models,
                           const ScalingConstants& constants,
                           std::span<const double> thresholds) {
  if (thresholds.empty()) throw DomainError("at least one threshold is required");
  Table t;
  if (kind == TableKind::Table3) {
    const std::string thr = threshold_text(thresholds.front());
    t.header = {"Model", "G (n_s+TopK)", "G (Actual)",
                "G Practical Range (Thr=" + thr + ")", "S (Actual)",
                "S Practical Range (Thr=" + thr + ")"};
    for (const auto& m : models) {
      std::vector<std::string> row{m.name};
      if (m.n_s && m.n_k) {
        row.push_back(std::to_string(*m.n_s) + "+" + std::to_string(*m.n_k));
        row.push_back(std::to_string(*m.n_s + *m.n_k));
        row.push_back("");
        row.push_back(*m.n_s == 0 ? "0"
                                  : std::to_string(*m.n_s) + "/" +
                                        std::to_string(*m.n_s + *m.n_k));
      } else {
        row.insert(row.end(), {"-", "-", "", "-"});
      }
      try {
        row[3] = range_cell(
            practical_range_G(constants, m.N, m.Na, thresholds.front()), 2);
        row.push_back(range_cell(
            practical_range_S(constants, m.N, m.Na, thresholds.front()), 3));
      } catch (const std::exception& e) {
        row[3] = std::string("error: ") + e.what();
        row.push_back(row[3]);
      }
      t.rows.push_back(std::move(row));
    }
  } else {
    t.header = {"Model", "Na-N (Actual)", "Na/N Theoretical Opt"};
    for (double thr : thresholds) {
      t.header.push_back("Na/N Practical Opt (dLoss=" + threshold_text(thr) +
                         ")");
    }
    for (const auto& m : models) {
      std::vector<std::string> row{
          m.name, format_scaled_number(m.Na) + "-" + format_scaled_number(m.N)};
      try {
        const double G = optimal_G(constants);
        const double S = optimal_S(constants).value;
        const auto th = theoretical_ratio(constants, m.N, G, S);
        row.push_back(percent_with_size(th.ratio, m.N) +
                      (th.extrapolated ? " (extrapolated)" : ""));
        for (double thr : thresholds) {
          const auto eff = efficiency_aware_ratio(constants, m.N, G, S, thr);
          row.push_back(percent_with_size(eff.ratio, m.N) +
                        (eff.converged ? "" : " (not converged)"));
        }
      } catch (const std::exception& e) {
        row.resize(3 + thresholds.size(), std::string("error: ") + e.what());
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t.render();
}

}  // namespace moelaw
