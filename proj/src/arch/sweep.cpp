// Copyright 2026 The moelaw Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "moelaw/arch.hpp"
#include "moelaw/error.hpp"

namespace moelaw {

namespace {

struct Range {
  double lo, hi;
};
constexpr Range kStudyN{133e6, 3.4e9};
constexpr Range kStudyNa{30e6, 2.2e9};
constexpr Range kStudyD{10e9, 50e9};
constexpr Range kStudyG{1, 20};
constexpr Range kStudyS{0, 0.7};

bool outside(double v, Range r) { return v < r.lo || v > r.hi; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

[[noreturn]] void unrealizable(Factor target, double level,
                               const std::string& why) {
  throw IntegralityError(std::string(to_string(target)) + " level " +
                         fmt(level) + " is not realizable: " + why);
}

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

ArchitectureSpec realize_G(const ArchitectureSpec& base, double level) {
  if (!is_integer(level) || level < 1) {
    unrealizable(Factor::G, level, "G must be a positive integer");
  }
  const double s = level / static_cast<double>(base.G());
  const double shared = static_cast<double>(base.n_s) * s;
  if (!is_integer(shared)) {
    unrealizable(Factor::G, level,
                 "n_s*" + fmt(s) + " = " + fmt(shared) + " is not an integer");
  }
  ArchitectureSpec out = base;
  out.n_s = std::llround(shared);
  out.n_k = std::llround(level) - out.n_s;
  out.n_e = std::llround(static_cast<double>(base.n_e) * s);
  out.d_expert = std::llround(static_cast<double>(base.d_expert) / s);
  if (out.d_expert < 1) unrealizable(Factor::G, level, "d_expert rounds to 0");
  if (out.n_k > out.n_e) {
    unrealizable(Factor::G, level, "n_k exceeds the scaled n_e");
  }
  return out;
}

ArchitectureSpec realize_S(const ArchitectureSpec& base, double level) {
  if (!(level >= 0 && level < 1)) {
    unrealizable(Factor::S, level, "S must lie in [0, 1)");
  }
  const double G = static_cast<double>(base.G());
  const double shared = level * G;
  if (!is_integer(shared)) {
    unrealizable(Factor::S, level,
                 "S*G = " + fmt(shared) + " is not an integer shared count");
  }
  ArchitectureSpec out = base;
  out.n_s = std::llround(shared);
  out.n_k = base.G() - out.n_s;
  // Routed pool shrinks by what moved into the shared set, keeping N fixed.
  out.n_e = base.n_e + (base.n_s - out.n_s);
  if (out.n_e < 1 || out.n_k > out.n_e) {
    unrealizable(Factor::S, level, "not enough routed experts for n_k");
  }
  return out;
}

double row_width(const ArchitectureSpec& s) {
  return static_cast<double>(s.d_hidden) * static_cast<double>(s.layers);
}

double attn_width(const ArchitectureSpec& s) {
  return 4.0 * static_cast<double>(s.d_head * s.n_h);
}

ArchitectureSpec realize_Na(const ArchitectureSpec& base, double level) {
  const double per_row = level / row_width(base) - attn_width(base);
  const auto de = std::llround(per_row / (3.0 * static_cast<double>(base.G())));
  if (de < 1) unrealizable(Factor::Na, level, "d_expert rounds to 0");
  const double u =
      static_cast<double>(de) / static_cast<double>(base.d_expert);
  try {
    return derive_uv_scaling(base, u);
  } catch (const DomainError& e) {
    unrealizable(Factor::Na, level, e.what());
  }
}

ArchitectureSpec realize_N(const ArchitectureSpec& base, double level) {
  const double per_row = level / row_width(base) - attn_width(base);
  const auto ne = std::llround(
      per_row / (3.0 * static_cast<double>(base.d_expert)) -
      static_cast<double>(base.n_s));
  if (ne < std::max<std::int64_t>(base.n_k, 1)) {
    unrealizable(Factor::N, level,
                 "needs n_e=" + std::to_string(ne) + " < n_k=" +
                     std::to_string(base.n_k));
  }
  ArchitectureSpec out = base;
  out.n_e = ne;
  return out;
}

double rel(double a, double b) {
  return b == 0 ? std::abs(a) : std::abs(a - b) / std::abs(b);
}

}  // namespace

SweepPlan plan_sweep(const ArchitectureSpec& base, Factor target,
                     std::span<const double> levels) {
  base.validate();
  const ParamCount pc0 = count_params(base);
  SweepPlan plan;
  plan.target = target;
  plan.base = base;

  for (double level : levels) {
    if (!std::isfinite(level) || (target != Factor::S && !(level > 0))) {
      unrealizable(target, level, "level must be positive and finite");
    }
    SweepLevel out;
    out.value = level;
    switch (target) {
      case Factor::G: out.spec = realize_G(base, level); break;
      case Factor::S: out.spec = realize_S(base, level); break;
      // A base that already realizes a size level (headline sizes are
      // rounded) is kept as is.
      case Factor::Na:
        out.spec = rel(pc0.Na, level) <= kSweepDriftTolerance
                       ? base
                       : realize_Na(base, level);
        break;
      case Factor::N:
        out.spec = rel(pc0.N, level) <= kSweepDriftTolerance
                       ? base
                       : realize_N(base, level);
        break;
      case Factor::D: out.spec = base; break;
    }
    out.counts = count_params(out.spec);

    // Held-fixed factors. S is a ratio in [0, 1), so its drift is absolute.
    const ParamCount& pc = out.counts;
    const struct {
      Factor f;
      double d;
    } drifts[] = {{Factor::N, rel(pc.N, pc0.N)},
                  {Factor::Na, rel(pc.Na, pc0.Na)},
                  {Factor::G, rel(pc.G, pc0.G)},
                  {Factor::S, std::abs(pc.S - pc0.S)}};
    for (const auto& d : drifts) {
      if (d.f == target) continue;
      if (d.d > kSweepDriftTolerance) {
        unrealizable(target, level,
                     std::string(to_string(d.f)) + " drifts by " +
                         fmt(100 * d.d) + "% after rounding");
      }
      out.drift = std::max(out.drift, d.d);
    }
    // The realized target must land near the requested level too.
    if (target == Factor::N || target == Factor::Na) {
      const double got = target == Factor::N ? pc.N : pc.Na;
      if (rel(got, level) > kSweepDriftTolerance) {
        unrealizable(target, level,
                     "nearest integer spec gives " + fmt(got));
      }
    }

    out.extrapolated = outside(pc.N, kStudyN) || outside(pc.Na, kStudyNa) ||
                       outside(pc.G, kStudyG) || outside(pc.S, kStudyS) ||
                       (target == Factor::D && outside(level, kStudyD));
    plan.levels.push_back(out);
  }
  return plan;
}

void write_sweep_csv(const SweepPlan& plan, std::ostream& out) {
  out << "level,layers,d_hidden,d_head,n_h,d_expert,n_e,n_k,n_s,N,Na,G,S\n";
  out << std::setprecision(17);
  for (const auto& l : plan.levels) {
    const auto& s = l.spec;
    out << l.value << ',' << s.layers << ',' << s.d_hidden << ',' << s.d_head
        << ',' << s.n_h << ',' << s.d_expert << ',' << s.n_e << ',' << s.n_k
        << ',' << s.n_s << ',' << l.counts.N << ',' << l.counts.Na << ','
        << l.counts.G << ',' << l.counts.S << '\n';
  }
}

}  // namespace moelaw
