#pragma once

// Ratio probes for the fractional Leibniz rule and the fractional chain rule.
// Probes report LHS, RHS and their ratio; no constant is asserted.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hwlab/exponents.hpp"
#include "hwlab/grid.hpp"

namespace hwlab {

struct ProbeRecord {
  std::string probe;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  double nu = 0.0;
  std::vector<std::pair<std::string, Exponent>> exponents;
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs, 0 when both vanish.
  double ratio = 0.0;
};

/// 1/r = 1/p1 + 1/q1 = 1/p2 + 1/q2.
struct LeibnizSplit {
  Exponent r = Exponent::finite(2);
  Exponent p1 = Exponent::finite(2);
  Exponent q1 = Exponent::infinity();
  Exponent p2 = Exponent::infinity();
  Exponent q2 = Exponent::finite(2);
};

/// ||Lambda^g(uv)||_r against ||Lambda^g u||_p1 ||v||_q1 + ||u||_p2 ||Lambda^g v||_q2,
/// or the <Lambda> version when homogeneous is false.
ProbeRecord probe_kato_ponce(const Field& u, const Field& v, double gamma, const LeibnizSplit& split,
                             bool homogeneous = true);

/// 1/r = 1/p + 1/q.
struct ChainSplit {
  Exponent r = Exponent::finite(2);
  Exponent p = Exponent::finite(2);
  Exponent q = Exponent::infinity();
};

/// ||Lambda^g F(u)||_r against ||F'(u)||_q ||Lambda^g u||_p, F(z) = |z|^{nu-1} z,
/// |F'(u)| read as nu |u|^{nu-1}. Requires gamma in (0, 1).
ProbeRecord probe_chain_rule(const Field& u, double nu, double gamma, const ChainSplit& split);

/// Difference estimate ||F(u) - F(v)||_{H.^g_r} with 1/r = 1/p + (nu-1)/q.
/// Requires nu >= 2: the bound carries nu - 2 powers.
ProbeRecord probe_nonlinear_difference(const Field& u, const Field& v, double nu, double gamma,
                                       const ChainSplit& split);

std::string probe_csv_header();
std::string probe_csv_row(const ProbeRecord& r);

struct SuiteSummary {
  std::vector<ProbeRecord> records;
  double max_first_half = 0.0;
  double max_all = 0.0;
  /// (max_all - max_first_half) / max_first_half.
  double movement = 0.0;
  bool finite = true;
};

using ProbeFn = std::function<ProbeRecord(std::uint64_t seed)>;

/// Runs probe(base_seed + i) for i < count on up to `threads` workers. Records
/// are stored by index, so the result does not depend on the thread count.
SuiteSummary run_probe_suite(const ProbeFn& probe, int count, std::uint64_t base_seed, int threads);

}  // namespace hwlab
