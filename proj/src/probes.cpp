#include "hwlab/probes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "hwlab/norms.hpp"

namespace hwlab {
namespace {

void require_relation(double lhs, double rhs, const char* what) {
  if (std::abs(lhs - rhs) > 1e-12) throw Error(std::string("exponent relation violated: ") + what);
}

void require_open(Exponent e, bool allow_infinity, const char* name) {
  if (e.is_infinite()) {
    if (!allow_infinity) throw Error(std::string(name) + " must be finite");
    return;
  }
  if (!(e.value() > 1.0)) throw Error(std::string(name) + " must exceed 1");
}

Field pointwise(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Field power_nonlinearity(const Field& u, double nu) {
  Field out = u;
  for (auto& z : out.values()) {
    const double m = std::abs(z);
    z = m == 0.0 ? cplx(0.0) : z * std::pow(m, nu - 1.0);
  }
  return out;
}

Field derivative_modulus(const Field& u, double nu) {
  Field out = u;
  for (auto& z : out.values()) {
    const double m = std::abs(z);
    z = m == 0.0 ? 0.0 : nu * std::pow(m, nu - 1.0);
  }
  return out;
}

SymbolSpec derivative_symbol(double gamma, bool homogeneous) {
  return homogeneous ? SymbolSpec::homogeneous(gamma) : SymbolSpec::inhomogeneous(gamma);
}

double derivative_norm(const Field& f, double gamma, bool homogeneous, Exponent q) {
  return lq_norm(apply_symbol(f, derivative_symbol(gamma, homogeneous), ZeroMode::suppress), q);
}

double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0 && rhs == 0.0) return 0.0;
  return rhs == 0.0 ? INFINITY : lhs / rhs;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ProbeRecord probe_kato_ponce(const Field& u, const Field& v, double gamma, const LeibnizSplit& s,
                             bool homogeneous) {
  if (!(u.grid() == v.grid())) throw Error("kato-ponce probe: fields live on different grids");
  if (!(gamma >= 0.0)) throw Error("kato-ponce probe: gamma must be >= 0");
  require_open(s.r, false, "r");
  require_open(s.p1, true, "p1");
  require_open(s.q1, true, "q1");
  require_open(s.p2, true, "p2");
  require_open(s.q2, true, "q2");
  require_relation(s.r.reciprocal(), s.p1.reciprocal() + s.q1.reciprocal(), "1/r = 1/p1 + 1/q1");
  require_relation(s.r.reciprocal(), s.p2.reciprocal() + s.q2.reciprocal(), "1/r = 1/p2 + 1/q2");

  // The product of two band-limited fields is exact on a 2x grid.
  Field uf = upsample(u, 2);
  Field vf = upsample(v, 2);
  ProbeRecord rec;
  rec.probe = homogeneous ? "kato_ponce" : "kato_ponce_inhomogeneous";
  rec.gamma = gamma;
  rec.exponents = {{"r", s.r}, {"p1", s.p1}, {"q1", s.q1}, {"p2", s.p2}, {"q2", s.q2}};
  rec.lhs = derivative_norm(pointwise(uf, vf), gamma, homogeneous, s.r);
  rec.rhs = derivative_norm(uf, gamma, homogeneous, s.p1) * lq_norm(vf, s.q1) +
            lq_norm(uf, s.p2) * derivative_norm(vf, gamma, homogeneous, s.q2);
  rec.ratio = safe_ratio(rec.lhs, rec.rhs);
  return rec;
}

ProbeRecord probe_chain_rule(const Field& u, double nu, double gamma, const ChainSplit& s) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("chain-rule probe: gamma must lie in (0, 1)");
  if (!(nu > 1.0)) throw Error("chain-rule probe: nu must be > 1");
  require_open(s.r, false, "r");
  require_open(s.p, false, "p");
  require_open(s.q, true, "q");
  require_relation(s.r.reciprocal(), s.p.reciprocal() + s.q.reciprocal(), "1/r = 1/p + 1/q");
  Field uf = upsample(u, padding_factor(nu));
  ProbeRecord rec;
  rec.probe = "chain_rule";
  rec.gamma = gamma;
  rec.nu = nu;
  rec.exponents = {{"r", s.r}, {"p", s.p}, {"q", s.q}};
  rec.lhs = derivative_norm(power_nonlinearity(uf, nu), gamma, true, s.r);
  rec.rhs = lq_norm(derivative_modulus(uf, nu), s.q) * derivative_norm(uf, gamma, true, s.p);
  rec.ratio = safe_ratio(rec.lhs, rec.rhs);
  return rec;
}

ProbeRecord probe_nonlinear_difference(const Field& u, const Field& v, double nu, double gamma,
                                       const ChainSplit& s) {
  if (!(u.grid() == v.grid())) throw Error("difference probe: fields live on different grids");
  if (nu < 2.0) {
    throw Error("difference probe needs nu >= 2: the estimate carries nu - 2 powers of ||u||_q");
  }
  if (!(gamma >= 0.0)) throw Error("difference probe: gamma must be >= 0");
  if (!is_odd_integer(nu) && std::max(1.0, std::ceil(gamma)) > nu) {
    throw Error("difference probe: ceil(gamma) <= nu required for non-odd nu");
  }
  require_open(s.r, false, "r");
  require_open(s.p, false, "p");
  require_open(s.q, true, "q");
  require_relation(s.r.reciprocal(), s.p.reciprocal() + (nu - 1.0) * s.q.reciprocal(),
                   "1/r = 1/p + (nu-1)/q");
  const int pad = padding_factor(nu);
  Field uf = upsample(u, pad);
  Field vf = upsample(v, pad);
  Field diff = uf - vf;
  ProbeRecord rec;
  rec.probe = "nonlinear_difference";
  rec.gamma = gamma;
  rec.nu = nu;
  rec.exponents = {{"r", s.r}, {"p", s.p}, {"q", s.q}};
  rec.lhs = derivative_norm(power_nonlinearity(uf, nu) - power_nonlinearity(vf, nu), gamma, true, s.r);
  const double uq = lq_norm(uf, s.q);
  const double vq = lq_norm(vf, s.q);
  const double du = derivative_norm(uf, gamma, true, s.p);
  const double dv = derivative_norm(vf, gamma, true, s.p);
  rec.rhs = (std::pow(uq, nu - 1.0) + std::pow(vq, nu - 1.0)) * derivative_norm(diff, gamma, true, s.p) +
            (std::pow(uq, nu - 2.0) + std::pow(vq, nu - 2.0)) * (du + dv) * lq_norm(diff, s.q);
  rec.ratio = safe_ratio(rec.lhs, rec.rhs);
  return rec;
}

std::string probe_csv_header() { return "probe_name,seed,gamma,nu,exponents,lhs,rhs,ratio"; }

std::string probe_csv_row(const ProbeRecord& r) {
  std::ostringstream ex;
  for (std::size_t i = 0; i < r.exponents.size(); ++i) {
    if (i) ex << ';';
    ex << r.exponents[i].first << '=' << r.exponents[i].second.str();
  }
  std::ostringstream row;
  row << r.probe << ',' << r.seed << ',' << fmt(r.gamma) << ',' << fmt(r.nu) << ',' << ex.str()
      << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.ratio);
  return row.str();
}

SuiteSummary run_probe_suite(const ProbeFn& probe, int count, std::uint64_t base_seed, int threads) {
  if (count < 2) throw Error("probe suite needs at least two samples");
  SuiteSummary out;
  out.records.resize(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        auto rec = probe(base_seed + static_cast<std::uint64_t>(i));
        rec.seed = base_seed + static_cast<std::uint64_t>(i);
        out.records[static_cast<std::size_t>(i)] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(threads, 1, count);
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  const int half = count / 2;
  for (int i = 0; i < count; ++i) {
    const double r = out.records[static_cast<std::size_t>(i)].ratio;
    if (!std::isfinite(r)) out.finite = false;
    if (i < half) out.max_first_half = std::max(out.max_first_half, r);
    out.max_all = std::max(out.max_all, r);
  }
  out.movement =
      out.max_first_half > 0.0 ? (out.max_all - out.max_first_half) / out.max_first_half : 0.0;
  return out;
}

}  // namespace hwlab
