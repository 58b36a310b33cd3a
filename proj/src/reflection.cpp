#include "htg/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htg {

ReflectedPair skorohod_map(const SampledPath& psi) {
  const std::size_t m = psi.times.size();
  if (m == 0) throw std::invalid_argument("skorohod_map: empty path");
  if (psi.values.size() != m)
    throw std::invalid_argument("skorohod_map: times/values length mismatch");
  if (psi.times[0] != 0.0)
    throw std::invalid_argument("skorohod_map: times must start at 0");
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(psi.values[k]))
      throw std::invalid_argument("skorohod_map: non-finite value");
    if (k > 0 && !(psi.times[k] > psi.times[k - 1]))
      throw std::invalid_argument("skorohod_map: times must be strictly increasing");
  }

  ReflectedPair out;
  out.phi.times = psi.times;
  out.eta.times = psi.times;
  out.phi.values.resize(m);
  out.eta.values.resize(m);

  // eta(t) = sup_{s <= t} psi(s)^-, maintained in one pass.
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    running = std::max(running, -psi.values[k]);
    out.eta.values[k] = running;
    out.phi.values[k] = psi.values[k] + running;
  }
  return out;
}

LindleyStep lindley_step(double w, double increment) {
  const double moved = w + increment;
  LindleyStep s;
  s.w_next = moved > 0.0 ? moved : 0.0;
  s.delta_r = s.w_next - moved;
  return s;
}

}  // namespace htg
