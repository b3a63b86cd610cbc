#pragma once

#include <functional>
#include <memory>

#include "prandtl/grid.hpp"

namespace prandtl {

/// Source term s(t, x, y) added to the tangential momentum equation.
using SourceFn = std::function<double(double t, double x, double y)>;

/// Solver state: tangential velocity u and the auxiliary primitive f, from
/// which the auxiliary fields U = df/dy and lambda are derived.
struct SimState {
  SimState(double t_, Field u_, Field f_, bool damping_ = true,
           std::shared_ptr<const SourceFn> forcing_ = nullptr)
      : t(t_), u(std::move(u_)), f(std::move(f_)), damping(damping_),
        forcing(std::move(forcing_)) {}

  double t = 0.0;
  Field u;
  Field f;
  bool damping = true;
  std::shared_ptr<const SourceFn> forcing;
};

}  // namespace prandtl
