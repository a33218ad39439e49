#pragma once

#include "mac/field.hpp"

namespace mac {

struct MonitorRecord {
  double t = 0.0;
  double sup_norm = 0.0;
  double energy = 0.0;
};

/// Receives monitor rows and field snapshots while a simulation runs.
class RunSink {
 public:
  virtual ~RunSink() = default;
  virtual void monitor(const MonitorRecord& /*record*/) {}
  virtual void snapshot(const MatrixField& /*field*/, double /*t*/) {}
};

}  // namespace mac
