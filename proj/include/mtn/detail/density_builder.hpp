// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_DETAIL_DENSITY_BUILDER_HPP
#define MTN_DETAIL_DENSITY_BUILDER_HPP

#include <vector>

namespace mtn::detail {

// Collects density pieces given as (lo, hi, value) runs in nondecreasing
// position order and emits one contiguous breakpoint chain, bridging gaps
// with zero-value pieces. Zero-value and empty pieces may be pushed freely.
class DensityBuilder {
 public:
  void push(double lo, double hi, double value) {
    if (value == 0.0) return;
    if (!bp_.empty() && lo < bp_.back()) lo = bp_.back();  // fp sliver guard
    if (!(hi > lo)) return;
    if (bp_.empty()) {
      bp_ = {lo, hi};
      val_ = {value};
      return;
    }
    if (lo > bp_.back()) {  // gap
      bp_.push_back(lo);
      val_.push_back(0.0);
    }
    bp_.push_back(hi);
    val_.push_back(value);
  }

  std::vector<double>& breakpoints() { return bp_; }
  std::vector<double>& values() { return val_; }

 private:
  std::vector<double> bp_;
  std::vector<double> val_;
};

}  // namespace mtn::detail

#endif  // MTN_DETAIL_DENSITY_BUILDER_HPP
