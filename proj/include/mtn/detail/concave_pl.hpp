// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_DETAIL_CONCAVE_PL_HPP
#define MTN_DETAIL_CONCAVE_PL_HPP

#include <cassert>
#include <deque>

namespace mtn::detail {

/// Concave piecewise-linear function under the three operations needed by the
/// chain maximization behind the bounded-Lipschitz dual norm:
///   - sup-convolution with the box [-c, c]  (widens the argmax plateau),
///   - domain truncation,
///   - addition of a linear function u*x.
/// Stored as the argmax plateau plus per-side slope segments ordered from the
/// plateau outward; slopes are kept relative to a per-side offset so that a
/// tilt is O(1) plus the segments the peak actually crosses.
class ConcavePL {
 public:
  // Zero function on [-s, s].
  explicit ConcavePL(double s) : peak_lo_(-s), peak_hi_(s) {}

  double max() const { return peak_val_; }
  double domain_lo() const { return peak_lo_ - sum_len_l_; }
  double domain_hi() const { return peak_hi_ + sum_len_r_; }

  void sup_conv(double c) {
    peak_lo_ -= c;
    peak_hi_ += c;
  }

  void tilt(double u) {
    off_l_ += u;
    off_r_ += u;
    if (u > 0.0) {
      double x = peak_hi_;
      double v = peak_val_ + u * peak_hi_;
      if (peak_hi_ > peak_lo_) {
        left_.push_front({peak_hi_ - peak_lo_, u - off_l_});
        sum_len_l_ += peak_hi_ - peak_lo_;
      }
      while (!right_.empty()) {
        const double eff = right_.front().slope + off_r_;
        if (eff <= 0.0) break;
        const Seg seg = right_.front();
        right_.pop_front();
        sum_len_r_ -= seg.len;
        v += seg.len * eff;
        x += seg.len;
        left_.push_front({seg.len, eff - off_l_});
        sum_len_l_ += seg.len;
      }
      peak_lo_ = x;
      peak_hi_ = x;
      if (!right_.empty() && right_.front().slope + off_r_ == 0.0) {
        peak_hi_ = x + right_.front().len;
        sum_len_r_ -= right_.front().len;
        right_.pop_front();
      }
      peak_val_ = v;
    } else if (u < 0.0) {
      double x = peak_lo_;
      double v = peak_val_ + u * peak_lo_;
      if (peak_hi_ > peak_lo_) {
        right_.push_front({peak_hi_ - peak_lo_, u - off_r_});
        sum_len_r_ += peak_hi_ - peak_lo_;
      }
      while (!left_.empty()) {
        const double eff = left_.front().slope + off_l_;
        if (eff >= 0.0) break;
        const Seg seg = left_.front();
        left_.pop_front();
        sum_len_l_ -= seg.len;
        v += seg.len * (-eff);
        x -= seg.len;
        right_.push_front({seg.len, eff - off_r_});
        sum_len_r_ += seg.len;
      }
      peak_lo_ = x;
      peak_hi_ = x;
      if (!left_.empty() && left_.front().slope + off_l_ == 0.0) {
        peak_lo_ = x - left_.front().len;
        sum_len_l_ -= left_.front().len;
        left_.pop_front();
      }
      peak_val_ = v;
    }
  }

  // Restrict the domain to [lo, hi]; the intersection with the current
  // domain must be nonempty.
  void truncate(double lo, double hi) {
    assert(lo <= hi);
    // Left cut.
    if (lo > domain_lo()) {
      if (lo <= peak_lo_) {
        double excess = lo - domain_lo();
        while (excess > 0.0 && !left_.empty()) {
          Seg& seg = left_.back();
          if (seg.len <= excess) {
            excess -= seg.len;
            sum_len_l_ -= seg.len;
            left_.pop_back();
          } else {
            seg.len -= excess;
            sum_len_l_ -= excess;
            excess = 0.0;
          }
        }
      } else {
        left_.clear();
        sum_len_l_ = 0.0;
        if (lo <= peak_hi_) {
          peak_lo_ = lo;
        } else {
          double x = peak_hi_;
          double v = peak_val_;
          double need = lo - x;
          while (need > 0.0 && !right_.empty()) {
            Seg& seg = right_.front();
            const double eff = seg.slope + off_r_;
            const double take = seg.len <= need ? seg.len : need;
            v += take * eff;
            x += take;
            need -= take;
            if (take == seg.len) {
              sum_len_r_ -= seg.len;
              right_.pop_front();
            } else {
              seg.len -= take;
              sum_len_r_ -= take;
            }
          }
          peak_lo_ = peak_hi_ = x;
          peak_val_ = v;
        }
      }
    }
    // Right cut.
    if (hi < domain_hi()) {
      if (hi >= peak_hi_) {
        double excess = domain_hi() - hi;
        while (excess > 0.0 && !right_.empty()) {
          Seg& seg = right_.back();
          if (seg.len <= excess) {
            excess -= seg.len;
            sum_len_r_ -= seg.len;
            right_.pop_back();
          } else {
            seg.len -= excess;
            sum_len_r_ -= excess;
            excess = 0.0;
          }
        }
      } else {
        right_.clear();
        sum_len_r_ = 0.0;
        if (hi >= peak_lo_) {
          peak_hi_ = hi;
        } else {
          double x = peak_lo_;
          double v = peak_val_;
          double need = x - hi;
          while (need > 0.0 && !left_.empty()) {
            Seg& seg = left_.front();
            const double eff = seg.slope + off_l_;
            const double take = seg.len <= need ? seg.len : need;
            v -= take * eff;
            x -= take;
            need -= take;
            if (take == seg.len) {
              sum_len_l_ -= seg.len;
              left_.pop_front();
            } else {
              seg.len -= take;
              sum_len_l_ -= take;
            }
          }
          peak_lo_ = peak_hi_ = x;
          peak_val_ = v;
        }
      }
    }
  }

 private:
  struct Seg {
    double len;
    double slope;  // relative to the per-side offset
  };

  // Innermost (plateau-adjacent) segment first on both sides.
  std::deque<Seg> left_;
  std::deque<Seg> right_;
  double off_l_ = 0.0;
  double off_r_ = 0.0;
  double sum_len_l_ = 0.0;
  double sum_len_r_ = 0.0;
  double peak_lo_;
  double peak_hi_;
  double peak_val_ = 0.0;
};

}  // namespace mtn::detail

#endif  // MTN_DETAIL_CONCAVE_PL_HPP
