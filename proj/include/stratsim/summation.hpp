#pragma once

namespace stratsim {

/// Kahan-compensated accumulator. Every norm and inner-product reduction in
/// the library goes through one of these in a fixed mode order, so reductions
/// do not depend on how outer loops are scheduled.
class KahanSum {
  public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace stratsim
