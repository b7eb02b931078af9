#ifndef GOI_ERRORS_HPP
#define GOI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace goi {

enum class errc {
    none = 0,
    non_finite,            // NaN or infinity where a finite sample was required
    zero_sample,           // |u_eps| = 0 where an inverse is needed
    not_homogeneous,       // phase fails degree-1 homogeneity in xi
    not_real,              // phase has a non-negligible imaginary part
    degenerate_gradient,   // gradient inf-net decays faster than every power
    order_too_high,        // integrability precondition l + delta*k < -p violated
    tail_too_fat,          // xi truncation cannot meet the requested tolerance
    derivative_depth,      // expression does not support further derivatives
    no_convergence,        // extrapolation failed to settle
    resolution_too_coarse, // sampled kernel cannot resolve the requested frequencies
    step_underflow,        // adaptive ODE step shrank below representable size
    config,                // bad configuration (unknown key, missing field, bad value)
};

const char* errc_name(errc c);

class error : public std::runtime_error {
public:
    error(errc c, const std::string& msg)
        : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code_(c) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::none: return "ok";
    case errc::non_finite: return "NonFinite";
    case errc::zero_sample: return "ZeroSample";
    case errc::not_homogeneous: return "NotHomogeneous";
    case errc::not_real: return "NotReal";
    case errc::degenerate_gradient: return "DegenerateGradient";
    case errc::order_too_high: return "OrderTooHigh";
    case errc::tail_too_fat: return "TailTooFat";
    case errc::derivative_depth: return "DerivativeDepthExceeded";
    case errc::no_convergence: return "NoConvergence";
    case errc::resolution_too_coarse: return "ResolutionTooCoarse";
    case errc::step_underflow: return "StepUnderflow";
    case errc::config: return "ConfigError";
    }
    return "unknown";
}

} // namespace goi

#endif
