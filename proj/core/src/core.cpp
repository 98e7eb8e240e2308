#include "asso/core.hpp"

#include <cmath>
#include <type_traits>

#include "asso/errors.hpp"

namespace asso {

template <typename T>
void BasicSignal<T>::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw InvalidParameter("signal sample_rate must be positive and finite");
    }
    if (samples.size() < 2) {
        throw InvalidParameter("signal needs at least 2 samples");
    }
    for (const auto& v : samples) {
        if constexpr (std::is_same_v<T, cplx>) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw InvalidParameter("signal contains non-finite samples");
            }
        } else {
            if (!std::isfinite(v)) {
                throw InvalidParameter("signal contains non-finite samples");
            }
        }
    }
}

template struct BasicSignal<double>;
template struct BasicSignal<cplx>;

void WindowSpec::validate() const {
    if (!(tau0 > 0.0 && tau0 < 1.0)) {
        throw InvalidParameter("tau0 must lie in (0, 1)");
    }
    if (!(truncation_radius > 0.0)) {
        throw InvalidParameter("truncation radius must be positive");
    }
}

void AssoConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(tau0 > 0.0 && tau0 < 1.0)) fail("tau0 must lie in (0, 1)");
    if (!(truncation_radius > 0.0)) fail("truncation_radius must be positive");
    if (!(gamma2_rel > 0.0 && gamma2_rel < gamma1_rel && gamma1_rel < 1.0)) {
        fail("thresholds must satisfy 0 < gamma2_rel < gamma1_rel < 1");
    }
    if (sigma_min < 0.0 || sigma_max < 0.0) fail("sigma_min and sigma_max must be non-negative");
    if (sigma_min > 0.0 && sigma_max > 0.0 && sigma_min > sigma_max) fail("sigma_min must not exceed sigma_max");
    if (sigma_step < 0.0) fail("sigma_step must be non-negative");
    if (sigma_step == 0.0 && sigma_count == 0) fail("sigma_count must be positive");
    if (delta_sigma < 0.0) fail("delta_sigma must be non-negative");
    if (zeta < 0.0) fail("zeta must be non-negative");
    if (!(er_epsilon > 0.0 && er_epsilon < 0.1)) fail("er_epsilon must lie in (0, 0.1)");
    if (smooth_len == 0 || smooth_len % 2 == 0) fail("smooth_len must be odd and >= 1");
    if (trend_sigma < 0.0) fail("trend_sigma must be non-negative");
}

double window_value(double t, double sigma) {
    if (!(sigma > 0.0)) {
        throw InvalidParameter("window sigma must be positive");
    }
    const double u = t / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(two_pi));
}

cplx m_factor(double xi, double sigma, double r) {
    if (!(sigma > 0.0)) {
        throw InvalidParameter("m_factor sigma must be positive");
    }
    const double s2 = sigma * sigma;
    const cplx denom(1.0, -two_pi * r * s2);
    return std::exp(-2.0 * std::numbers::pi * std::numbers::pi * s2 * xi * xi / denom);
}

double essential_half_width(double sigma, double r, double tau0) {
    if (!(sigma > 0.0)) {
        throw InvalidParameter("essential_half_width sigma must be positive");
    }
    if (!(tau0 > 0.0 && tau0 < 1.0)) {
        throw InvalidParameter("tau0 must lie in (0, 1)");
    }
    const double a = 1.0 / (two_pi * sigma);
    const double b = r * sigma;
    return std::sqrt(2.0 * std::abs(std::log(tau0))) * std::sqrt(a * a + b * b);
}

double window_half_band(double sigma, double tau0, LambdaConvention convention) {
    if (convention == LambdaConvention::verbatim) {
        if (!(sigma > 0.0) || !(tau0 > 0.0 && tau0 < 1.0)) {
            throw InvalidParameter("window_half_band needs sigma > 0 and tau0 in (0, 1)");
        }
        return two_pi * sigma * std::sqrt(2.0 * std::abs(std::log(tau0)));
    }
    return essential_half_width(sigma, 0.0, tau0);
}

double window_time_half_width(double sigma, double tau0) {
    if (!(sigma > 0.0) || !(tau0 > 0.0 && tau0 < 1.0)) {
        throw InvalidParameter("window_time_half_width needs sigma > 0 and tau0 in (0, 1)");
    }
    return sigma * std::sqrt(2.0 * std::abs(std::log(tau0)));
}

cplx branch_sqrt(cplx z) {
    if (!(z.real() > 0.0)) {
        throw DomainError("branch_sqrt requires Re(z) > 0");
    }
    // The principal root has Re > 0 and keeps the sign of Im(z).
    return std::sqrt(z);
}

cplx chirp_stft_closed_form(double amplitude, double c, double r, double t, double eta, double sigma) {
    if (!(c + r * t > 0.0)) {
        throw InvalidParameter("chirp instantaneous frequency c + r t must be positive");
    }
    if (!(eta > 0.0)) {
        throw InvalidParameter("eta must be positive");
    }
    const cplx carrier = std::polar(amplitude, two_pi * (c * t + 0.5 * r * t * t));
    const cplx root = branch_sqrt(cplx(1.0, -two_pi * sigma * sigma * r));
    return carrier / (2.0 * root) * m_factor(eta - (c + r * t), sigma, r);
}

std::string to_string(LambdaConvention c) {
    return c == LambdaConvention::verbatim ? "verbatim" : "dimensional";
}

std::string to_string(RecoveryModel m) {
    return m == RecoveryModel::sinusoidal ? "sinusoidal" : "chirp";
}

} // namespace asso
