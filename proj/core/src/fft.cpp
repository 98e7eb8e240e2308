#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "asso/errors.hpp"

namespace asso::detail {
namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

    fftw_plan get(std::size_t n) {
        std::lock_guard lock(mu_);
        auto it = plans_.find(n);
        if (it != plans_.end()) {
            return it->second;
        }
        // FFTW_ESTIMATE never touches the arrays, so scratch buffers are fine here.
        std::vector<std::complex<double>> a(n), b(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                          reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) {
            throw InvalidParameter("FFTW could not plan a transform of this length");
        }
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::size_t, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

} // namespace

void forward_dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    if (in.size() != out.size() || in.empty()) {
        throw InvalidParameter("forward_dft needs equal, non-empty buffers");
    }
    fftw_plan plan = cache().get(in.size());
    // FFTW's signature is non-const even for out-of-place transforms.
    auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
    fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace asso::detail
