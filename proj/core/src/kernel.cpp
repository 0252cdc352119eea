#include "kernel.hpp"

#include <bit>
#include <stdexcept>

namespace mcair::detail {

HistoryKernel::HistoryKernel(const ChannelImpulseResponse& cir, const SystemParams& params) {
    params.validate();
    if (cir.memory < 1 || cir.h.size() != size_t(cir.memory))
        throw std::invalid_argument("HistoryKernel: impulse response is inconsistent");
    if (cir.memory > 30)
        throw std::invalid_argument("HistoryKernel: memory out of range");
    memory_ = cir.memory;
    n_ = size_t(1) << (memory_ - 1);
    half_ = memory_ >= 2 ? n_ / 2 : 0;

    mean0_.resize(n_);
    inv_sd0_.resize(n_);
    mean1_.resize(n_);
    inv_sd1_.resize(n_);
    n00_.assign(n_, 0);
    n01_.assign(n_, 0);
    n10_.assign(n_, 0);
    n11_.assign(n_, 0);
    ones_.assign(n_, 0);
    w_.assign(n_, 1.0);
    scratch_.resize(n_);

    const double nt = params.n_released;
    // History bit k carries tap j = M - k (the oldest symbol feeds the most
    // delayed tap). Accumulate means/variances by reusing the value at the
    // word with the lowest set bit cleared.
    std::vector<double> mean_add(size_t(std::max(memory_ - 1, 1)), 0.0);
    std::vector<double> var_add(size_t(std::max(memory_ - 1, 1)), 0.0);
    for (int k = 0; k <= memory_ - 2; ++k) {
        const double h = cir.h[size_t(memory_ - k - 1)];  // tap j = M - k
        mean_add[size_t(k)] = nt * h;
        var_add[size_t(k)] = nt * h * (1.0 - h);
    }
    const double base_mean = params.noise_mean;
    const double base_var = params.noise_std * params.noise_std;
    const double h1 = cir.h[0];
    const double pulse_mean = nt * h1;
    const double pulse_var = nt * h1 * (1.0 - h1);

    std::vector<double> var0(n_);
    mean0_[0] = base_mean;
    var0[0] = base_var;
    for (size_t omega = 1; omega < n_; ++omega) {
        const int k = std::countr_zero(omega);
        const size_t parent = omega & (omega - 1);
        mean0_[omega] = mean0_[parent] + mean_add[size_t(k)];
        var0[omega] = var0[parent] + var_add[size_t(k)];
    }
    for (size_t omega = 0; omega < n_; ++omega) {
        inv_sd0_[omega] = 1.0 / std::sqrt(var0[omega]);
        mean1_[omega] = mean0_[omega] + pulse_mean;
        inv_sd1_[omega] = 1.0 / std::sqrt(var0[omega] + pulse_var);
        ones_[omega] = uint8_t(std::popcount(omega));
        for (int k = 0; k + 1 <= memory_ - 2; ++k) {
            const unsigned from = (omega >> k) & 1u;
            const unsigned to = (omega >> (k + 1)) & 1u;
            if (from == 0 && to == 0) ++n00_[omega];
            else if (from == 0 && to == 1) ++n01_[omega];
            else if (from == 1 && to == 0) ++n10_[omega];
            else ++n11_[omega];
        }
    }
}

void HistoryKernel::set_source(const MarkovSource& src) {
    const StationaryDist st = stationary_distribution(src);
    h_src_ = entropy_rate_markov(src);
    if (memory_ == 1) {
        w_[0] = 1.0;
        c1_last0_ = c1_last1_ = st.pi1;
    } else {
        double pw00[32], pw01[32], pw10[32], pw11[32];
        pw00[0] = pw01[0] = pw10[0] = pw11[0] = 1.0;
        for (int k = 1; k <= memory_ - 2 + 1; ++k) {
            pw00[k] = pw00[k - 1] * (1.0 - src.p);
            pw01[k] = pw01[k - 1] * src.p;
            pw10[k] = pw10[k - 1] * src.q;
            pw11[k] = pw11[k - 1] * (1.0 - src.q);
        }
        for (size_t omega = 0; omega < n_; ++omega) {
            const double first = (omega & 1u) ? st.pi1 : st.pi0;
            w_[omega] = first * pw00[n00_[omega]] * pw01[n01_[omega]] * pw10[n10_[omega]] *
                        pw11[n11_[omega]];
        }
        c1_last0_ = src.p;
        c1_last1_ = 1.0 - src.q;
    }
    finish_source();
}

void HistoryKernel::set_source(const IndependentSource& src) {
    if (!(src.lambda0 >= 0.0 && src.lambda0 <= 1.0))
        throw std::invalid_argument("HistoryKernel: lambda0 must lie in [0, 1]");
    h_src_ = binary_entropy(src.lambda0);
    const double lambda1 = 1.0 - src.lambda0;
    if (memory_ == 1) {
        w_[0] = 1.0;
    } else {
        double wt[32];
        for (int k = 0; k <= memory_ - 1; ++k) {
            double value = 1.0;
            for (int j = 0; j < memory_ - 1 - k; ++j) value *= src.lambda0;
            for (int j = 0; j < k; ++j) value *= lambda1;
            wt[k] = value;
        }
        for (size_t omega = 0; omega < n_; ++omega) w_[omega] = wt[ones_[omega]];
    }
    c1_last0_ = c1_last1_ = lambda1;
    finish_source();
}

void HistoryKernel::finish_source() {
    double* buf = scratch_.data();
    std::memcpy(buf, w_.data(), n_ * sizeof(double));
    p_last1_ = pairwise_sum(buf + half_, n_ - half_);
    std::memcpy(buf, w_.data(), n_ * sizeof(double));
    p_last0_ = pairwise_sum(buf, half_);
    p1_src_ = c1_last0_ * p_last0_ + c1_last1_ * p_last1_;
    p0_src_ = (1.0 - c1_last0_) * p_last0_ + (1.0 - c1_last1_) * p_last1_;
    // "entropy rate minus the conditional entropy": the subtracted term is
    // built from H(S_i | history) = sum_w H2(c1). For M >= 2 this cancels the
    // entropy rate exactly in exact arithmetic; at M = 1 (empty history) the
    // leading term degrades to the marginal entropy and the difference is
    // carried explicitly.
    correction_ = h_src_ - (p_last0_ * h2_fast(c1_last0_) + p_last1_ * h2_fast(c1_last1_));
}

void HistoryKernel::fill_tau_table(double tau, TauTable& out) const {
    constexpr double kInvSqrt2 = 0.7071067811865476;
    out.tau = tau;
    out.u.resize(n_);
    out.v.resize(n_);
    out.h2u.resize(n_);
    out.h2v.resize(n_);
    for (size_t i = 0; i < n_; ++i) {
        out.u[i] = 0.5 * std::erfc((tau - mean0_[i]) * inv_sd0_[i] * kInvSqrt2);
        out.v[i] = 0.5 * std::erfc((tau - mean1_[i]) * inv_sd1_[i] * kInvSqrt2);
    }
    for (size_t i = 0; i < n_; ++i) {
        out.h2u[i] = h2_fast(out.u[i]);
        out.h2v[i] = h2_fast(out.v[i]);
    }
}

namespace {

// terms[i] = w[i] * (H2(c0 u + c1 v) - c0 h2u - c1 h2v) over [begin, end)
void fill_aware_terms(double* terms, const double* w, const double* u, const double* v,
                      const double* h2u, const double* h2v, double c1, size_t begin,
                      size_t end) {
    const double c0 = 1.0 - c1;
    size_t i = begin;
#ifdef MCAIR_KERNEL_AVX2
    const __m256d c0v = _mm256_set1_pd(c0);
    const __m256d c1v = _mm256_set1_pd(c1);
    const __m256d onev = _mm256_set1_pd(1.0);
    for (; i + 4 <= end; i += 4) {
        const __m256d uu = _mm256_loadu_pd(u + i);
        const __m256d vv = _mm256_loadu_pd(v + i);
        const __m256d mix = _mm256_fmadd_pd(c0v, uu, _mm256_mul_pd(c1v, vv));
        const __m256d hmix = _mm256_sub_pd(
            _mm256_setzero_pd(),
            _mm256_add_pd(xlog2_avx2(mix), xlog2_avx2(_mm256_sub_pd(onev, mix))));
        __m256d term = _mm256_fnmadd_pd(c0v, _mm256_loadu_pd(h2u + i), hmix);
        term = _mm256_fnmadd_pd(c1v, _mm256_loadu_pd(h2v + i), term);
        _mm256_storeu_pd(terms + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), term));
    }
#endif
    for (; i < end; ++i) {
        const double mix = std::fma(c0, u[i], c1 * v[i]);
        const double hmix = -(xlog2(mix) + xlog2(1.0 - mix));
        const double term = std::fma(-c1, h2v[i], std::fma(-c0, h2u[i], hmix));
        terms[i] = w[i] * term;
    }
}

void fill_products(double* out, const double* a, const double* b, size_t n) {
    size_t i = 0;
#ifdef MCAIR_KERNEL_AVX2
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
#endif
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

double HistoryKernel::mi_aware_raw(const TauTable& table) {
    double* buf = scratch_.data();
    fill_aware_terms(buf, w_.data(), table.u.data(), table.v.data(), table.h2u.data(),
                     table.h2v.data(), c1_last0_, 0, half_);
    fill_aware_terms(buf, w_.data(), table.u.data(), table.v.data(), table.h2u.data(),
                     table.h2v.data(), c1_last1_, half_, n_);
    return pairwise_sum(buf, n_) + correction_;
}

double HistoryKernel::mi_unaware_raw(const TauTable& table) {
    double* buf = scratch_.data();
    fill_products(buf, w_.data(), table.v.data(), n_);
    const double sv_hi = pairwise_sum(buf + half_, n_ - half_);
    const double sv_lo = pairwise_sum(buf, half_);
    fill_products(buf, w_.data(), table.u.data(), n_);
    const double su_hi = pairwise_sum(buf + half_, n_ - half_);
    const double su_lo = pairwise_sum(buf, half_);

    const double j11 = c1_last0_ * sv_lo + c1_last1_ * sv_hi;
    const double j01 = (1.0 - c1_last0_) * su_lo + (1.0 - c1_last1_) * su_hi;
    const double j10 = p1_src_ - j11;
    const double j00 = p0_src_ - j01;
    const double ps1 = j11 + j01;
    const double ps0 = j10 + j00;
    return h_src_ + (xlog2(j11) + xlog2(j10) + xlog2(j01) + xlog2(j00)) -
           (xlog2(ps1) + xlog2(ps0));
}

}  // namespace mcair::detail
