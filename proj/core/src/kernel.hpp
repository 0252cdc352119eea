#pragma once
// Internal evaluation kernel for the per-use information of the threshold-
// detected channel. Shared by the public mi_* entry points and the
// optimizer; not part of the installed interface.
//
// Layout: histories are (M-1)-bit words, oldest symbol at the LSB. The most
// recent past symbol s_{i-1} is the top bit, so the lower half of the index
// range has s_{i-1} = 0 and the upper half s_{i-1} = 1; per-block source
// priors c1 = P(s_i = 1 | s_{i-1}) are constants over each half.
//
// All transcendentals on the hot path go through xlog2() below, which is a
// fixed FMA sequence (identical results scalar or vectorized), so outputs
// do not depend on how the work is split across workers.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "mcair/channel.hpp"
#include "mcair/sources.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define MCAIR_KERNEL_AVX2 1
#endif

namespace mcair::detail {

// Arguments below this threshold contribute less than 1e-277 bits to any
// entropy sum and are flushed to an exact zero (this also keeps the mantissa
// decomposition away from subnormals).
inline constexpr double kXlgTiny = 1e-280;
inline constexpr double kTwoOverLn2 = 2.8853900817779268;  // 2 / ln 2

// x * log2(x) with xlog2(0) = xlog2(1) = 0; negative/NaN inputs map to 0.
// log2 is evaluated as exponent + (2/ln2) * atanh(z), z = (m-1)/(m+1) with
// the mantissa m normalized to [0.75, 1.5): |z| <= 0.2, and the 11-term odd
// series is accurate to ~1 ulp.
inline double xlog2(double x) {
    if (!(x > kXlgTiny)) return 0.0;
    uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    int e = int((bits >> 52) & 0x7FF) - 1023;
    bits = (bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull;
    double m;
    std::memcpy(&m, &bits, sizeof m);
    if (m >= 1.5) {
        m *= 0.5;
        e += 1;
    }
    const double z = (m - 1.0) / (m + 1.0);
    const double z2 = z * z;
    double poly = 1.0 / 21.0;
    poly = std::fma(poly, z2, 1.0 / 19.0);
    poly = std::fma(poly, z2, 1.0 / 17.0);
    poly = std::fma(poly, z2, 1.0 / 15.0);
    poly = std::fma(poly, z2, 1.0 / 13.0);
    poly = std::fma(poly, z2, 1.0 / 11.0);
    poly = std::fma(poly, z2, 1.0 / 9.0);
    poly = std::fma(poly, z2, 1.0 / 7.0);
    poly = std::fma(poly, z2, 1.0 / 5.0);
    poly = std::fma(poly, z2, 1.0 / 3.0);
    poly = std::fma(poly, z2, 1.0);
    const double log2x = double(e) + kTwoOverLn2 * (z * poly);
    return x * log2x;
}

inline double h2_fast(double x) { return -(xlog2(x) + xlog2(1.0 - x)); }

// Exact binary-tree reduction over adjacent pairs; consumes the buffer.
inline double pairwise_sum(double* buf, size_t n) {
    if (n == 0) return 0.0;
    while (n > 1) {
        const size_t half = n / 2;
        for (size_t i = 0; i < half; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
        if (n & 1) {
            buf[half] = buf[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return buf[0];
}

#ifdef MCAIR_KERNEL_AVX2
inline __m256d xlog2_avx2(__m256d x) {
    const __m256d keep = _mm256_cmp_pd(x, _mm256_set1_pd(kXlgTiny), _CMP_GT_OQ);
    const __m256i bits = _mm256_castpd_si256(x);
    // signed int64 -> double for exponents (|value| << 2^51)
    const __m256i expi =
        _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
    const __m256i magic = _mm256_set1_epi64x(0x4338000000000000ll);  // 2^52 + 2^51
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(expi, magic)),
                              _mm256_castsi256_pd(magic));
    const __m256i mbits =
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                        _mm256_set1_epi64x(0x3FF0000000000000ll));
    __m256d m = _mm256_castsi256_pd(mbits);
    const __m256d ge15 = _mm256_cmp_pd(m, _mm256_set1_pd(1.5), _CMP_GE_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), ge15);
    e = _mm256_add_pd(e, _mm256_and_pd(ge15, _mm256_set1_pd(1.0)));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d z = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d z2 = _mm256_mul_pd(z, z);
    __m256d poly = _mm256_set1_pd(1.0 / 21.0);
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 19.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 17.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 15.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 13.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 11.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 9.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 7.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 5.0));
    poly = _mm256_fmadd_pd(poly, z2, _mm256_set1_pd(1.0 / 3.0));
    poly = _mm256_fmadd_pd(poly, z2, one);
    const __m256d log2x =
        _mm256_add_pd(e, _mm256_mul_pd(_mm256_set1_pd(kTwoOverLn2), _mm256_mul_pd(z, poly)));
    return _mm256_and_pd(_mm256_mul_pd(x, log2x), keep);
}
#endif

// Per-threshold transition probabilities and their binary entropies, one
// entry per history.
struct TauTable {
    double tau = 0.0;
    std::vector<double> u;    // P(s_hat = 1 | history, s = 0)
    std::vector<double> v;    // P(s_hat = 1 | history, s = 1)
    std::vector<double> h2u;  // binary entropy of u
    std::vector<double> h2v;  // binary entropy of v
    bool filled() const { return !u.empty(); }
    size_t bytes() const { return 4 * u.size() * sizeof(double); }
};

class HistoryKernel {
public:
    HistoryKernel(const ChannelImpulseResponse& cir, const SystemParams& params);

    int memory() const { return memory_; }
    size_t histories() const { return n_; }
    double entropy_rate() const { return h_src_; }

    void set_source(const MarkovSource& src);
    void set_source(const IndependentSource& src);

    void fill_tau_table(double tau, TauTable& out) const;

    // Pre-clip per-use information for the currently-set source:
    // aware   = entropy rate - H(S_i | history, S_hat_i)
    // unaware = entropy rate - H(S_i | S_hat_i)
    double mi_aware_raw(const TauTable& table);
    double mi_unaware_raw(const TauTable& table);

private:
    void finish_source();  // block masses, priors, entropy-rate correction

    int memory_ = 1;
    size_t n_ = 1;
    size_t half_ = 0;  // start of the s_{i-1} = 1 block (0 when M = 1)
    std::vector<double> mean0_, inv_sd0_, mean1_, inv_sd1_;
    std::vector<uint8_t> n00_, n01_, n10_, n11_;  // within-history transitions
    std::vector<uint8_t> ones_;                   // history popcount

    std::vector<double> w_;  // history weights under the current source
    double c1_last0_ = 0.5, c1_last1_ = 0.5;
    double h_src_ = 0.0;
    double p_last0_ = 0.0, p_last1_ = 1.0;
    double p1_src_ = 0.5, p0_src_ = 0.5;
    double correction_ = 0.0;
    std::vector<double> scratch_;
};

}  // namespace mcair::detail
