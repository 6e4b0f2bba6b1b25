/* Philox4x64-10 and inverse-CDF normals, mirroring philox.py word for word. */
#ifndef BITEBULLET_PHILOX_H
#define BITEBULLET_PHILOX_H

#include <stdint.h>
#include <math.h>

#define BB_M0 0xD2E7470EE14C6C93ULL
#define BB_M1 0xCA5A826395121157ULL
#define BB_W0 0x9E3779B97F4A7C15ULL
#define BB_W1 0xBB67AE8584CAA73BULL
#define BB_KEY_TAG 0x6269746562756C6CULL
#define BB_TWO_M53 (1.0 / 9007199254740992.0)

static inline uint64_t bb_mulhilo(uint64_t a, uint64_t b, uint64_t *hi)
{
    __uint128_t p = (__uint128_t)a * (__uint128_t)b;
    *hi = (uint64_t)(p >> 64);
    return (uint64_t)p;
}

static inline void bb_philox(uint64_t c[4], uint64_t k0, uint64_t k1)
{
    uint64_t hi0, hi1, lo0, lo1, n0, n2;
    int i;
    for (i = 0; i < 10; i++) {
        if (i) {
            k0 += BB_W0;
            k1 += BB_W1;
        }
        lo0 = bb_mulhilo(BB_M0, c[0], &hi0);
        lo1 = bb_mulhilo(BB_M1, c[2], &hi1);
        n0 = hi1 ^ c[1] ^ k0;
        n2 = hi0 ^ c[3] ^ k1;
        c[0] = n0;
        c[1] = lo1;
        c[2] = n2;
        c[3] = lo0;
    }
}

/* Four words of substream `stream` for block `block` of path `path`. */
static inline void bb_words(uint64_t seed, uint64_t path, uint64_t stream,
                            uint64_t block, uint64_t out[4])
{
    out[0] = block;
    out[1] = path;
    out[2] = stream;
    out[3] = 0;
    bb_philox(out, seed, BB_KEY_TAG);
}

/* Wichura (1988) AS241 PPND16 inverse normal CDF, |rel err| ~ 1e-16. */
static inline double bb_ndtri(double p)
{
    double q = p - 0.5, r, z;
    if (fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q * (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r
                       + 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r
                     + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r
                   + 1.3314166789178437745e+2) * r + 3.3871328727963666080e0)
            / (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r
                    + 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r
                  + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r
                + 4.2313330701600911252e+1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = sqrt(-log(r));
    if (r <= 5.0) {
        r -= 1.6;
        z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                  + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
              + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
            / (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                  + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
              + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
            / (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -z : z;
}

static inline void bb_normals4(uint64_t seed, uint64_t path, uint64_t block,
                               double z[4])
{
    uint64_t w[4];
    int i;
    bb_words(seed, path, 0, block, w);
    for (i = 0; i < 4; i++)
        z[i] = bb_ndtri(((double)(w[i] >> 11) + 0.5) * BB_TWO_M53);
}

static inline void bb_uniforms4(uint64_t seed, uint64_t path, uint64_t block,
                                double u[4])
{
    uint64_t w[4];
    int i;
    bb_words(seed, path, 1, block, w);
    for (i = 0; i < 4; i++)
        u[i] = (double)(w[i] >> 11) * BB_TWO_M53;
}

#endif
