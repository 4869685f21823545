#include "hlsgen/fixedpoint.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace hlsgen::fx {

namespace {

using i128 = __int128;

inline int32_t wrap32(int64_t v) { return static_cast<int32_t>(static_cast<uint64_t>(v)); }
inline int32_t wrap32_128(i128 v) { return static_cast<int32_t>(static_cast<uint64_t>(v)); }

// round ties away from zero at the given scale, wrapping to 32 bits.
// Non-finite values saturate by sign: the wrapping path models hardware
// registers, and +/-inf from an upstream overflow pins at the rail.
int32_t round_wrap(long double x, long double scale) {
    if (std::isnan(x)) return 0;
    if (std::isinf(x)) return x > 0 ? INT32_MAX : INT32_MIN;
    long double scaled = x * scale;
    // keep the magnitude inside the long-double exact-integer window before
    // rounding; anything beyond 2^32 wraps anyway
    scaled = std::fmod(scaled, 4294967296.0L);
    long long r = llroundl(scaled);
    return wrap32(r);
}

// floor(sqrt(v)) for v in [0, 2^63)
uint64_t isqrt_u64(uint64_t v) {
    if (v == 0)
        return 0;
    uint64_t x = static_cast<uint64_t>(std::sqrt(static_cast<double>(v)));
    // correct the double-precision estimate in both directions
    while (x > 0 && x * x > v)
        --x;
    while ((x + 1) * (x + 1) <= v)
        ++x;
    return x;
}

// Q32.32 multiply: full product, arithmetic shift right 32, low 64 bits kept
int64_t mul_q32(int64_t a, int64_t b) {
    i128 p = static_cast<i128>(a) * static_cast<i128>(b);
    return static_cast<int64_t>(static_cast<unsigned __int128>(p >> 32));
}

} // namespace

FixedValue to_fixed(long double x) {
    if (!(x > -32768.0L && x < 32768.0L))
        throw EvalError(EvalFault::RangeError,
                        "value not representable in Q16.16: " + std::to_string(static_cast<double>(x)));
    long long r = llroundl(x * 65536.0L);
    if (r > INT32_MAX)
        r = INT32_MAX;
    if (r < INT32_MIN)
        r = INT32_MIN;
    return FixedValue{static_cast<int32_t>(r)};
}

long double to_real(FixedValue v) { return static_cast<long double>(v.raw) / 65536.0L; }

FixedValue quantize_wrap(long double x) { return FixedValue{round_wrap(x, 65536.0L)}; }

std::string to_hex(FixedValue v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", static_cast<uint32_t>(v.raw));
    return buf;
}

std::string to_decimal(FixedValue v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(to_real(v)));
    return buf;
}

FixedValue add(FixedValue a, FixedValue b) {
    return FixedValue{wrap32(static_cast<int64_t>(a.raw) + b.raw)};
}

FixedValue sub(FixedValue a, FixedValue b) {
    return FixedValue{wrap32(static_cast<int64_t>(a.raw) - b.raw)};
}

FixedValue mul(FixedValue a, FixedValue b) {
    int64_t p = static_cast<int64_t>(a.raw) * static_cast<int64_t>(b.raw);
    return FixedValue{wrap32(p >> 16)};
}

FixedValue div(FixedValue a, FixedValue b, EvalWarnings* warnings) {
    if (b.raw == 0) {
        if (warnings)
            warnings->add("division by zero saturates (dividend " + to_hex(a) + ")");
        return FixedValue{a.raw < 0 ? INT32_MIN : INT32_MAX};
    }
    int64_t n = static_cast<int64_t>(a.raw) << 16;
    int64_t q = n / b.raw; // C++ integer division truncates toward zero
    return FixedValue{wrap32(q)};
}

FixedValue value(FixedValue a) { return a; }

FixedValue power(FixedValue a, int exponent, EvalWarnings* warnings) {
    if (exponent == 0)
        return FixedValue{Q16_ONE};
    int64_t result = static_cast<int64_t>(1) << 32; // 1.0 in Q32.32
    int64_t base = static_cast<int64_t>(a.raw) << 16;
    unsigned k = static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
    while (k != 0) {
        if (k & 1u)
            result = mul_q32(result, base);
        base = mul_q32(base, base);
        k >>= 1;
    }
    if (exponent < 0) {
        if (result == 0) {
            if (warnings)
                warnings->add("reciprocal of zero in power saturates");
            return FixedValue{a.raw < 0 ? INT32_MIN : INT32_MAX};
        }
        i128 one = static_cast<i128>(1) << 64;
        result = static_cast<int64_t>(static_cast<unsigned __int128>(one / result));
    }
    return FixedValue{wrap32(result >> 16)};
}

FixedValue sqrt(FixedValue a) {
    if (a.raw < 0)
        throw EvalError(EvalFault::DomainError, "sqrt of negative value " + to_hex(a));
    // isqrt of the raw Q16.16 bits lands in Q8.8; shift up to Q16.16
    uint64_t r = isqrt_u64(static_cast<uint64_t>(a.raw));
    return FixedValue{static_cast<int32_t>(r << 8)};
}

namespace {
// quantize a real value through Q3.29 (round ties away, 32-bit wrap), then
// arithmetic shift down to Q16.16
FixedValue through_q29(long double v) {
    int32_t q29 = round_wrap(v, 536870912.0L); // 2^29
    return FixedValue{q29 >> 13};
}
} // namespace

SinCosTan sincostan(FixedValue a) {
    long double x = to_real(a);
    return SinCosTan{through_q29(sinl(x)), through_q29(cosl(x)), through_q29(tanl(x))};
}

FixedValue log(FixedValue base, FixedValue arg) {
    if (base.raw <= 0 || base.raw == Q16_ONE)
        throw EvalError(EvalFault::DomainError, "log base must be positive and not 1.0, got " + to_hex(base));
    if (arg.raw <= 0)
        throw EvalError(EvalFault::DomainError, "log argument must be positive, got " + to_hex(arg));
    long double r = logl(to_real(arg)) / logl(to_real(base));
    // the Q64.64 internal format is finer than long-double precision, so the
    // only visible quantization is the final round to Q16.16
    return quantize_wrap(r);
}

const char* cmp_token(Cmp c) {
    switch (c) {
    case Cmp::Gt: return ">";
    case Cmp::Lt: return "<";
    case Cmp::Ge: return ">=";
    case Cmp::Le: return "<=";
    case Cmp::Eq: return "==";
    case Cmp::Ne: return "!=";
    }
    return "?";
}

bool parse_cmp(const std::string& tok, Cmp* out) {
    if (tok == ">") *out = Cmp::Gt;
    else if (tok == "<") *out = Cmp::Lt;
    else if (tok == ">=") *out = Cmp::Ge;
    else if (tok == "<=") *out = Cmp::Le;
    else if (tok == "==") *out = Cmp::Eq;
    else if (tok == "!=") *out = Cmp::Ne;
    else return false;
    return true;
}

FixedValue compare(FixedValue a, FixedValue b, Cmp c) {
    bool r = false;
    switch (c) {
    case Cmp::Gt: r = a.raw > b.raw; break;
    case Cmp::Lt: r = a.raw < b.raw; break;
    case Cmp::Ge: r = a.raw >= b.raw; break;
    case Cmp::Le: r = a.raw <= b.raw; break;
    case Cmp::Eq: r = a.raw == b.raw; break;
    case Cmp::Ne: r = a.raw != b.raw; break;
    }
    return FixedValue{r ? 1 : 0};
}

FixedValue merge(FixedValue if_v, FixedValue else_v, FixedValue cond) {
    return cond.raw != 0 ? if_v : else_v;
}

} // namespace hlsgen::fx
