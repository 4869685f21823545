// Q16.16 arithmetic: conversions, the exact integer operator contracts and
// the quantization paths of the transcendental operators.  Expected raw
// values were computed independently with arbitrary-precision arithmetic.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "hlsgen/fixedpoint.hpp"

using namespace hlsgen;
using fx::FixedValue;

namespace {
FixedValue raw(uint32_t bits) { return FixedValue{static_cast<int32_t>(bits)}; }
} // namespace

TEST_CASE("to_fixed rounds ties away from zero") {
    CHECK(fx::to_fixed(0.3L).raw == 0x00004CCD);
    CHECK(fx::to_fixed(1.5L).raw == 0x00018000);
    CHECK(fx::to_fixed(-1.0L) == raw(0xFFFF0000));
    CHECK(fx::to_fixed(-0.3L) == raw(0xFFFFB333));
    CHECK(fx::to_fixed(1.0L / 3.0L).raw == 0x00005555);
    CHECK(fx::to_fixed(-1.0L / 3.0L) == raw(0xFFFFAAAB));
    CHECK(fx::to_fixed(3.14159265358979323846L).raw == 0x0003243F);
    CHECK(fx::to_fixed(-0.15L) == raw(0xFFFFD99A));
    CHECK(fx::to_fixed(1024.0L).raw == 0x04000000);
    CHECK(fx::to_fixed(-3.375L) == raw(0xFFFCA000));

    // exactly half an LSB rounds away from zero in both directions
    CHECK(fx::to_fixed(0.00000762939453125L).raw == 1);
    CHECK(fx::to_fixed(-0.00000762939453125L).raw == -1);
}

TEST_CASE("to_fixed range handling") {
    CHECK_THROWS_AS(fx::to_fixed(32768.0L), fx::EvalError);
    CHECK_THROWS_AS(fx::to_fixed(-32768.0L), fx::EvalError);
    CHECK_THROWS_AS(fx::to_fixed(1.0e9L), fx::EvalError);

    // the largest representable magnitude is fine
    CHECK(fx::to_fixed(32767.0L).raw == 0x7FFF0000);
    // the positive tie at the top of the range clamps instead of overflowing;
    // the negative tie lands exactly on INT32_MIN
    CHECK(fx::to_fixed(32767.99999237060546875L).raw == INT32_MAX);
    CHECK(fx::to_fixed(-32767.99999237060546875L).raw == INT32_MIN);
}

TEST_CASE("to_real inverts to_fixed on exact values") {
    for (long double x : {0.0L, 1.0L, -1.0L, 0.5L, -0.25L, 1024.0L, -3.375L, 32767.0L})
        CHECK(fx::to_real(fx::to_fixed(x)) == x);
}

TEST_CASE("hex and decimal formatting") {
    CHECK(fx::to_hex(fx::to_fixed(1.5L)) == "0x00018000");
    CHECK(fx::to_hex(raw(0xFFFF0000)) == "0xFFFF0000");
    CHECK(fx::to_decimal(fx::to_fixed(1.5L)) == "1.500000");
    CHECK(fx::to_decimal(fx::to_fixed(-0.25L)) == "-0.250000");
}

TEST_CASE("quantize_wrap wraps instead of throwing") {
    CHECK(fx::quantize_wrap(1.5L).raw == 0x00018000);
    // 32768.0 * 2^16 == 2^31 wraps to INT32_MIN
    CHECK(fx::quantize_wrap(32768.0L).raw == INT32_MIN);
    CHECK(fx::quantize_wrap(65536.0L).raw == 0);
}

TEST_CASE("add/sub wrap around like 32-bit hardware") {
    CHECK(fx::add(fx::to_fixed(1.5L), fx::to_fixed(0.25L)).raw == 0x0001C000);
    CHECK(fx::sub(fx::to_fixed(1.0L), fx::to_fixed(3.0L)) == raw(0xFFFE0000));
    CHECK(fx::add(raw(0x7FFFFFFF), raw(0x00000001)).raw == INT32_MIN);
    CHECK(fx::sub(raw(0x80000000), raw(0x00000001)).raw == INT32_MAX);
}

TEST_CASE("mul keeps bits [47:16] of the 64-bit product") {
    CHECK(fx::mul(fx::to_fixed(1.5L), fx::to_fixed(1.5L)).raw == 0x00024000);
    CHECK(fx::mul(fx::to_fixed(-1.5L), fx::to_fixed(1.5L)) == raw(0xFFFDC000));
    CHECK(fx::mul(fx::to_fixed(0.3L), fx::to_fixed(0.3L)).raw == 0x0000170A);
    // truncation is toward negative infinity (arithmetic shift)
    CHECK(fx::mul(fx::to_fixed(-0.3L), fx::to_fixed(0.3L)) == raw(0xFFFFE8F5));
    // 300 * 300 = 90000 does not fit Q16.16 and wraps
    CHECK(fx::mul(fx::to_fixed(300.0L), fx::to_fixed(300.0L)).raw == 0x5F900000);
}

TEST_CASE("div truncates toward zero") {
    CHECK(fx::div(fx::to_fixed(1.0L), fx::to_fixed(3.0L)).raw == 0x00005555);
    CHECK(fx::div(fx::to_fixed(-1.0L), fx::to_fixed(3.0L)) == raw(0xFFFFAAAB));
    CHECK(fx::div(fx::to_fixed(1.5L), fx::to_fixed(0.5L)).raw == 0x00030000);
    CHECK(fx::div(fx::to_fixed(0.3L), fx::to_fixed(0.3L)).raw == 0x00010000);
    CHECK(fx::div(fx::to_fixed(7.0L), fx::to_fixed(-2.0L)) == raw(0xFFFC8000));
}

TEST_CASE("div by zero saturates by dividend sign and warns") {
    fx::EvalWarnings w;
    CHECK(fx::div(fx::to_fixed(2.0L), FixedValue{0}, &w).raw == INT32_MAX);
    CHECK(fx::div(fx::to_fixed(-2.0L), FixedValue{0}, &w).raw == INT32_MIN);
    CHECK(fx::div(FixedValue{0}, FixedValue{0}, &w).raw == INT32_MAX);
    CHECK(w.notes.size() == 3);
}

TEST_CASE("power by repeated squaring in Q32.32") {
    CHECK(fx::power(fx::to_fixed(1.5L), 2).raw == 0x00024000);
    CHECK(fx::power(fx::to_fixed(2.0L), 10).raw == 0x04000000);
    CHECK(fx::power(fx::to_fixed(-2.0L), 3) == raw(0xFFF80000));
    CHECK(fx::power(fx::to_fixed(3.0L), 0).raw == 0x00010000);
    CHECK(fx::power(fx::to_fixed(0.5L), 3).raw == 0x00002000);
}

TEST_CASE("negative exponents invert through Q32.32 division") {
    CHECK(fx::power(fx::to_fixed(2.0L), -1).raw == 0x00008000);
    CHECK(fx::power(fx::to_fixed(-2.0L), -2).raw == 0x00004000);
    // 0.5^20 underflows the internal format to zero; the inverse saturates
    fx::EvalWarnings w;
    FixedValue r = fx::power(FixedValue{0}, -1, &w);
    CHECK(r.raw == INT32_MAX);
    CHECK(w.notes.size() == 1);
}

TEST_CASE("power handles the full exponent range") {
    // the magnitude of -128 needs all 8 bits; the result itself underflows
    CHECK_NOTHROW(fx::power(fx::to_fixed(2.0L), -128));
    CHECK_NOTHROW(fx::power(fx::to_fixed(2.0L), 127));
    CHECK(fx::power(fx::to_fixed(1.0L), -128).raw == 0x00010000);
    CHECK(fx::power(fx::to_fixed(1.0L), 127).raw == 0x00010000);
}

TEST_CASE("sqrt is the exact integer square root in Q8.8") {
    CHECK(fx::sqrt(fx::to_fixed(2.0L)).raw == 0x00016A00);
    CHECK(fx::sqrt(fx::to_fixed(4.0L)).raw == 0x00020000);
    CHECK(fx::sqrt(fx::to_fixed(16384.0L)).raw == 0x00800000);
    CHECK(fx::sqrt(fx::to_fixed(0.25L)).raw == 0x00008000);
    CHECK(fx::sqrt(FixedValue{0}).raw == 0);
    CHECK(fx::sqrt(fx::to_fixed(1.0L)).raw == 0x00010000);
    CHECK_THROWS_AS(fx::sqrt(fx::to_fixed(-1.0L)), fx::EvalError);
}

TEST_CASE("sqrt result is the floor square root for every raw value") {
    for (int32_t v : {1, 2, 3, 65535, 65536, 65537, 123456789, INT32_MAX}) {
        int64_t r = fx::sqrt(FixedValue{v}).raw >> 8; // back to Q8.8
        CHECK(r * r <= v);
        CHECK((r + 1) * (r + 1) > v);
    }
}

TEST_CASE("sincostan quantizes through Q3.29") {
    fx::SinCosTan z = fx::sincostan(FixedValue{0});
    CHECK(z.sin_v.raw == 0);
    CHECK(z.cos_v.raw == 0x00010000);
    CHECK(z.tan_v.raw == 0);

    // pi/6: sin = 0.5 exactly after quantization
    fx::SinCosTan s6 = fx::sincostan(fx::to_fixed(0.5235987755982988L));
    CHECK(s6.sin_v.raw == 0x00008000);
    CHECK(s6.cos_v.raw == 0x0000DDB3);
    CHECK(s6.tan_v.raw == 0x000093CD);

    // quantized pi/2 lands just past the true pole, so cos is -1 LSB
    fx::SinCosTan s2 = fx::sincostan(fx::to_fixed(1.5707963267948966L));
    CHECK(s2.sin_v.raw == 0x00010000);
    CHECK(s2.cos_v == raw(0xFFFFFFFF));

    fx::SinCosTan sp = fx::sincostan(fx::to_fixed(3.14159265358979L));
    CHECK(sp.sin_v.raw == 0);
    CHECK(sp.cos_v == raw(0xFFFF0000));
    CHECK(sp.tan_v == raw(0xFFFFFFFF));
}

TEST_CASE("sine and cosine stay within 2^-12 of the real value") {
    for (int i = -700; i <= 700; i += 13) {
        FixedValue a{i * 1000};
        long double x = fx::to_real(a);
        fx::SinCosTan z = fx::sincostan(a);
        CHECK(std::fabs(fx::to_real(z.sin_v) - sinl(x)) <= 0.000244140625L);
        CHECK(std::fabs(fx::to_real(z.cos_v) - cosl(x)) <= 0.000244140625L);
    }
}

TEST_CASE("log of exact powers is exact") {
    CHECK(fx::log(fx::to_fixed(2.0L), fx::to_fixed(8.0L)).raw == 0x00030000);
    CHECK(fx::log(fx::to_fixed(10.0L), fx::to_fixed(100.0L)).raw == 0x00020000);
    CHECK(fx::log(fx::to_fixed(2.0L), fx::to_fixed(0.5L)) == raw(0xFFFF0000));
}

TEST_CASE("log domain errors") {
    CHECK_THROWS_AS(fx::log(fx::to_fixed(1.0L), fx::to_fixed(8.0L)), fx::EvalError);
    CHECK_THROWS_AS(fx::log(FixedValue{0}, fx::to_fixed(8.0L)), fx::EvalError);
    CHECK_THROWS_AS(fx::log(fx::to_fixed(-2.0L), fx::to_fixed(8.0L)), fx::EvalError);
    CHECK_THROWS_AS(fx::log(fx::to_fixed(2.0L), FixedValue{0}), fx::EvalError);
    CHECK_THROWS_AS(fx::log(fx::to_fixed(2.0L), fx::to_fixed(-1.0L)), fx::EvalError);
}

TEST_CASE("compare implements all six relations on signed raw bits") {
    FixedValue a = fx::to_fixed(1.0L), b = fx::to_fixed(2.0L);
    CHECK(fx::compare(a, b, fx::Cmp::Lt).raw == 1);
    CHECK(fx::compare(a, b, fx::Cmp::Gt).raw == 0);
    CHECK(fx::compare(a, a, fx::Cmp::Ge).raw == 1);
    CHECK(fx::compare(a, a, fx::Cmp::Le).raw == 1);
    CHECK(fx::compare(a, a, fx::Cmp::Eq).raw == 1);
    CHECK(fx::compare(a, b, fx::Cmp::Ne).raw == 1);
    // signed, not unsigned: -1 < 1
    CHECK(fx::compare(fx::to_fixed(-1.0L), a, fx::Cmp::Lt).raw == 1);
}

TEST_CASE("cmp tokens round-trip") {
    using fx::Cmp;
    for (Cmp c : {Cmp::Gt, Cmp::Lt, Cmp::Ge, Cmp::Le, Cmp::Eq, Cmp::Ne}) {
        Cmp back{};
        CHECK(fx::parse_cmp(fx::cmp_token(c), &back));
        CHECK(back == c);
    }
    fx::Cmp ignored{};
    CHECK_FALSE(fx::parse_cmp("=", &ignored));
    CHECK_FALSE(fx::parse_cmp("", &ignored));
}

TEST_CASE("merge selects on nonzero condition") {
    FixedValue iv = fx::to_fixed(1.0L), ev = fx::to_fixed(2.0L);
    CHECK(fx::merge(iv, ev, FixedValue{1}) == iv);
    CHECK(fx::merge(iv, ev, FixedValue{0}) == ev);
    CHECK(fx::merge(iv, ev, fx::to_fixed(1.0L)) == iv);
}

TEST_CASE("value is the identity") {
    CHECK(fx::value(raw(0xDEADBEEF)) == raw(0xDEADBEEF));
}
