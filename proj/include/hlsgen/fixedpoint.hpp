#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hlsgen::fx {

// All datapath values are Q16.16: a 32-bit two's-complement integer holding
// value * 2^16.  `FixedValue` wraps the raw bits so they never mix with
// ordinary integers by accident.
struct FixedValue {
    int32_t raw = 0;

    friend bool operator==(FixedValue a, FixedValue b) { return a.raw == b.raw; }
    friend bool operator!=(FixedValue a, FixedValue b) { return a.raw != b.raw; }
};

inline constexpr int32_t Q16_ONE = 1 << 16;

// Evaluation faults.  Division by zero is not one of them: it saturates and
// records a warning instead, matching the emitted hardware.
enum class EvalFault {
    DomainError, // sqrt of negative, log with base <= 0 / base == 1 / arg <= 0
    RangeError,  // real value not representable in Q16.16
};

class EvalError {
  public:
    EvalError(EvalFault fault, std::string message) : fault_(fault), message_(std::move(message)) {}
    EvalFault fault() const { return fault_; }
    const std::string& message() const { return message_; }

  private:
    EvalFault fault_;
    std::string message_;
};

// Collects non-fatal evaluation notes (currently only divide-by-zero
// saturation).
struct EvalWarnings {
    std::vector<std::string> notes;
    void add(std::string n) { notes.push_back(std::move(n)); }
};

// ---- conversions -----------------------------------------------------------

// round(x * 2^16), ties away from zero.  Throws RangeError when |x| >= 32768;
// the boundary cases that round to exactly 2^31 clamp to INT32_MAX.
FixedValue to_fixed(long double x);

long double to_real(FixedValue v);

// round(x * 2^16) with two's-complement wraparound instead of a range check.
// Used where hardware would silently overflow (constant folding of
// arithmetic whose result leaves the format).
FixedValue quantize_wrap(long double x);

std::string to_hex(FixedValue v);      // "0x00018000"
std::string to_decimal(FixedValue v);  // "1.500000" (6 fractional digits)

// ---- exact integer operators (bit-exact contracts) -------------------------

FixedValue add(FixedValue a, FixedValue b); // 32-bit wraparound
FixedValue sub(FixedValue a, FixedValue b); // 32-bit wraparound

// Full 64-bit product shifted right 16 arithmetically (truncation toward
// negative infinity), low 32 bits kept.
FixedValue mul(FixedValue a, FixedValue b);

// (a * 2^16) / b truncating toward zero, low 32 bits kept.  b == 0 saturates
// to INT32_MAX (a >= 0) or INT32_MIN (a < 0) and records a warning.
FixedValue div(FixedValue a, FixedValue b, EvalWarnings* warnings = nullptr);

FixedValue value(FixedValue a); // identity

// Repeated squaring in Q32.32; exponent is an integer in [-128, 127].
// Negative exponents compute 1.0 / a^|e| with the division rules above.
FixedValue power(FixedValue a, int exponent, EvalWarnings* warnings = nullptr);

// ---- transcendental operators ----------------------------------------------
// Evaluated in extended-precision real arithmetic, quantized through the
// internal hardware format first, then converted to Q16.16:
//   sqrt       Q8.8  (integer square root of the raw value)
//   sin/cos/tan Q3.29 (round ties away, 32-bit wrap, then arithmetic >> 13)
//   log        Q64.64 (effectively full precision, then round to Q16.16)

FixedValue sqrt(FixedValue a); // DomainError when a < 0

struct SinCosTan {
    FixedValue sin_v, cos_v, tan_v;
};
SinCosTan sincostan(FixedValue a);

// log base a of b.  DomainError when a <= 0, a == 1.0 exactly, or b <= 0.
FixedValue log(FixedValue base, FixedValue arg);

// ---- comparisons and selection ----------------------------------------------

enum class Cmp { Gt, Lt, Ge, Le, Eq, Ne };

const char* cmp_token(Cmp c);                    // ">", "<", ...
bool parse_cmp(const std::string& tok, Cmp* out);

// Signed 32-bit comparison; result is 1 or 0.
FixedValue compare(FixedValue a, FixedValue b, Cmp c);

// cond != 0 selects the if-branch value.
FixedValue merge(FixedValue if_v, FixedValue else_v, FixedValue cond);

} // namespace hlsgen::fx
