#include "mfgfn/cost.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "mfgfn/errors.hpp"

namespace mfgfn {

Cost Cost::parse(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    std::int64_t whole = 0;
    bool any_digit = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        whole = whole * 10 + (text[i] - '0');
        any_digit = true;
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            if (frac_digits >= 6) {
                if (text[i] != '0')
                    throw ConfigError("cost '" + std::string(text) +
                                      "' has more than six fractional digits");
                continue;
            }
            frac = frac * 10 + (text[i] - '0');
            ++frac_digits;
            any_digit = true;
        }
    }
    if (!any_digit || i != text.size())
        throw ConfigError("cost '" + std::string(text) + "' is not a decimal number");
    while (frac_digits < 6) {
        frac *= 10;
        ++frac_digits;
    }
    std::int64_t micros = whole * 1'000'000 + frac;
    return from_micros(negative ? -micros : micros);
}

Cost Cost::from_double(double value) {
    if (!std::isfinite(value)) throw ConfigError("cost value is not finite");
    return from_micros(static_cast<std::int64_t>(std::llround(value * 1e6)));
}

std::string Cost::str() const {
    std::int64_t m = micros_;
    std::string sign;
    if (m < 0) {
        sign = "-";
        m = -m;
    }
    std::int64_t whole = m / 1'000'000;
    std::int64_t frac = m % 1'000'000;
    if (frac == 0) return sign + std::to_string(whole);
    std::string digits = std::to_string(frac);
    digits.insert(digits.begin(), 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    return sign + std::to_string(whole) + "." + digits;
}

}  // namespace mfgfn
