#include "dsp/scalar.hpp"

#include <stdexcept>

namespace dsp {

Scalar rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    Scalar q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Scalar& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Scalar parse_scalar(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    auto dot = text.find('.');
    try {
        if (dot != std::string::npos) {
            std::string whole = text.substr(0, dot);
            std::string frac = text.substr(dot + 1);
            bool neg = !whole.empty() && whole[0] == '-';
            if (neg) whole.erase(0, 1);
            if (whole.empty()) whole = "0";
            if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
                whole.find_first_not_of("0123456789") != std::string::npos)
                throw std::invalid_argument("bad decimal");
            mpz_class den = 1;
            for (size_t k = 0; k < frac.size(); ++k) den *= 10;
            Scalar q(mpz_class(whole + frac), den);
            q.canonicalize();
            return neg ? Scalar(-q) : q;
        }
        Scalar q(text, 10);
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a rational number: '" + text + "'");
    }
}

Scalar floor_of(const Scalar& x) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Scalar(r);
}

Scalar ceil_of(const Scalar& x) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Scalar(r);
}

bool is_integer(const Scalar& x) { return x.get_den() == 1; }

double to_double(const Scalar& x) { return x.get_d(); }

}  // namespace dsp
