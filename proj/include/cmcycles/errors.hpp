#pragma once

#include <stdexcept>
#include <string>

namespace cmc {

// Domain error codes. CLI maps any of these to exit code 1; malformed
// input is reported separately as a usage error (exit code 2).
enum class errc {
    inert_prime,
    ramified_prime,
    non_residue,
    zero_divisor,
    precision_exceeded,
    non_unit_slope,
    two_torsion,
    unsupported_d,
    non_split_prime,
    supersingular_fiber,
    family_mismatch,
    not_admissible,
    internal_ambiguity,
    oracle_too_large,
    homogeneity_violation,
    not_a_torsion_residue,
    missing_second_digit,
    odd_negative_valuation,
    no_matching_root,
    branch_mismatch,
    not_split,
    degenerate_quadratic,
    profile_too_large,
    generator_fails_criterion,
    bad_point,
    cache_error,
    parse_error,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
    Error(errc c, const std::string& what)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& what) { throw Error(c, what); }

}  // namespace cmc
