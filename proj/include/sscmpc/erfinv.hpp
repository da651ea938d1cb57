#pragma once

namespace sscmpc {

/// Inverse error function on (-1, 1). Initial rational approximation refined
/// by Newton steps against std::erf; relative accuracy better than 1e-13 over
/// the domain used here. Returns +/-inf at +/-1, throws DomainError outside
/// [-1, 1].
double erf_inv(double y);

}  // namespace sscmpc
