#pragma once

#include <span>

namespace zinf {

/// Correctly rounded sum (Shewchuk's partials), so the result does not depend
/// on the order of the inputs. Falls back to naive summation if any input is
/// not finite.
double exact_sum(std::span<const double> values);

}  // namespace zinf
