#pragma once

#include <stdexcept>

namespace crowtune {

// A reconstruction or metric hit a zero-variance, zero-energy or non-finite
// image. The optimizer converts this into a penalty fitness.
class DegenerateImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace crowtune
