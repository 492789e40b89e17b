#pragma once

#include <stdexcept>
#include <string>

namespace krylovlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

#define KRYLOVLAB_DEFINE_ERROR(Name)                                         \
    class Name : public Error                                                \
    {                                                                        \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

KRYLOVLAB_DEFINE_ERROR(InvalidArgument);
KRYLOVLAB_DEFINE_ERROR(DimensionError);
KRYLOVLAB_DEFINE_ERROR(IndexError);
KRYLOVLAB_DEFINE_ERROR(DegenerateSpectrum);
KRYLOVLAB_DEFINE_ERROR(SpectrumHit);
KRYLOVLAB_DEFINE_ERROR(ZeroVector);
KRYLOVLAB_DEFINE_ERROR(DatumNotInRange);
KRYLOVLAB_DEFINE_ERROR(NotSimpleSpectrum);
KRYLOVLAB_DEFINE_ERROR(ContourTouchesSpectrum);
KRYLOVLAB_DEFINE_ERROR(InseparableSpectrum);
KRYLOVLAB_DEFINE_ERROR(DegreeTooLarge);
KRYLOVLAB_DEFINE_ERROR(ParseError);
KRYLOVLAB_DEFINE_ERROR(ValidationError);

#undef KRYLOVLAB_DEFINE_ERROR

} // namespace krylovlab
