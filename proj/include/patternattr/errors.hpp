#pragma once

#include <stdexcept>

namespace patternattr {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error { public: using Error::Error; };
class DegenerateSample : public Error { public: using Error::Error; };
class DegenerateTarget : public Error { public: using Error::Error; };
class SequenceTooShort : public Error { public: using Error::Error; };
class UnknownTokenId : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };
class EmptyDataset : public Error { public: using Error::Error; };
class BadConfig : public Error { public: using Error::Error; };
class MissingGroundTruth : public Error { public: using Error::Error; };
class DegenerateDirection : public Error { public: using Error::Error; };
class EmptySpecList : public Error { public: using Error::Error; };
class FileNotFound : public Error { public: using Error::Error; };
class MalformedRow : public Error { public: using Error::Error; };
class UnsupportedVersion : public Error { public: using Error::Error; };
class CorruptFile : public Error { public: using Error::Error; };
class HashMismatch : public Error { public: using Error::Error; };

}  // namespace patternattr
