#pragma once

#include <stdexcept>
#include <string>

namespace eegclf {

// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- recording files ----

// File does not start with the recording magic bytes.
struct BadMagic : Error {
    using Error::Error;
};

// Header declares more data than the file holds.
struct TruncatedPayload : Error {
    using Error::Error;
};

// Channel name table does not line up with the declared channel count,
// or a Recording's layout disagrees with its sample matrix.
struct ChannelMismatch : Error {
    using Error::Error;
};

struct UnknownChannel : Error {
    using Error::Error;
};

// ---- dataset assembly ----

struct MissingLabel : Error {
    using Error::Error;
};

struct EmptyDataset : Error {
    using Error::Error;
};

// ---- segmentation ----

struct SpanTooShort : Error {
    using Error::Error;
};

struct ZeroHop : Error {
    using Error::Error;
};

// ---- features ----

struct NegativeEnergy : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct KindMismatch : Error {
    using Error::Error;
};

struct TooFewTrials : Error {
    using Error::Error;
};

// ---- evaluation ----

struct ClassTooSmall : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct EmptyMatrix : Error {
    using Error::Error;
};

// ---- synthetic generation ----

struct BadBand : Error {
    using Error::Error;
};

// ---- configuration ----

// Invalid or unknown experiment configuration field; message names the field.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace eegclf
