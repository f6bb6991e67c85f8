#include "ksne/error.hpp"

namespace ksne {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::parse: return "parse";
    case ErrorKind::format: return "format";
    case ErrorKind::validation: return "validation";
    case ErrorKind::featurization: return "featurization";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace ksne
