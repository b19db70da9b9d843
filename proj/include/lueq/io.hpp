#pragma once

#include <string>

#include "lueq/equivalence.hpp"
#include "lueq/representation.hpp"

namespace lueq {

// I/O and parse failures, distinct from state-validation failures so the CLI
// can map them to different exit codes.
struct IoError : Error {
    using Error::Error;
};

// State files are UTF-8 JSON objects {"m", "n", "re", "im"} with row-major
// mn x mn real and imaginary parts. Flat index convention: i*n + j <-> |i>|j>.
struct StateFile {
    BipartiteDims dims;
    ComplexMatrix mat;
};

StateFile read_state_file(const std::string& path);
void write_state_file(const std::string& path, const BipartiteDims& dims,
                      const ComplexMatrix& mat);

// Certificate files: {"m", "n", "u": {re, im}, "v": {re, im}}.
void write_certificate_file(const std::string& path, const BipartiteDims& dims,
                            const LocalUnitary& lu);
LocalUnitary read_certificate_file(const std::string& path);

// Deterministic representation report; human-readable table or JSON.
std::string representation_report(const Representation& rep, const GaugeDescriptor& descriptor,
                                  bool as_json);

// Verdict summary; human-readable or JSON.
std::string verdict_report(const Verdict& verdict, bool as_json);

}  // namespace lueq
