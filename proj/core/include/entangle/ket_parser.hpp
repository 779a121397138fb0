// ket_parser.hpp
// Text formats for pure states.
//
// Ket expression language (whitespace insignificant):
//   state   := ['dims:' int+ ';'] sum
//   sum     := ['+'|'-'] product (('+'|'-') product)*
//   product := atom (('*'|'/') atom)*      '*' of two kets is a tensor
//                                          product; '/' needs a scalar rhs
//   atom    := scalar | ket | '(' sum ')'
//   ket     := '|' digit+ '>'              one digit per party
//   scalar  := number | 'i' | 'sqrt' '(' sum ')'
//
// Without a dims header, each party's dimension is inferred as
// max(largest digit at that position + 1, 2).
//
// Amplitude table format: a "dims: d_1 d_2 ... d_n" header line, then one
// "i_1 i_2 ... i_n re im" line per nonzero amplitude. '#' starts a comment;
// unlisted amplitudes are zero; duplicate index tuples are an error.

#pragma once

#include <string>
#include <string_view>

#include "entangle/pure_state.hpp"

namespace entangle {

struct ParsedState {
    PureState state;
    // Euclidean norm of the raw amplitudes before normalization; callers that
    // forbid rescaling can compare it against 1.
    double input_norm = 1.0;
};

ParsedState parse_ket_expression(std::string_view text, const Limits& limits = {});

ParsedState parse_amplitude_table(std::string_view text, const Limits& limits = {});

// Emits the amplitude-table format, omitting entries with |amplitude| below
// threshold. parse_amplitude_table(serialize_state(s)) reproduces s.
std::string serialize_state(const PureState& state, double threshold = 1e-12);

}  // namespace entangle
