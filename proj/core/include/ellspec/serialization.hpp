#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ellspec/invariant_ops.hpp"
#include "ellspec/kernel_ops.hpp"

namespace ellspec {

// Symbol binary layout (all integers and floats little-endian):
//
//   char[8]   magic "ELLSYM\0\1"
//   u32       length of model id, followed by that many ASCII bytes
//   u64       level_cap
//   u64 x level_cap   block dimensions d_l
//   for each block l: d_l * d_l complex entries, row-major, each entry
//             stored as two f64 (real, imaginary)
//
// Kernel files use the same header with magic "ELLKER\0\1", followed by
//
//   u64       number of stored blocks B
//   B times:  u64 row level, u64 column level, then d_row * d_col complex
//             entries row-major
//
// JSON alternatives (for small cases):
//   {"format":"ellspec-symbol","version":1,"model":"t1","dims":[1,2],
//    "blocks":[[[re,im],...], ...]}
//   {"format":"ellspec-kernel","version":1,"model":"t1","dims":[1,2],
//    "blocks":[{"row":0,"col":1,"entries":[[re,im],...]}, ...]}

void write_symbol_binary(const MatrixSymbol& sym, std::ostream& out);
MatrixSymbol read_symbol_binary(std::istream& in);
std::string symbol_to_json(const MatrixSymbol& sym);
MatrixSymbol symbol_from_json(std::string_view text);

void write_kernel_binary(const KernelRep& ker, std::ostream& out);
KernelRep read_kernel_binary(std::istream& in);
std::string kernel_to_json(const KernelRep& ker);
KernelRep kernel_from_json(std::string_view text);

/// Format chosen by extension: ".json" writes JSON, anything else binary.
void save_symbol(const MatrixSymbol& sym, const std::filesystem::path& path);
/// Format detected from the file contents.
MatrixSymbol load_symbol(const std::filesystem::path& path);
void save_kernel(const KernelRep& ker, const std::filesystem::path& path);
KernelRep load_kernel(const std::filesystem::path& path);

}  // namespace ellspec
