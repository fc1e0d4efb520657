#include "ellspec/serialization.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace ellspec {

namespace {

using json = nlohmann::json;

constexpr std::array<char, 8> kSymbolMagic = {'E', 'L', 'L', 'S', 'Y', 'M', '\0', '\1'};
constexpr std::array<char, 8> kKernelMagic = {'E', 'L', 'L', 'K', 'E', 'R', '\0', '\1'};
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 24;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw Error("truncated binary file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_header(std::ostream& out, const std::array<char, 8>& magic, const std::string& model,
                const std::vector<std::size_t>& dims) {
  out.write(magic.data(), magic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.size()));
  out.write(model.data(), static_cast<std::streamsize>(model.size()));
  put_le<std::uint64_t>(out, dims.size());
  for (auto d : dims) put_le<std::uint64_t>(out, d);
}

std::pair<std::string, std::vector<std::size_t>> get_header(std::istream& in,
                                                            const std::array<char, 8>& magic) {
  std::array<char, 8> got{};
  if (!in.read(got.data(), got.size()) || got != magic) throw Error("bad file magic");
  const auto len = get_le<std::uint32_t>(in);
  if (len > 256) throw Error("model id too long");
  std::string model(len, '\0');
  if (!in.read(model.data(), len)) throw Error("truncated binary file");
  const auto cap = get_le<std::uint64_t>(in);
  if (cap == 0 || cap > kMaxDim) throw Error("implausible level count");
  std::vector<std::size_t> dims;
  for (std::uint64_t l = 0; l < cap; ++l) {
    const auto d = get_le<std::uint64_t>(in);
    if (d == 0 || d > kMaxDim) throw Error("implausible block dimension");
    dims.push_back(static_cast<std::size_t>(d));
  }
  return {model, dims};
}

void put_entries(std::ostream& out, const Block& b) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const Complex v = b.entry(i, j);
      put_le<double>(out, v.real());
      put_le<double>(out, v.imag());
    }
}

CMatrix get_entries(std::istream& in, std::size_t rows, std::size_t cols) {
  CMatrix m(rows, cols);
  for (auto& v : m.data()) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    v = {re, im};
  }
  return m;
}

json entries_json(const Block& b) {
  json arr = json::array();
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const Complex v = b.entry(i, j);
      arr.push_back({v.real(), v.imag()});
    }
  return arr;
}

CMatrix entries_from_json(const json& arr, std::size_t rows, std::size_t cols) {
  if (!arr.is_array() || arr.size() != rows * cols) throw Error("JSON block has wrong entry count");
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    if (!e.is_array() || e.size() != 2) throw Error("JSON entries must be [re, im] pairs");
    m.data()[i] = {e[0].get<double>(), e[1].get<double>()};
  }
  return m;
}

std::vector<std::size_t> dims_from_json(const json& j) {
  auto dims = j.at("dims").get<std::vector<std::size_t>>();
  if (dims.empty()) throw Error("JSON: dims must be non-empty");
  for (auto d : dims)
    if (d == 0 || d > kMaxDim) throw Error("JSON: implausible block dimension");
  return dims;
}

bool starts_with_magic(const std::filesystem::path& path, const std::array<char, 8>& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::array<char, 8> got{};
  in.read(got.data(), got.size());
  return in.gcount() == 8 && got == magic;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_symbol_binary(const MatrixSymbol& sym, std::ostream& out) {
  put_header(out, kSymbolMagic, sym.model_id(), sym.dims());
  for (const auto& b : sym.blocks()) put_entries(out, b);
}

MatrixSymbol read_symbol_binary(std::istream& in) {
  auto [model, dims] = get_header(in, kSymbolMagic);
  std::vector<Block> blocks;
  for (auto d : dims) blocks.emplace_back(get_entries(in, d, d));
  return {model, std::move(blocks)};
}

std::string symbol_to_json(const MatrixSymbol& sym) {
  json j;
  j["format"] = "ellspec-symbol";
  j["version"] = 1;
  j["model"] = sym.model_id();
  j["dims"] = sym.dims();
  j["blocks"] = json::array();
  for (const auto& b : sym.blocks()) j["blocks"].push_back(entries_json(b));
  return j.dump();
}

MatrixSymbol symbol_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format") != "ellspec-symbol") throw Error("JSON is not an ellspec symbol");
    const auto dims = dims_from_json(j);
    const auto& arr = j.at("blocks");
    if (!arr.is_array() || arr.size() != dims.size()) throw Error("JSON: block count mismatch");
    std::vector<Block> blocks;
    for (std::size_t l = 0; l < dims.size(); ++l)
      blocks.emplace_back(entries_from_json(arr[l], dims[l], dims[l]));
    return {j.at("model").get<std::string>(), std::move(blocks)};
  } catch (const json::exception& e) {
    throw Error(std::string("symbol JSON: ") + e.what());
  }
}

void write_kernel_binary(const KernelRep& ker, std::ostream& out) {
  put_header(out, kKernelMagic, ker.model_id(), ker.dims());
  put_le<std::uint64_t>(out, ker.blocks().size());
  for (const auto& [lp, blk] : ker.blocks()) {
    put_le<std::uint64_t>(out, lp.first);
    put_le<std::uint64_t>(out, lp.second);
    put_entries(out, blk);
  }
}

KernelRep read_kernel_binary(std::istream& in) {
  auto [model, dims] = get_header(in, kKernelMagic);
  KernelRep ker(model, dims);
  const auto count = get_le<std::uint64_t>(in);
  if (count > dims.size() * dims.size()) throw Error("implausible kernel block count");
  for (std::uint64_t b = 0; b < count; ++b) {
    const auto row = get_le<std::uint64_t>(in);
    const auto col = get_le<std::uint64_t>(in);
    if (row >= dims.size() || col >= dims.size()) throw Error("kernel block level out of range");
    ker.set_block(row, col, Block(get_entries(in, dims[row], dims[col])));
  }
  return ker;
}

std::string kernel_to_json(const KernelRep& ker) {
  json j;
  j["format"] = "ellspec-kernel";
  j["version"] = 1;
  j["model"] = ker.model_id();
  j["dims"] = ker.dims();
  j["blocks"] = json::array();
  for (const auto& [lp, blk] : ker.blocks())
    j["blocks"].push_back({{"row", lp.first}, {"col", lp.second}, {"entries", entries_json(blk)}});
  return j.dump();
}

KernelRep kernel_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format") != "ellspec-kernel") throw Error("JSON is not an ellspec kernel");
    const auto dims = dims_from_json(j);
    KernelRep ker(j.at("model").get<std::string>(), dims);
    for (const auto& b : j.at("blocks")) {
      const auto row = b.at("row").get<std::size_t>();
      const auto col = b.at("col").get<std::size_t>();
      if (row >= dims.size() || col >= dims.size())
        throw Error("kernel block level out of range");
      ker.set_block(row, col, Block(entries_from_json(b.at("entries"), dims[row], dims[col])));
    }
    return ker;
  } catch (const json::exception& e) {
    throw Error(std::string("kernel JSON: ") + e.what());
  }
}

void save_symbol(const MatrixSymbol& sym, const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << symbol_to_json(sym) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_symbol_binary(sym, out);
}

MatrixSymbol load_symbol(const std::filesystem::path& path) {
  if (starts_with_magic(path, kSymbolMagic)) {
    std::ifstream in(path, std::ios::binary);
    return read_symbol_binary(in);
  }
  return symbol_from_json(slurp(path));
}

void save_kernel(const KernelRep& ker, const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << kernel_to_json(ker) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_kernel_binary(ker, out);
}

KernelRep load_kernel(const std::filesystem::path& path) {
  if (starts_with_magic(path, kKernelMagic)) {
    std::ifstream in(path, std::ios::binary);
    return read_kernel_binary(in);
  }
  return kernel_from_json(slurp(path));
}

}  // namespace ellspec
