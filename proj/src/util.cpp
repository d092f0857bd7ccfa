#include <fstream>
#include <iterator>
#include <sstream>

#include "recobert/error.hpp"
#include "recobert/io.hpp"

namespace recobert {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::DegenerateSplit: return "DegenerateSplit";
    case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorKind::EmptySide: return "EmptySide";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptySpan: return "EmptySpan";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::VersionUnsupported: return "VersionUnsupported";
    case ErrorKind::VocabMismatch: return "VocabMismatch";
    case ErrorKind::CorruptTensor: return "CorruptTensor";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::PositionOutOfRange: return "PositionOutOfRange";
    case ErrorKind::CatalogTooSmall: return "CatalogTooSmall";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::UnknownSeed: return "UnknownSeed";
    case ErrorKind::EmptyCandidates: return "EmptyCandidates";
    case ErrorKind::MissingRanking: return "MissingRanking";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

std::uint64_t hash_file(const std::filesystem::path& path) { return fnv1a64(read_file(path)); }

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace recobert
