#include "vocablab/error.hpp"

namespace vocablab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return "input";
    case ErrorKind::kConfig: return "configuration";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kDecode: return "decode";
    case ErrorKind::kCollision: return "collision";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kQuota: return "quota";
    case ErrorKind::kComparability: return "comparability";
  }
  return "unknown";
}

}  // namespace vocablab
