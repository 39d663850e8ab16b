#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace morse_atlas {

enum class ErrorCode {
  DisconnectedGraph,
  UnknownVertex,
  InvalidInput,
  WordProblemUnavailable,
  NotConfluent,
  BallTooLarge,
  InvalidSpanningTree,
  NotConnected,
  OverlappingSets,
  MalformedBall,
  NotInBall,
  NotGeodesic,
  NoSplitAtScale,
  BadBasepoint,
  ScaleMismatch,
  NotRelHypStar,
  HypothesisViolated,
  BadMap,
  WrongCase,
  ScaleExceeded,
  UnclassifiedCombination,
  InternalTableError,
  RefusesEstimate,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::WordProblemUnavailable: return "WordProblemUnavailable";
    case ErrorCode::NotConfluent: return "NotConfluent";
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::InvalidSpanningTree: return "InvalidSpanningTree";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::OverlappingSets: return "OverlappingSets";
    case ErrorCode::MalformedBall: return "MalformedBall";
    case ErrorCode::NotInBall: return "NotInBall";
    case ErrorCode::NotGeodesic: return "NotGeodesic";
    case ErrorCode::NoSplitAtScale: return "NoSplitAtScale";
    case ErrorCode::BadBasepoint: return "BadBasepoint";
    case ErrorCode::ScaleMismatch: return "ScaleMismatch";
    case ErrorCode::NotRelHypStar: return "NotRelHypStar";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::BadMap: return "BadMap";
    case ErrorCode::WrongCase: return "WrongCase";
    case ErrorCode::ScaleExceeded: return "ScaleExceeded";
    case ErrorCode::UnclassifiedCombination: return "UnclassifiedCombination";
    case ErrorCode::InternalTableError: return "InternalTableError";
    case ErrorCode::RefusesEstimate: return "RefusesEstimate";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `detail` carries a small integer
/// payload where one is meaningful (the violated assumption number for
/// HypothesisViolated).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int detail = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  int detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  int detail_;
};

}  // namespace morse_atlas
