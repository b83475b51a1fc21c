#pragma once

#include <stdexcept>
#include <string>

namespace awareplan {

// Base of every error this library throws. The concrete type identifies the
// failure kind; the message carries the offending identifiers.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// scene_graph
struct SchemaError : Error { using Error::Error; };
struct HierarchyError : Error { using Error::Error; };
struct MissingRobot : Error { using Error::Error; };
struct UnknownAgent : Error { using Error::Error; };
struct EmptySequence : Error { using Error::Error; };

// knowledge_base
struct UndeclaredPredicate : Error { using Error::Error; };
struct TypeCycle : Error { using Error::Error; };
struct UnknownDomain : Error { using Error::Error; };
struct EmptySource : Error { using Error::Error; };
struct ExtractionInvalid : Error { using Error::Error; };

// llm_gateway
struct TransportError : Error { using Error::Error; };
struct SchemaViolation : Error { using Error::Error; };
struct ReplayMiss : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };

// predictor
struct DegenerateWeights : Error { using Error::Error; };
struct UncoveredGoalWithoutSynthesis : Error { using Error::Error; };
struct SynthesisInvalid : Error { using Error::Error; };
struct PredictionError : Error { using Error::Error; };

// grounding
struct DuplicateObject : Error { using Error::Error; };
struct UnknownRoom : Error { using Error::Error; };
struct UndeclaredStatePredicate : Error { using Error::Error; };
struct IllTypedGoal : Error { using Error::Error; };
struct UnknownAffordance : Error { using Error::Error; };

// pddl text form
struct LexError : Error { using Error::Error; };
struct ParseError : Error {
  ParseError(const std::string& what, int line_, int column_)
      : Error(what + " at " + std::to_string(line_) + ":" + std::to_string(column_)),
        line(line_),
        column(column_) {}
  int line = 0;
  int column = 0;
};
struct UnsupportedFeature : Error { using Error::Error; };

// planner
struct TypeMismatch : Error { using Error::Error; };
struct ExplosionGuard : Error { using Error::Error; };
struct Unsolvable : Error { using Error::Error; };
struct ResourceLimit : Error { using Error::Error; };
struct OracleCapExceeded : Error { using Error::Error; };
struct UnknownAction : Error { using Error::Error; };

// simulator
struct EmptyTrace : Error { using Error::Error; };

}  // namespace awareplan
