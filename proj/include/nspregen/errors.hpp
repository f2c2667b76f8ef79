#pragma once

#include <stdexcept>
#include <string>

namespace nspregen {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define NSPREGEN_DEFINE_ERROR(Name)            \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

// geometry
NSPREGEN_DEFINE_ERROR(PlacementExhausted);
NSPREGEN_DEFINE_ERROR(AllSolid);
NSPREGEN_DEFINE_ERROR(OutOfRange);
NSPREGEN_DEFINE_ERROR(InvalidArgument);

// physics
NSPREGEN_DEFINE_ERROR(UnbandedRe);
NSPREGEN_DEFINE_ERROR(OutOfDomain);

// solver
NSPREGEN_DEFINE_ERROR(DisconnectedDomain);
NSPREGEN_DEFINE_ERROR(PressureDiverged);
NSPREGEN_DEFINE_ERROR(IncompatibleRhs);
NSPREGEN_DEFINE_ERROR(SimulationDiverged);

// trajio
NSPREGEN_DEFINE_ERROR(InvalidShape);
NSPREGEN_DEFINE_ERROR(IoError);
NSPREGEN_DEFINE_ERROR(BadMagic);
NSPREGEN_DEFINE_ERROR(VersionMismatch);
NSPREGEN_DEFINE_ERROR(CorruptPayload);

// cost / planner
NSPREGEN_DEFINE_ERROR(MissingTier);
NSPREGEN_DEFINE_ERROR(InfeasibleSeed);
NSPREGEN_DEFINE_ERROR(SchemaError);

// evaluator
NSPREGEN_DEFINE_ERROR(ShapeMismatch);
NSPREGEN_DEFINE_ERROR(UnpairedTrajectory);
NSPREGEN_DEFINE_ERROR(ZeroDenominator);

// cli
NSPREGEN_DEFINE_ERROR(ConfigError);

#undef NSPREGEN_DEFINE_ERROR

}  // namespace nspregen
