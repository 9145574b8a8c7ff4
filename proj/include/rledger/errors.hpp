#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rledger {

/// Base of every engine error. `kind()` is the stable name used by scenario
/// files (`expectError=FrozenFloorError`) and in reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual std::string_view kind() const noexcept = 0;
};

#define RLEDGER_DEFINE_ERROR(Name)                                               \
    class Name : public Error {                                                  \
    public:                                                                      \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}     \
        std::string_view kind() const noexcept override { return #Name; }        \
    }

// arithmetic
RLEDGER_DEFINE_ERROR(OverflowError);
RLEDGER_DEFINE_ERROR(UnderflowError);
RLEDGER_DEFINE_ERROR(BlockRegressionError);
RLEDGER_DEFINE_ERROR(ConfigError);

// ledger
RLEDGER_DEFINE_ERROR(InsufficientNonReversibleError);
RLEDGER_DEFINE_ERROR(InsufficientReversibleError);
RLEDGER_DEFINE_ERROR(InsufficientBalanceError);
RLEDGER_DEFINE_ERROR(FrozenFloorError);
RLEDGER_DEFINE_ERROR(UnknownSpenditureError);

// freeze engine
RLEDGER_DEFINE_ERROR(WindowElapsedError);
RLEDGER_DEFINE_ERROR(NotGovernanceError);
RLEDGER_DEFINE_ERROR(ClaimNotFrozenError);
RLEDGER_DEFINE_ERROR(UnknownClaimError);

// nft
RLEDGER_DEFINE_ERROR(DuplicateTokenError);
RLEDGER_DEFINE_ERROR(UnknownTokenError);
RLEDGER_DEFINE_ERROR(FrozenAssetError);
RLEDGER_DEFINE_ERROR(NotFrozenError);
RLEDGER_DEFINE_ERROR(NotOwnerError);
RLEDGER_DEFINE_ERROR(InvalidIndexError);

// governance
RLEDGER_DEFINE_ERROR(InsufficientStakeError);
RLEDGER_DEFINE_ERROR(NotAffectedPartyError);
RLEDGER_DEFINE_ERROR(PoolTooSmallError);
RLEDGER_DEFINE_ERROR(NotQuorumMemberError);
RLEDGER_DEFINE_ERROR(CommitMismatchError);
RLEDGER_DEFINE_ERROR(DoubleVoteError);
RLEDGER_DEFINE_ERROR(PhaseError);
RLEDGER_DEFINE_ERROR(UnknownCaseError);

// scenario
RLEDGER_DEFINE_ERROR(ParseError);

#undef RLEDGER_DEFINE_ERROR

}  // namespace rledger
