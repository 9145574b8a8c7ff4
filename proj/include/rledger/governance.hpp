#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rledger/errors.hpp"
#include "rledger/freeze_engine.hpp"
#include "rledger/nft_ledger.hpp"
#include "rledger/sha256.hpp"
#include "rledger/types.hpp"

namespace rledger {

using CaseId = std::uint64_t;

enum class CaseKind { Fungible, Nft };
enum class CasePhase { FreezeVote, Trial, ClosedDismissed, ClosedReversed, ClosedRejected };
enum class Vote : std::uint8_t { Reject = 0, Approve = 1 };
enum class TipPolicy { PrevailingParty, Burn };

inline const char* to_string(CasePhase p) {
    switch (p) {
        case CasePhase::FreezeVote: return "freeze-vote";
        case CasePhase::Trial: return "trial";
        case CasePhase::ClosedDismissed: return "closed-dismissed";
        case CasePhase::ClosedReversed: return "closed-reversed";
        case CasePhase::ClosedRejected: return "closed-rejected";
    }
    return "?";
}

inline bool is_closed(CasePhase p) { return p != CasePhase::FreezeVote && p != CasePhase::Trial; }

struct NftTarget {
    TokenId token;
    std::uint64_t index = 0;  // owner position before the disputed transfer
    friend bool operator==(const NftTarget&, const NftTarget&) = default;
};

using CaseTarget = std::variant<SpenditureRef, NftTarget>;

struct FeePolicy {
    TokenAmount judge_fee{1};
    TokenAmount min_stake{24};
    std::size_t quorum_size = 12;
    /// Disputed-amount step function: the largest threshold not above the
    /// disputed amount selects the quorum size. Empty means fixed size.
    std::vector<std::pair<TokenAmount, std::size_t>> quorum_steps;
    std::optional<std::size_t> freeze_threshold;  // default ceil(2n/3)
    std::optional<std::size_t> trial_threshold;   // default ceil(2n/3)
    BlockNumber reveal_deadline = 100;
    TipPolicy tip_policy = TipPolicy::PrevailingParty;

    std::size_t quorum_for(TokenAmount disputed) const {
        std::size_t n = quorum_size;
        TokenAmount best{};
        bool found = false;
        for (const auto& [threshold, size] : quorum_steps) {
            if (threshold <= disputed && (!found || threshold >= best)) {
                best = threshold;
                n = size;
                found = true;
            }
        }
        return n;
    }

    std::size_t max_quorum() const {
        std::size_t n = quorum_size;
        for (const auto& step : quorum_steps) n = std::max(n, step.second);
        return n;
    }

    static std::size_t two_thirds(std::size_t n) { return (2 * n + 2) / 3; }

    std::size_t freeze_votes_needed(std::size_t n) const { return freeze_threshold.value_or(two_thirds(n)); }
    std::size_t trial_votes_needed(std::size_t n) const { return trial_threshold.value_or(two_thirds(n)); }

    /// The stake must cover a full fee round in both phases.
    void validate() const {
        if (quorum_size == 0) throw ConfigError("quorum size must be positive");
        for (const auto& step : quorum_steps)
            if (step.second == 0) throw ConfigError("quorum step size must be positive");
        if (min_stake < judge_fee * (2 * max_quorum()))
            throw ConfigError("min stake " + min_stake.to_string() + " cannot pay two fee rounds of " +
                              std::to_string(max_quorum()) + " judges at " + judge_fee.to_string());
    }
};

struct DisciplinePolicy {
    std::uint32_t strike_limit = 3;
    double minority_ratio = 0.8;
    std::uint32_t min_votes = 10;
    /// A revealed vote is in the extreme minority when its side holds at
    /// most this share of the revealed votes.
    double extreme_minority_share = 0.25;
};

struct JudgeRecord {
    std::uint32_t strikes = 0;
    std::uint32_t votes = 0;
    std::uint32_t minority_votes = 0;
    friend bool operator==(const JudgeRecord&, const JudgeRecord&) = default;
};

struct Ballot {
    std::optional<Hash256> commitment;
    std::optional<Vote> vote;
    friend bool operator==(const Ballot&, const Ballot&) = default;
};

/// Where the claimant's escrow went. `deposited` always equals the sum of
/// the other fields plus what is still held.
struct EscrowBook {
    TokenAmount deposited;
    TokenAmount judge_fees;
    TokenAmount burned;
    TokenAmount returned_to_claimant;
    TokenAmount paid_to_defendant;

    TokenAmount disbursed() const { return judge_fees + burned + returned_to_claimant + paid_to_defendant; }
    TokenAmount held() const { return deposited - disbursed(); }
    friend bool operator==(const EscrowBook&, const EscrowBook&) = default;
};

struct PhaseOutcome {
    CaseId case_id = 0;
    CasePhase from = CasePhase::FreezeVote;
    CasePhase to = CasePhase::FreezeVote;
    std::size_t approvals = 0;
    std::size_t rejections = 0;
    std::size_t abstentions = 0;
    std::size_t needed = 0;
    std::vector<Address> paid;
    std::vector<Address> struck;
    std::optional<ClaimId> claim;
    std::string note;
    friend bool operator==(const PhaseOutcome&, const PhaseOutcome&) = default;
};

struct Case {
    CaseId id = 0;
    CaseKind kind = CaseKind::Fungible;
    CaseTarget target;
    Address claimant;
    Address defendant;
    TokenAmount disputed_value;
    TokenAmount stake;
    TokenAmount tip;
    std::string evidence;
    Hash256 beacon_seed;
    CasePhase phase = CasePhase::FreezeVote;
    BlockNumber phase_started = 0;
    std::vector<Address> quorum;
    std::map<Address, Ballot> ballots;
    std::optional<ClaimId> claim;
    EscrowBook escrow;
    std::vector<PhaseOutcome> history;
    friend bool operator==(const Case&, const Case&) = default;
};

/// Commitment a judge posts before revealing: SHA-256 over the vote byte
/// (0 reject, 1 approve), the 32-byte salt, and the case id as 8 big-endian
/// bytes.
inline Hash256 vote_commitment(Vote vote, const Hash256& salt, CaseId case_id) {
    return Sha256{}.update_byte(static_cast<std::uint8_t>(vote)).update(salt).update_u64(case_id).finish();
}

/// Deterministic sample of `n` distinct judges: a partial Fisher-Yates
/// shuffle of the sorted pool driven by SHA-256(seed, case id, step).
inline std::vector<Address> sample_quorum(const std::set<Address>& pool, const Hash256& seed, CaseId case_id,
                                          std::size_t n) {
    if (pool.size() < n)
        throw PoolTooSmallError("pool has " + std::to_string(pool.size()) + " judges, quorum needs " +
                                std::to_string(n));
    std::vector<Address> judges(pool.begin(), pool.end());
    for (std::size_t i = 0; i < n; ++i) {
        const Hash256 h = Sha256{}.update("rledger.quorum").update(seed).update_u64(case_id).update_u64(i).finish();
        const std::size_t j = i + static_cast<std::size_t>(leading_u64(h) % (judges.size() - i));
        std::swap(judges[i], judges[j]);
    }
    judges.resize(n);
    return judges;
}

/// Arbitration state machine. Holds the escrow in its own address on the
/// fungible ledger and is the only caller the freeze engine and the NFT
/// ledger accept.
class Governance {
public:
    Governance(FreezeEngine& token, NftLedger& nfts, FeePolicy fees = {}, DisciplinePolicy discipline = {})
        : token_(token), nfts_(nfts), fees_(std::move(fees)), discipline_(discipline) {
        fees_.validate();
        if (token_.governance() != nfts_.governance())
            throw ConfigError("token and NFT ledgers must trust the same governance address");
    }

    const Address& address() const { return token_.governance(); }
    const FeePolicy& fees() const { return fees_; }
    const DisciplinePolicy& discipline() const { return discipline_; }

    void add_judge(const Address& judge) {
        pool_.insert(judge);
        records_.try_emplace(judge);
    }
    const std::set<Address>& pool() const { return pool_; }
    const std::map<Address, JudgeRecord>& judge_records() const { return records_; }

    CaseId submit_freeze_request(const Address& claimant, const CaseTarget& target, TokenAmount stake, TokenAmount tip,
                                 std::string evidence, const Hash256& beacon_seed, BlockNumber current) {
        if (stake < fees_.min_stake)
            throw InsufficientStakeError("stake " + stake.to_string() + " below minimum " +
                                         fees_.min_stake.to_string());
        Case c;
        c.id = next_case_;
        c.target = target;
        c.claimant = claimant;
        c.stake = stake;
        c.tip = tip;
        c.evidence = std::move(evidence);
        c.beacon_seed = beacon_seed;
        c.phase_started = current;

        if (const auto* ref = std::get_if<SpenditureRef>(&target)) {
            const Spenditure& s = token_.ledger().log().resolve(*ref);
            if (s.is_burn()) throw UnknownSpenditureError("disputed record " + ref->to_string() + " is a burn");
            if (ref->from != claimant)
                throw NotAffectedPartyError(claimant.id + " did not send " + ref->to_string());
            c.kind = CaseKind::Fungible;
            c.defendant = *s.to;
            c.disputed_value = s.amount;
        } else {
            const auto& nft = std::get<NftTarget>(target);
            const NftToken& t = nfts_.token(nft.token);
            const OwnerRecord* before = t.at(nft.index);
            const OwnerRecord* after = nft.index == UINT64_MAX ? nullptr : t.at(nft.index + 1);
            if (!before || !after)
                throw InvalidIndexError("token " + nft.token.hex() + " has no transfer out of position " +
                                        std::to_string(nft.index));
            if (before->owner != claimant)
                throw NotAffectedPartyError(claimant.id + " was not the owner at position " +
                                            std::to_string(nft.index));
            c.kind = CaseKind::Nft;
            c.defendant = after->owner;
            c.disputed_value = TokenAmount{1};
        }

        c.quorum = sample_quorum(pool_, beacon_seed, c.id, fees_.quorum_for(c.disputed_value));
        for (const auto& j : c.quorum) c.ballots.emplace(j, Ballot{});

        const TokenAmount deposit = stake + tip;
        token_.ledger().check_block(current);
        token_.ledger().move_nonreversible(claimant, address(), deposit);
        token_.ledger().block_ = current;
        c.escrow.deposited = deposit;

        ++next_case_;
        const CaseId id = c.id;
        cases_.emplace(id, std::move(c));
        return id;
    }

    std::vector<Address> select_quorum(CaseId case_id, const Hash256& beacon_seed) const {
        const Case& c = get(case_id);
        return sample_quorum(pool_, beacon_seed, case_id, fees_.quorum_for(c.disputed_value));
    }

    void commit(CaseId case_id, const Address& judge, const Hash256& commitment) {
        Case& c = open_case(case_id);
        Ballot& b = ballot(c, judge);
        if (b.commitment) throw DoubleVoteError(judge.id + " already committed on case " + std::to_string(case_id));
        b.commitment = commitment;
    }

    void reveal(CaseId case_id, const Address& judge, Vote vote, const Hash256& salt) {
        Case& c = open_case(case_id);
        Ballot& b = ballot(c, judge);
        if (!b.commitment) throw PhaseError(judge.id + " has no commitment on case " + std::to_string(case_id));
        if (b.vote) throw DoubleVoteError(judge.id + " already revealed on case " + std::to_string(case_id));
        if (vote_commitment(vote, salt, case_id) != *b.commitment)
            throw CommitMismatchError(judge.id + " reveal does not match commitment on case " +
                                      std::to_string(case_id));
        b.vote = vote;
    }

    /// Closes the current voting round. Every judge with a valid reveal is
    /// paid the same fee whatever they voted; the rest get a strike.
    PhaseOutcome tally(CaseId case_id, BlockNumber current) {
        Case& c = open_case(case_id);
        std::size_t approvals = 0, rejections = 0;
        for (const auto& j : c.quorum) {
            const Ballot& b = c.ballots.at(j);
            if (b.vote) (*b.vote == Vote::Approve ? approvals : rejections) += 1;
        }
        const std::size_t revealed = approvals + rejections;
        if (revealed < c.quorum.size() && current < c.phase_started + fees_.reveal_deadline)
            throw PhaseError("case " + std::to_string(case_id) + " has " + std::to_string(revealed) + "/" +
                             std::to_string(c.quorum.size()) + " reveals before its deadline");
        token_.ledger().check_block(current);

        PhaseOutcome out;
        out.case_id = c.id;
        out.from = c.phase;
        out.approvals = approvals;
        out.rejections = rejections;
        out.abstentions = c.quorum.size() - revealed;
        const bool freeze_round = c.phase == CasePhase::FreezeVote;
        out.needed = freeze_round ? fees_.freeze_votes_needed(c.quorum.size())
                                  : fees_.trial_votes_needed(c.quorum.size());
        const bool approved = approvals >= out.needed;

        // Ledger side effects first; each is atomic on its own.
        if (freeze_round && approved) {
            try {
                if (c.kind == CaseKind::Fungible) {
                    c.claim = token_.execute_freeze(address(), std::get<SpenditureRef>(c.target), c.claimant,
                                                    current);
                    out.claim = c.claim;
                } else {
                    const auto& nft = std::get<NftTarget>(c.target);
                    if (!nfts_.freeze(address(), nft.token, nft.index, current))
                        throw WindowElapsedError("token " + nft.token.hex() + " could not be frozen");
                }
                out.to = CasePhase::Trial;
            } catch (const WindowElapsedError& e) {
                out.to = CasePhase::ClosedDismissed;
                out.note = std::string("freeze refused: ") + e.what();
            }
        } else if (freeze_round) {
            out.to = CasePhase::ClosedDismissed;
        } else if (approved) {
            if (c.kind == CaseKind::Fungible) token_.reverse(address(), *c.claim, current);
            else {
                const auto& nft = std::get<NftTarget>(c.target);
                nfts_.reverse(address(), nft.token, nft.index, current);
            }
            out.to = CasePhase::ClosedReversed;
        } else {
            if (c.kind == CaseKind::Fungible) token_.reject_reverse(address(), *c.claim, current);
            else nfts_.reject_reverse(address(), std::get<NftTarget>(c.target).token, current);
            out.to = CasePhase::ClosedRejected;
        }

        Ledger& ledger = token_.ledger();
        ledger.block_ = current;
        for (const auto& j : c.quorum) {
            const Ballot& b = c.ballots.at(j);
            JudgeRecord& rec = records_[j];
            if (!b.vote) {
                ++rec.strikes;
                out.struck.push_back(j);
                continue;
            }
            ledger.move_nonreversible(address(), j, fees_.judge_fee);
            c.escrow.judge_fees += fees_.judge_fee;
            out.paid.push_back(j);
            ++rec.votes;
            const std::size_t side = *b.vote == Vote::Approve ? approvals : rejections;
            const std::size_t other = revealed - side;
            if (side < other && static_cast<double>(side) <= discipline_.extreme_minority_share * revealed)
                ++rec.minority_votes;
        }

        const TokenAmount stake_left = c.escrow.held() - c.tip;
        switch (out.to) {
            case CasePhase::Trial:
                c.ballots.clear();
                for (const auto& j : c.quorum) c.ballots.emplace(j, Ballot{});
                c.phase_started = current;
                break;
            case CasePhase::ClosedDismissed:
                if (out.note.empty()) {
                    burn_from_escrow(c, stake_left, current);
                    settle_tip(c, /*claimant_prevailed=*/false, current);
                } else {
                    // Judges approved but the freeze could not be executed.
                    pay(c.claimant, stake_left + c.tip, c.escrow.returned_to_claimant);
                }
                break;
            case CasePhase::ClosedReversed:
                pay(c.claimant, stake_left, c.escrow.returned_to_claimant);
                settle_tip(c, true, current);
                break;
            case CasePhase::ClosedRejected:
                pay(c.defendant, stake_left, c.escrow.paid_to_defendant);
                settle_tip(c, false, current);
                break;
            case CasePhase::FreezeVote:
                break;
        }
        c.phase = out.to;
        c.history.push_back(out);
        return out;
    }

    /// Removes judges that missed too many reveals or that sit in the
    /// extreme minority too often.
    std::vector<Address> discipline_judges() {
        std::vector<Address> removed;
        for (const auto& j : pool_) {
            const JudgeRecord& r = records_[j];
            const bool absent = r.strikes >= discipline_.strike_limit;
            const bool outlier = r.votes >= discipline_.min_votes &&
                                 static_cast<double>(r.minority_votes) >=
                                     discipline_.minority_ratio * static_cast<double>(r.votes);
            if (absent || outlier) removed.push_back(j);
        }
        for (const auto& j : removed) pool_.erase(j);
        return removed;
    }

    const Case& get(CaseId id) const {
        auto it = cases_.find(id);
        if (it == cases_.end()) throw UnknownCaseError("case " + std::to_string(id));
        return it->second;
    }
    const std::map<CaseId, Case>& cases() const { return cases_; }

    /// Escrow currently held for open cases.
    TokenAmount escrow_held() const {
        TokenAmount t;
        for (const auto& [id, c] : cases_) t += c.escrow.held();
        return t;
    }

private:
    Case& open_case(CaseId id) {
        auto it = cases_.find(id);
        if (it == cases_.end()) throw UnknownCaseError("case " + std::to_string(id));
        if (is_closed(it->second.phase))
            throw PhaseError("case " + std::to_string(id) + " is " + to_string(it->second.phase));
        return it->second;
    }

    static Ballot& ballot(Case& c, const Address& judge) {
        auto it = c.ballots.find(judge);
        if (it == c.ballots.end())
            throw NotQuorumMemberError(judge.id + " is not on the quorum of case " + std::to_string(c.id));
        return it->second;
    }

    void pay(const Address& to, TokenAmount amount, TokenAmount& bucket) {
        token_.ledger().move_nonreversible(address(), to, amount);
        bucket += amount;
    }

    void burn_from_escrow(Case& c, TokenAmount amount, BlockNumber current) {
        token_.ledger().burn(address(), amount, current, BurnSource::NonReversible);
        c.escrow.burned += amount;
    }

    void settle_tip(Case& c, bool claimant_prevailed, BlockNumber current) {
        if (c.tip.is_zero()) return;
        if (fees_.tip_policy == TipPolicy::Burn) {
            burn_from_escrow(c, c.tip, current);
        } else if (claimant_prevailed) {
            pay(c.claimant, c.tip, c.escrow.returned_to_claimant);
        } else {
            pay(c.defendant, c.tip, c.escrow.paid_to_defendant);
        }
    }

    FreezeEngine& token_;
    NftLedger& nfts_;
    FeePolicy fees_;
    DisciplinePolicy discipline_;
    std::set<Address> pool_;
    std::map<Address, JudgeRecord> records_;
    std::map<CaseId, Case> cases_;
    CaseId next_case_ = 1;
};

}  // namespace rledger
