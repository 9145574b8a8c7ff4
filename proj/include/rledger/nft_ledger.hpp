#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "rledger/errors.hpp"
#include "rledger/spenditure_log.hpp"
#include "rledger/types.hpp"

namespace rledger {

struct OwnerRecord {
    Address owner;
    BlockNumber block = 0;
    friend bool operator==(const OwnerRecord&, const OwnerRecord&) = default;
};

/// Ownership history of one token. Queue positions are absolute: `head` is
/// the position of the oldest retained record, so positions handed out
/// before a clean stay valid afterwards.
struct NftToken {
    TokenId id;
    std::deque<OwnerRecord> owners;
    std::uint64_t head = 0;
    bool frozen = false;

    const Address& current_owner() const { return owners.back().owner; }
    std::uint64_t end() const { return head + owners.size(); }

    const OwnerRecord* at(std::uint64_t index) const {
        if (index < head || index >= end()) return nullptr;
        return &owners[index - head];
    }

    friend bool operator==(const NftToken&, const NftToken&) = default;
};

struct NftCleanResult {
    enum class Status { Cleaned, SkippedFrozen, Unknown };
    TokenId token;
    Status status = Status::Unknown;
    std::size_t removed = 0;
};

inline const char* to_string(NftCleanResult::Status s) {
    switch (s) {
        case NftCleanResult::Status::Cleaned: return "cleaned";
        case NftCleanResult::Status::SkippedFrozen: return "skipped-frozen";
        case NftCleanResult::Status::Unknown: return "unknown";
    }
    return "?";
}

struct NftCleanReport {
    std::vector<NftCleanResult> tokens;
};

class NftLedger {
public:
    explicit NftLedger(Address governance, EpochConfig cfg = {}) : governance_(std::move(governance)), cfg_(cfg) {
        cfg_.validate();
    }

    const Address& governance() const { return governance_; }
    const EpochConfig& config() const { return cfg_; }
    BlockNumber current_block() const { return block_; }

    void mint(const TokenId& id, const Address& to, BlockNumber block) {
        check_block(block);
        if (tokens_.contains(id)) throw DuplicateTokenError("token " + id.hex() + " already exists");
        block_ = block;
        NftToken t;
        t.id = id;
        t.owners.push_back({to, block});
        tokens_.emplace(id, std::move(t));
    }

    void transfer(const TokenId& id, const Address& from, const Address& to, BlockNumber block) {
        NftToken& t = mutable_token(id);
        check_block(block);
        if (t.frozen) throw FrozenAssetError("token " + id.hex() + " is frozen");
        if (t.current_owner() != from)
            throw NotOwnerError(from.id + " does not own token " + id.hex() + " (owner " + t.current_owner().id + ")");
        block_ = block;
        t.owners.push_back({to, block});
    }

    /// Freezes the token over the transfer into queue position index+1.
    /// Returns false, changing nothing, when that transfer is outside the
    /// dispute window, the positions are not retained, or the token is
    /// already frozen.
    bool freeze(const Address& caller, const TokenId& id, std::uint64_t index, BlockNumber current) {
        require_governance(caller);
        NftToken& t = mutable_token(id);
        check_block(current);
        if (!can_freeze(id, index, current)) return false;
        block_ = current;
        t.frozen = true;
        return true;
    }

    /// Whether freeze(id, index, current) would succeed. Unknown tokens are not freezable.
    bool can_freeze(const TokenId& id, std::uint64_t index, BlockNumber current) const {
        auto it = tokens_.find(id);
        if (it == tokens_.end()) return false;
        const NftToken& t = it->second;
        if (t.frozen) return false;
        const OwnerRecord* before = t.at(index);
        const OwnerRecord* disputed = index == UINT64_MAX ? nullptr : t.at(index + 1);
        if (!before || !disputed) return false;
        return current >= disputed->block && current - disputed->block <= cfg_.dispute_window;
    }

    /// Returns the token to the owner at `index` (the owner before the
    /// disputed transfer) by appending a new record, and unfreezes it.
    void reverse(const Address& caller, const TokenId& id, std::uint64_t index, BlockNumber current) {
        require_governance(caller);
        NftToken& t = mutable_token(id);
        check_block(current);
        if (!t.frozen) throw NotFrozenError("token " + id.hex() + " is not frozen");
        const OwnerRecord* target = t.at(index);
        if (!target) throw InvalidIndexError("position " + std::to_string(index) + " of token " + id.hex() +
                                             " is not retained");
        block_ = current;
        Address owner = target->owner;
        t.owners.push_back({std::move(owner), current});
        t.frozen = false;
    }

    void reject_reverse(const Address& caller, const TokenId& id, BlockNumber current) {
        require_governance(caller);
        NftToken& t = mutable_token(id);
        check_block(current);
        if (!t.frozen) throw NotFrozenError("token " + id.hex() + " is not frozen");
        block_ = current;
        t.frozen = false;
    }

    /// Drops history that can no longer be disputed: a record is kept while
    /// the transfer that replaced it is inside the window, and the current
    /// owner is always kept. Frozen tokens are skipped.
    NftCleanReport clean(const std::vector<TokenId>& ids, BlockNumber current) {
        check_block(current);
        block_ = current;
        NftCleanReport report;
        for (const auto& id : ids) {
            NftCleanResult r;
            r.token = id;
            auto it = tokens_.find(id);
            if (it == tokens_.end()) {
                r.status = NftCleanResult::Status::Unknown;
            } else if (it->second.frozen) {
                r.status = NftCleanResult::Status::SkippedFrozen;
            } else {
                NftToken& t = it->second;
                while (t.owners.size() > 1 && current - t.owners[1].block > cfg_.dispute_window) {
                    t.owners.pop_front();
                    ++t.head;
                    ++r.removed;
                }
                r.status = NftCleanResult::Status::Cleaned;
            }
            report.tokens.push_back(r);
        }
        return report;
    }

    const NftToken& token(const TokenId& id) const {
        auto it = tokens_.find(id);
        if (it == tokens_.end()) throw UnknownTokenError("token " + id.hex());
        return it->second;
    }
    bool contains(const TokenId& id) const { return tokens_.contains(id); }
    const std::map<TokenId, NftToken>& tokens() const { return tokens_; }

    friend bool operator==(const NftLedger&, const NftLedger&) = default;

private:
    void require_governance(const Address& caller) const {
        if (caller != governance_) throw NotGovernanceError(caller.id + " is not the governance address");
    }
    void check_block(BlockNumber b) const {
        if (b < block_)
            throw BlockRegressionError("block " + std::to_string(b) + " is before current block " +
                                       std::to_string(block_));
    }
    NftToken& mutable_token(const TokenId& id) {
        auto it = tokens_.find(id);
        if (it == tokens_.end()) throw UnknownTokenError("token " + id.hex());
        return it->second;
    }

    Address governance_;
    EpochConfig cfg_;
    std::map<TokenId, NftToken> tokens_;
    BlockNumber block_ = 0;
};

}  // namespace rledger
