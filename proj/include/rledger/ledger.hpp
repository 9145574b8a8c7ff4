#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rledger/errors.hpp"
#include "rledger/spenditure_log.hpp"
#include "rledger/types.hpp"

namespace rledger {

class FreezeEngine;
class Governance;

struct AccountState {
    TokenAmount rbalance;
    TokenAmount nrbalance;
    TokenAmount frozen_total;

    TokenAmount available() const { return saturating_sub(rbalance, frozen_total); }
    TokenAmount total() const { return rbalance + nrbalance; }

    friend bool operator==(const AccountState&, const AccountState&) = default;
};

enum class BurnSource { NonReversible, Reversible };

/// Fungible account state with reversible (recently received) and
/// non-reversible (matured) balances. Every transfer and every reversible
/// burn is appended to the spenditure log.
///
/// Mutating operations validate fully before touching state, so a thrown
/// error leaves the ledger unchanged.
class Ledger {
public:
    explicit Ledger(EpochConfig cfg = {}) : log_(cfg) {}

    const EpochConfig& config() const { return log_.config(); }
    BlockNumber current_block() const { return block_; }

    void advance_to(BlockNumber b) {
        check_block(b);
        block_ = b;
    }

    void mint(const Address& to, TokenAmount amount, BlockNumber block) {
        check_block(block);
        const TokenAmount supply = supply_ + amount;
        const TokenAmount minted = minted_ + amount;
        const TokenAmount nr = account(to).nrbalance + amount;
        block_ = block;
        if (amount.is_zero()) return;
        accounts_[to].nrbalance = nr;
        supply_ = supply;
        minted_ = minted;
    }

    /// Spends from the sender's non-reversible balance; the recipient gets
    /// reversible funds.
    SpenditureRef transfer(const Address& from, const Address& to, TokenAmount amount, BlockNumber block) {
        check_block(block);
        const AccountState src = account(from);
        if (src.nrbalance < amount)
            throw InsufficientNonReversibleError(from.id + " has " + src.nrbalance.to_string() +
                                                 " non-reversible, needs " + amount.to_string());
        const TokenAmount credited = (from == to ? src.rbalance : account(to).rbalance) + amount;
        block_ = block;
        SpenditureRef ref = log_.record(from, to, amount, block);
        accounts_[from].nrbalance -= amount;
        accounts_[to].rbalance = credited;
        return ref;
    }

    /// Spends from the sender's reversible balance, never below its frozen total.
    SpenditureRef rtransfer(const Address& from, const Address& to, TokenAmount amount, BlockNumber block) {
        check_block(block);
        const AccountState src = account(from);
        check_reversible_spend(from, src, amount);
        const TokenAmount credited = from == to ? src.rbalance : account(to).rbalance + amount;
        block_ = block;
        SpenditureRef ref = log_.record(from, to, amount, block);
        if (from != to) {
            accounts_[from].rbalance -= amount;
            accounts_[to].rbalance = credited;
        }
        return ref;
    }

    /// Reversible burns are logged with a null recipient; non-reversible
    /// burns are not logged.
    std::optional<SpenditureRef> burn(const Address& from, TokenAmount amount, BlockNumber block, BurnSource source) {
        check_block(block);
        const AccountState src = account(from);
        std::optional<SpenditureRef> ref;
        if (source == BurnSource::NonReversible) {
            if (src.nrbalance < amount)
                throw InsufficientBalanceError(from.id + " has " + src.nrbalance.to_string() +
                                               " non-reversible, burn needs " + amount.to_string());
            block_ = block;
            accounts_[from].nrbalance -= amount;
        } else {
            if (src.rbalance < amount)
                throw InsufficientBalanceError(from.id + " has " + src.rbalance.to_string() +
                                               " reversible, burn needs " + amount.to_string());
            check_reversible_spend(from, src, amount);
            block_ = block;
            ref = log_.record(from, std::nullopt, amount, block);
            accounts_[from].rbalance -= amount;
        }
        supply_ -= amount;
        burned_ += amount;
        return ref;
    }

    TokenAmount available_rbalance(const Address& a) const { return account(a).available(); }

    AccountState account(const Address& a) const {
        auto it = accounts_.find(a);
        return it == accounts_.end() ? AccountState{} : it->second;
    }

    /// Deletes matured spenditure buckets (epoch, sender) and moves the
    /// corresponding amounts from each recipient's reversible balance to its
    /// non-reversible balance, never dropping the reversible balance below
    /// the recipient's frozen total.
    CleanReport clean(std::uint64_t epoch, const std::vector<Address>& senders, BlockNumber current) {
        check_block(current);
        block_ = current;
        CleanReport report;
        for (const auto& sender : senders) {
            BucketCleanResult result;
            std::vector<Spenditure> removed = log_.sweep(epoch, sender, current, result);
            for (const auto& s : removed) {
                if (!s.to) continue;
                auto it = accounts_.find(*s.to);
                if (it == accounts_.end()) continue;
                AccountState& acct = it->second;
                const TokenAmount moved = min(s.amount, acct.available());
                acct.rbalance -= moved;
                acct.nrbalance += moved;
                result.matured += moved;
            }
            report.buckets.push_back(std::move(result));
        }
        return report;
    }

    const SpenditureLog& log() const { return log_; }
    const std::map<Address, AccountState>& accounts() const { return accounts_; }

    TokenAmount total_supply() const { return supply_; }
    TokenAmount total_minted() const { return minted_; }
    TokenAmount total_burned() const { return burned_; }

    friend bool operator==(const Ledger&, const Ledger&) = default;

private:
    friend class FreezeEngine;
    friend class Governance;

    void check_block(BlockNumber b) const {
        if (b < block_)
            throw BlockRegressionError("block " + std::to_string(b) + " is before current block " +
                                       std::to_string(block_));
    }

    static void check_reversible_spend(const Address& who, const AccountState& src, TokenAmount amount) {
        if (src.rbalance < amount)
            throw InsufficientReversibleError(who.id + " has " + src.rbalance.to_string() + " reversible, needs " +
                                              amount.to_string());
        if (src.rbalance - amount < src.frozen_total)
            throw FrozenFloorError(who.id + " would drop to " + (src.rbalance - amount).to_string() +
                                   " reversible, below frozen " + src.frozen_total.to_string());
    }

    AccountState& mutable_account(const Address& a) { return accounts_[a]; }

    // Unlogged non-reversible move; used for governance escrow.
    void move_nonreversible(const Address& from, const Address& to, TokenAmount amount) {
        const AccountState src = account(from);
        if (src.nrbalance < amount)
            throw InsufficientNonReversibleError(from.id + " has " + src.nrbalance.to_string() +
                                                 " non-reversible, needs " + amount.to_string());
        if (from == to || amount.is_zero()) return;
        const TokenAmount credited = account(to).nrbalance + amount;
        accounts_[from].nrbalance -= amount;
        accounts_[to].nrbalance = credited;
    }

    SpenditureLog log_;
    std::map<Address, AccountState> accounts_;
    TokenAmount supply_;
    TokenAmount minted_;
    TokenAmount burned_;
    BlockNumber block_ = 0;
};

}  // namespace rledger
