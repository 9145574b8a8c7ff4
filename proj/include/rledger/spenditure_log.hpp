#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rledger/errors.hpp"
#include "rledger/types.hpp"

namespace rledger {

/// Epoch length and dispute window, both in blocks.
struct EpochConfig {
    std::uint64_t delta = 1000;
    std::uint64_t dispute_window = 24000;

    std::uint64_t epoch_of(BlockNumber b) const { return b / delta; }

    void validate() const {
        if (delta == 0) throw ConfigError("epoch length must be positive");
        if (dispute_window == 0) throw ConfigError("dispute window must be positive");
    }

    friend bool operator==(const EpochConfig&, const EpochConfig&) = default;
};

/// One outgoing transfer or reversible burn. `to` is empty for burns.
/// `amount` shrinks when a freeze passes obligation along this record and
/// grows back if that claim is rejected; `original_amount` never changes.
struct Spenditure {
    std::optional<Address> to;
    TokenAmount amount;
    TokenAmount original_amount;
    BlockNumber block = 0;
    Seq seq = 0;

    bool is_burn() const { return !to.has_value(); }
    friend bool operator==(const Spenditure&, const Spenditure&) = default;
};

/// (epoch, from, index) locator into the log.
struct SpenditureRef {
    std::uint64_t epoch = 0;
    Address from;
    std::uint64_t index = 0;

    friend auto operator<=>(const SpenditureRef&, const SpenditureRef&) = default;
    friend bool operator==(const SpenditureRef&, const SpenditureRef&) = default;

    std::string to_string() const {
        std::ostringstream os;
        os << epoch << '/' << from.id << '/' << index;
        return os.str();
    }
};

struct BucketCleanResult {
    enum class Status { Cleaned, Skipped, Empty };

    std::uint64_t epoch = 0;
    Address sender;
    Status status = Status::Empty;
    std::size_t removed = 0;
    TokenAmount matured;  // R -> NR movement caused by this bucket
    std::string reason;

    friend bool operator==(const BucketCleanResult&, const BucketCleanResult&) = default;
};

inline const char* to_string(BucketCleanResult::Status s) {
    switch (s) {
        case BucketCleanResult::Status::Cleaned: return "cleaned";
        case BucketCleanResult::Status::Skipped: return "skipped";
        case BucketCleanResult::Status::Empty: return "empty";
    }
    return "?";
}

struct CleanReport {
    std::vector<BucketCleanResult> buckets;

    TokenAmount total_matured() const {
        TokenAmount t;
        for (const auto& b : buckets) t += b.matured;
        return t;
    }
    std::size_t total_removed() const {
        std::size_t n = 0;
        for (const auto& b : buckets) n += b.removed;
        return n;
    }
};

/// Epoch-bucketed append-only record of outgoing spends, keyed by
/// (epoch, sender). Indices inside a bucket are absolute and survive clean:
/// a cleaned bucket keeps its base offset so later refs never collide with
/// dangling ones.
class SpenditureLog {
public:
    using Entry = std::pair<SpenditureRef, const Spenditure*>;

    SpenditureLog() = default;
    explicit SpenditureLog(EpochConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    const EpochConfig& config() const { return cfg_; }

    /// Sequence number the next record will receive.
    Seq next_seq() const { return next_seq_; }
    BlockNumber last_block() const { return last_block_; }

    SpenditureRef record(const Address& from, std::optional<Address> to, TokenAmount amount, BlockNumber block) {
        if (block < last_block_)
            throw BlockRegressionError("record at block " + std::to_string(block) + " precedes block " +
                                       std::to_string(last_block_));
        const std::uint64_t epoch = cfg_.epoch_of(block);
        Bucket& bucket = buckets_[{epoch, from}];
        const std::uint64_t index = bucket.base + bucket.live.size();
        bucket.live.push_back(Spenditure{std::move(to), amount, amount, block, next_seq_});
        by_sender_[from].push_back(IndexEntry{next_seq_, epoch, index});
        ++next_seq_;
        last_block_ = block;
        return SpenditureRef{epoch, from, index};
    }

    const Spenditure* find(const SpenditureRef& ref) const {
        auto it = buckets_.find({ref.epoch, ref.from});
        if (it == buckets_.end()) return nullptr;
        const Bucket& b = it->second;
        if (ref.index < b.base || ref.index - b.base >= b.live.size()) return nullptr;
        return &b.live[ref.index - b.base];
    }

    const Spenditure& resolve(const SpenditureRef& ref) const {
        const Spenditure* s = find(ref);
        if (!s) throw UnknownSpenditureError("no live spenditure at " + ref.to_string());
        return *s;
    }

    /// Reduces the remaining amount of a record (double-freeze prevention).
    void debit(const SpenditureRef& ref, TokenAmount amount) {
        mutable_find(ref).amount -= amount;
    }

    /// Restores a previously debited amount. Returns false when the record
    /// has since been cleaned.
    bool credit_back(const SpenditureRef& ref, TokenAmount amount) {
        const Spenditure* s = find(ref);
        if (!s) return false;
        Spenditure& m = mutable_find(ref);
        TokenAmount restored = m.amount + amount;
        if (restored > m.original_amount) throw OverflowError("restored amount exceeds original for " + ref.to_string());
        m.amount = restored;
        return true;
    }

    /// Visits records of `sender` with after < seq < before, most recent first.
    /// Cost is O(log n + k) for k visited records.
    template <typename F>
    void for_each_outgoing_desc(const Address& sender, Seq after, Seq before, F&& visit) const {
        auto it = by_sender_.find(sender);
        if (it == by_sender_.end() || before == 0) return;
        const auto& idx = it->second;
        auto end = std::lower_bound(idx.begin(), idx.end(), before,
                                    [](const IndexEntry& e, Seq s) { return e.seq < s; });
        for (auto rit = std::make_reverse_iterator(end); rit != idx.rend() && rit->seq > after; ++rit) {
            SpenditureRef ref{rit->epoch, sender, rit->index};
            const Spenditure* s = find(ref);
            if (s) visit(ref, *s);
        }
    }

    std::vector<std::pair<SpenditureRef, Spenditure>> outgoing_between(const Address& sender, Seq after,
                                                                       Seq before) const {
        std::vector<std::pair<SpenditureRef, Spenditure>> out;
        if (after >= before) return out;
        for_each_outgoing_desc(sender, after, before,
                               [&](const SpenditureRef& r, const Spenditure& s) { out.emplace_back(r, s); });
        return out;
    }

    /// Removes the bucket (epoch, sender) if every record in it is past the
    /// dispute window at `current`. Returns the removed records; the caller
    /// owns the balance side effects.
    std::vector<Spenditure> sweep(std::uint64_t epoch, const Address& sender, BlockNumber current,
                                  BucketCleanResult& result) {
        result = BucketCleanResult{};
        result.epoch = epoch;
        result.sender = sender;
        auto it = buckets_.find({epoch, sender});
        if (it == buckets_.end() || it->second.live.empty()) {
            result.status = BucketCleanResult::Status::Empty;
            result.reason = "no live records";
            return {};
        }
        Bucket& b = it->second;
        for (const auto& s : b.live) {
            if (current < s.block || current - s.block <= cfg_.dispute_window) {
                result.status = BucketCleanResult::Status::Skipped;
                result.reason = "record at block " + std::to_string(s.block) + " still inside dispute window";
                return {};
            }
        }
        std::vector<Spenditure> removed = std::move(b.live);
        b.live.clear();
        b.base += removed.size();

        auto& idx = by_sender_[sender];
        auto first = std::lower_bound(idx.begin(), idx.end(), removed.front().seq,
                                      [](const IndexEntry& e, Seq s) { return e.seq < s; });
        auto last = std::upper_bound(first, idx.end(), removed.back().seq,
                                     [](Seq s, const IndexEntry& e) { return s < e.seq; });
        idx.erase(first, last);
        if (idx.empty()) by_sender_.erase(sender);

        result.status = BucketCleanResult::Status::Cleaned;
        result.removed = removed.size();
        return removed;
    }

    std::size_t live_records() const {
        std::size_t n = 0;
        for (const auto& [k, b] : buckets_) n += b.live.size();
        return n;
    }

    /// Every live record in (epoch, sender, index) order.
    template <typename F>
    void for_each(F&& visit) const {
        for (const auto& [key, b] : buckets_)
            for (std::size_t i = 0; i < b.live.size(); ++i)
                visit(SpenditureRef{key.first, key.second, b.base + i}, b.live[i]);
    }

    friend bool operator==(const SpenditureLog&, const SpenditureLog&) = default;

private:
    struct Bucket {
        std::uint64_t base = 0;
        std::vector<Spenditure> live;
        friend bool operator==(const Bucket&, const Bucket&) = default;
    };
    struct IndexEntry {
        Seq seq;
        std::uint64_t epoch;
        std::uint64_t index;
        friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
    };

    Spenditure& mutable_find(const SpenditureRef& ref) {
        const Spenditure* s = find(ref);
        if (!s) throw UnknownSpenditureError("no live spenditure at " + ref.to_string());
        return const_cast<Spenditure&>(*s);
    }

    EpochConfig cfg_{};
    std::map<std::pair<std::uint64_t, Address>, Bucket> buckets_;
    std::unordered_map<Address, std::vector<IndexEntry>> by_sender_;
    Seq next_seq_ = 0;
    BlockNumber last_block_ = 0;
};

}  // namespace rledger
