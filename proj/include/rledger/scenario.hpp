#pragma once

// Scenario files: UTF-8, one operation per line,
//
//     op [kind] key=value key=value ...   # comment
//
// A token that starts with '#' starts a comment. `expect` takes a kind as its
// second token. Every operation accepts `expectError=<ErrorKind>`.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rledger/errors.hpp"
#include "rledger/types.hpp"

namespace rledger::scenario {

enum class ParamType {
    Amount,
    Uint,
    Address,  // bare identifier
    Hash,     // 0x-hex or decimal
    Text,
    Bool,
    Real,
    AddressList,
    HashList,
    Source,  // nr | r
    Vote,    // approve | reject
    Judge,   // #k (quorum position) or an address
    Status,  // frozen | reversed | rejected
    Phase,
    TipPolicy,  // prevailing | burn
    Steps,      // amount:n,amount:n
};

struct Param {
    std::string value;
    int column = 0;
};

struct ScenarioOp {
    int line = 0;
    std::string op;
    std::string kind;  // expect only
    std::map<std::string, Param> params;

    bool has(const std::string& key) const { return params.contains(key); }
    const std::string& raw(const std::string& key) const { return params.at(key).value; }

    /// Source text of the op, normalized (sorted keys).
    std::string text() const {
        std::string s = op;
        if (!kind.empty()) s += " " + kind;
        for (const auto& [k, v] : params) s += " " + k + "=" + v.value;
        return s;
    }
};

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.' || c == ':' || c == '@';
        if (!ok) return false;
    }
    return true;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    if (s.empty()) return std::nullopt;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_real(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::string copy(s);
    std::istringstream is(copy);
    is.imbue(std::locale::classic());
    double v;
    if (!(is >> v) || !is.eof()) return std::nullopt;
    return v;
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? s.size() : comma;
        out.emplace_back(s.substr(start, end - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline bool valid_value(ParamType t, std::string_view v) {
    switch (t) {
        case ParamType::Amount: return TokenAmount::parse(v).has_value();
        case ParamType::Uint: return parse_uint(v).has_value();
        case ParamType::Address: return is_identifier(v);
        case ParamType::Hash: return Hash256::parse(v).has_value();
        case ParamType::Text: return !v.empty();
        case ParamType::Bool: return v == "true" || v == "false";
        case ParamType::Real: return parse_real(v).has_value();
        case ParamType::AddressList:
            for (const auto& item : split_list(v))
                if (!is_identifier(item)) return false;
            return true;
        case ParamType::HashList:
            for (const auto& item : split_list(v))
                if (!Hash256::parse(item)) return false;
            return true;
        case ParamType::Source: return v == "nr" || v == "r";
        case ParamType::Vote: return v == "approve" || v == "reject";
        case ParamType::Judge: return (v.size() > 1 && v[0] == '#' && parse_uint(v.substr(1))) || is_identifier(v);
        case ParamType::Status: return v == "frozen" || v == "reversed" || v == "rejected";
        case ParamType::Phase:
            return v == "freeze-vote" || v == "trial" || v == "closed-dismissed" || v == "closed-reversed" ||
                   v == "closed-rejected";
        case ParamType::TipPolicy: return v == "prevailing" || v == "burn";
        case ParamType::Steps:
            for (const auto& item : split_list(v)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) return false;
                if (!TokenAmount::parse(std::string_view(item).substr(0, colon))) return false;
                if (!parse_uint(std::string_view(item).substr(colon + 1))) return false;
            }
            return true;
    }
    return false;
}

struct OpSchema {
    std::vector<std::pair<std::string, ParamType>> params;
    std::vector<std::string> required;
    // Keys outside `params` are addresses whose values are amounts.
    bool address_amounts = false;
};

inline const std::map<std::string, OpSchema>& schemas() {
    using P = ParamType;
    static const std::map<std::string, OpSchema> table = {
        {"config",
         {{{"delta", P::Uint},          {"window", P::Uint},        {"governance", P::Address},
           {"judgeFee", P::Amount},     {"minStake", P::Amount},    {"n", P::Uint},
           {"freezeThreshold", P::Uint}, {"trialThreshold", P::Uint}, {"revealDeadline", P::Uint},
           {"tipPolicy", P::TipPolicy}, {"strikeLimit", P::Uint},   {"minorityRatio", P::Real},
           {"minVotes", P::Uint},       {"minorityShare", P::Real}, {"quorumSteps", P::Steps}},
          {}}},
        {"judge", {{{"id", P::Address}}, {"id"}}},
        {"judges", {{{"prefix", P::Address}, {"count", P::Uint}}, {"prefix", "count"}}},
        {"advanceBlock", {{{"to", P::Uint}, {"by", P::Uint}}, {}}},
        {"mint", {{{"to", P::Address}, {"amount", P::Amount}, {"block", P::Uint}}, {"to", "amount"}}},
        {"transfer",
         {{{"from", P::Address}, {"to", P::Address}, {"amount", P::Amount}, {"block", P::Uint}, {"as", P::Address}},
          {"from", "to", "amount"}}},
        {"rtransfer",
         {{{"from", P::Address}, {"to", P::Address}, {"amount", P::Amount}, {"block", P::Uint}, {"as", P::Address}},
          {"from", "to", "amount"}}},
        {"burn",
         {{{"from", P::Address}, {"amount", P::Amount}, {"source", P::Source}, {"block", P::Uint}, {"as", P::Address}},
          {"from", "amount"}}},
        {"clean", {{{"epoch", P::Uint}, {"senders", P::AddressList}, {"block", P::Uint}}, {"epoch", "senders"}}},
        {"freeze",
         {{{"ref", P::Address}, {"victim", P::Address}, {"caller", P::Address}, {"block", P::Uint}, {"as", P::Address}},
          {"ref"}}},
        {"reverse", {{{"claim", P::Address}, {"caller", P::Address}, {"block", P::Uint}}, {"claim"}}},
        {"rejectReverse", {{{"claim", P::Address}, {"caller", P::Address}, {"block", P::Uint}}, {"claim"}}},
        {"nftMint", {{{"token", P::Hash}, {"to", P::Address}, {"block", P::Uint}}, {"token", "to"}}},
        {"nftTransfer",
         {{{"token", P::Hash}, {"from", P::Address}, {"to", P::Address}, {"block", P::Uint}}, {"token", "from", "to"}}},
        {"nftClean", {{{"tokens", P::HashList}, {"block", P::Uint}}, {"tokens"}}},
        {"nftFreeze",
         {{{"token", P::Hash}, {"index", P::Uint}, {"caller", P::Address}, {"block", P::Uint}, {"result", P::Bool}},
          {"token", "index"}}},
        {"nftReverse",
         {{{"token", P::Hash}, {"index", P::Uint}, {"caller", P::Address}, {"block", P::Uint}}, {"token", "index"}}},
        {"nftRejectReverse", {{{"token", P::Hash}, {"caller", P::Address}, {"block", P::Uint}}, {"token"}}},
        {"submitFreeze",
         {{{"claimant", P::Address},
           {"ref", P::Address},
           {"token", P::Hash},
           {"index", P::Uint},
           {"stake", P::Amount},
           {"tip", P::Amount},
           {"seed", P::Hash},
           {"evidence", P::Text},
           {"block", P::Uint},
           {"as", P::Address}},
          {"claimant", "stake", "seed"}}},
        {"commit",
         {{{"case", P::Address}, {"judge", P::Judge}, {"vote", P::Vote}, {"salt", P::Hash}, {"hash", P::Hash}},
          {"case", "judge"}}},
        {"reveal",
         {{{"case", P::Address}, {"judge", P::Judge}, {"vote", P::Vote}, {"salt", P::Hash}},
          {"case", "judge", "vote", "salt"}}},
        {"tally", {{{"case", P::Address}, {"block", P::Uint}}, {"case"}}},
        {"discipline", {{}, {}}},

        {"expect.balance",
         {{{"addr", P::Address}, {"r", P::Amount}, {"nr", P::Amount}, {"frozen", P::Amount}, {"available", P::Amount}},
          {"addr"}}},
        {"expect.supply", {{{"value", P::Amount}}, {"value"}}},
        {"expect.conservation", {{}, {}}},
        {"expect.frozenFloor", {{}, {}}},
        {"expect.toFreeze", {{{"claim", P::Address}}, {"claim"}, true}},
        {"expect.claimTotal", {{{"claim", P::Address}, {"value", P::Amount}}, {"claim", "value"}}},
        {"expect.claimStatus", {{{"claim", P::Address}, {"status", P::Status}}, {"claim", "status"}}},
        {"expect.obligation",
         {{{"claim", P::Address}, {"addr", P::Address}, {"value", P::Amount}}, {"claim", "addr", "value"}}},
        {"expect.edge",
         {{{"claim", P::Address}, {"from", P::Address}, {"to", P::Address}, {"value", P::Amount}, {"ob", P::Amount}},
          {"claim", "from", "to"}}},
        {"expect.edgeCount", {{{"claim", P::Address}, {"value", P::Uint}}, {"claim", "value"}}},
        {"expect.absorbed", {{{"claim", P::Address}, {"value", P::Amount}}, {"claim", "value"}}},
        {"expect.unplaced", {{{"claim", P::Address}, {"value", P::Amount}}, {"claim", "value"}}},
        {"expect.spenditure", {{{"ref", P::Address}, {"amount", P::Amount}, {"exists", P::Bool}}, {"ref"}}},
        {"expect.phase", {{{"case", P::Address}, {"phase", P::Phase}}, {"case", "phase"}}},
        {"expect.escrow",
         {{{"case", P::Address},
           {"fees", P::Amount},
           {"burned", P::Amount},
           {"returned", P::Amount},
           {"defendant", P::Amount},
           {"held", P::Amount}},
          {"case"}}},
        {"expect.quorum", {{{"case", P::Address}, {"size", P::Uint}}, {"case", "size"}}},
        {"expect.owner", {{{"token", P::Hash}, {"addr", P::Address}}, {"token", "addr"}}},
        {"expect.tokenFrozen", {{{"token", P::Hash}, {"value", P::Bool}}, {"token", "value"}}},
        {"expect.owners", {{{"token", P::Hash}, {"count", P::Uint}, {"head", P::Uint}}, {"token"}}},
        {"expect.inPool", {{{"judge", P::Address}, {"value", P::Bool}}, {"judge", "value"}}},
        {"expect.strikes", {{{"judge", P::Address}, {"value", P::Uint}}, {"judge", "value"}}},
    };
    return table;
}

// Constraints between parameters that the per-key schema cannot express.
inline const char* combination_error(const ScenarioOp& op) {
    if (op.op == "advanceBlock" && op.has("to") == op.has("by")) return "needs exactly one of 'to' or 'by'";
    if (op.op == "commit" && op.has("hash") == (op.has("vote") || op.has("salt")))
        return "needs either 'hash' or 'vote' with 'salt'";
    if (op.op == "commit" && op.has("vote") != op.has("salt")) return "'vote' and 'salt' go together";
    if (op.op == "submitFreeze") {
        const bool nft = op.has("token") || op.has("index");
        if (op.has("ref") == nft) return "needs either 'ref' or 'token' with 'index'";
        if (nft && !(op.has("token") && op.has("index"))) return "'token' and 'index' go together";
    }
    return nullptr;
}

inline ParseError parse_error(const std::string& source, int line, int column, const std::string& what) {
    return ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
}

/// Parses scenario text. Throws ParseError carrying source:line:column.
inline std::vector<ScenarioOp> parse_scenario_text(std::string_view text, const std::string& source = "<input>") {
    std::vector<ScenarioOp> ops;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        // (token, column)
        std::vector<std::pair<std::string_view, int>> tokens;
        for (std::size_t i = 0; i < line.size();) {
            if (line[i] == ' ' || line[i] == '\t') {
                ++i;
                continue;
            }
            if (line[i] == '#') break;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
            tokens.emplace_back(line.substr(i, j - i), static_cast<int>(i) + 1);
            i = j;
        }
        if (tokens.empty()) continue;

        ScenarioOp op;
        op.line = line_no;
        op.op = std::string(tokens[0].first);
        std::size_t first_param = 1;
        std::string schema_key = op.op;
        if (op.op == "expect") {
            if (tokens.size() < 2 || tokens[1].first.find('=') != std::string_view::npos)
                throw parse_error(source, line_no, tokens[0].second + 6, "expect needs a kind");
            op.kind = std::string(tokens[1].first);
            schema_key = "expect." + op.kind;
            first_param = 2;
        }
        auto sit = schemas().find(schema_key);
        if (sit == schemas().end())
            throw parse_error(source, line_no, tokens[first_param - 1].second,
                              "unknown " + std::string(op.op == "expect" ? "expectation" : "operation") + " '" +
                                  (op.op == "expect" ? op.kind : op.op) + "'");
        const OpSchema& schema = sit->second;

        for (std::size_t t = first_param; t < tokens.size(); ++t) {
            auto [tok, col] = tokens[t];
            const std::size_t eq = tok.find('=');
            if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.size())
                throw parse_error(source, line_no, col, "expected key=value, got '" + std::string(tok) + "'");
            std::string key(tok.substr(0, eq));
            std::string value(tok.substr(eq + 1));
            const int value_col = col + static_cast<int>(eq) + 1;

            std::optional<ParamType> type;
            if (key == "expectError") type = ParamType::Address;
            for (const auto& [k, ty] : schema.params)
                if (k == key) type = ty;
            if (!type && schema.address_amounts && is_identifier(key)) type = ParamType::Amount;
            if (!type) throw parse_error(source, line_no, col, "unknown parameter '" + key + "' for " + schema_key);
            if (!valid_value(*type, value))
                throw parse_error(source, line_no, value_col, "malformed value '" + value + "' for " + key);
            if (op.params.contains(key)) throw parse_error(source, line_no, col, "duplicate parameter '" + key + "'");
            op.params.emplace(std::move(key), Param{std::move(value), col});
        }
        for (const auto& req : schema.required)
            if (!op.params.contains(req))
                throw parse_error(source, line_no, tokens[0].second, schema_key + " requires '" + req + "'");
        if (const char* problem = combination_error(op))
            throw parse_error(source, line_no, tokens[0].second, op.op + ": " + problem);
        ops.push_back(std::move(op));
    }
    return ops;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<ScenarioOp> parse_scenario(const std::string& path) {
    return parse_scenario_text(read_file(path), path);
}

}  // namespace rledger::scenario
