#include "arena/report.hpp"

#include "arena/error.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>

namespace arena {

namespace {

using nlohmann::json;

Phase phase_from(const std::string& name) {
    if (name == "regional") return Phase::regional;
    if (name == "global") return Phase::global;
    if (name == "playoffs") return Phase::playoffs;
    if (name == "final") return Phase::final_game;
    if (name == "sample") return Phase::sample;
    throw InvalidArgument("unknown phase name '" + name + "' in trace");
}

} // namespace

json game_json(const GameResult& result) {
    json players = json::array();
    for (const PlayerOutcome& p : result.players) {
        players.push_back({{"linear", p.linear_index},
                           {"fraction", p.work_fraction},
                           {"score", p.execution_score},
                           {"rank", p.rank},
                           {"failed", p.failed}});
    }
    return json{{"type", "game"},
                {"uid", result.uid},
                {"phase", phase_name(result.phase)},
                {"round", result.round},
                {"unit", result.unit},
                {"seq", result.seq},
                {"players", std::move(players)},
                {"winner", result.winner_index},
                {"early", result.terminated_early},
                {"elapsed", result.elapsed},
                {"cost", result.cost}};
}

GameResult game_from_json(const json& record) {
    GameResult result;
    result.uid = record.at("uid").get<std::uint64_t>();
    result.phase = phase_from(record.at("phase").get<std::string>());
    result.round = record.at("round").get<int>();
    result.unit = record.at("unit").get<std::uint64_t>();
    result.seq = record.at("seq").get<std::uint32_t>();
    for (const json& p : record.at("players")) {
        PlayerOutcome out;
        out.linear_index = p.at("linear").get<std::uint64_t>();
        out.work_fraction = p.at("fraction").get<double>();
        out.execution_score = p.at("score").get<double>();
        out.rank = p.at("rank").get<int>();
        out.failed = p.at("failed").get<bool>();
        result.players.push_back(std::move(out));
    }
    result.winner_index = record.at("winner").get<std::uint64_t>();
    result.terminated_early = record.at("early").get<bool>();
    result.elapsed = record.at("elapsed").get<double>();
    result.cost = record.at("cost").get<double>();
    return result;
}

json bracket_json(const BracketSnapshot& snapshot) {
    return json{{"type", "bracket"},
                {"round", snapshot.round},
                {"main", snapshot.main},
                {"losers", snapshot.losers},
                {"eliminated", snapshot.eliminated},
                {"advanced", snapshot.advanced}};
}

json regional_json(const RegionalSummary& summary) {
    return json{{"type", "regional"},
                {"region", summary.region},
                {"members", summary.members},
                {"played", summary.played},
                {"rounds", summary.rounds},
                {"termination", summary.termination},
                {"winners", summary.winners}};
}

json ledger_json(const CostLedger& ledger) {
    return json{{"total", ledger.total},
                {"regional", ledger.regional},
                {"global", ledger.global},
                {"playoffs", ledger.playoffs},
                {"final", ledger.final_game},
                {"sample", ledger.sample},
                {"games", ledger.games},
                {"early_termination_savings", ledger.early_termination_savings}};
}

json summary_json(const TournamentReport& report) {
    json out{{"type", "summary"},
             {"winner", report.winner_linear},
             {"winner_indices", report.winner.indices},
             {"regional_winners", report.regional_winners},
             {"playoff_entrants", report.playoff_entrants},
             {"finalists", report.finalists},
             {"ledger", ledger_json(report.ledger)},
             {"flags", report.flags}};
    return out;
}

void write_trace(std::ostream& out, const TournamentReport& report) {
    for (const GameResult& g : report.games) out << game_json(g).dump() << '\n';
    for (const BracketSnapshot& b : report.brackets) out << bracket_json(b).dump() << '\n';
    for (const RegionalSummary& r : report.regional) out << regional_json(r).dump() << '\n';
    out << summary_json(report).dump() << '\n';
}

std::vector<json> read_trace(std::istream& in) {
    std::vector<json> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(json::parse(line));
    }
    return records;
}

std::vector<GameResult> games_from_trace(const std::vector<json>& records) {
    std::vector<GameResult> games;
    for (const json& record : records)
        if (record.value("type", "") == "game") games.push_back(game_from_json(record));
    return games;
}

CostLedger ledger_from_games(const std::vector<GameResult>& games) {
    CostLedger ledger;
    for (const GameResult& g : games) ledger.add(g);
    return ledger;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += '"';
    return quoted;
}

std::string csv_number(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

} // namespace arena
