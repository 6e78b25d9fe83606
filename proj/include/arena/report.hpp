#pragma once

#include "arena/engine.hpp"
#include "arena/tournament.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace arena {

/// JSON encodings used by the trace. The trace is the source of truth:
/// every table the front end emits can be rebuilt from it alone.
nlohmann::json game_json(const GameResult& result);
GameResult game_from_json(const nlohmann::json& record);
nlohmann::json bracket_json(const BracketSnapshot& snapshot);
nlohmann::json regional_json(const RegionalSummary& summary);
nlohmann::json ledger_json(const CostLedger& ledger);

/// Summary record for a finished tournament (also the last trace line).
nlohmann::json summary_json(const TournamentReport& report);

/// Writes the line-delimited trace: one record per game (in deterministic
/// order), then bracket snapshots, regional summaries, and the summary.
void write_trace(std::ostream& out, const TournamentReport& report);

/// Reads every record of a line-delimited trace.
std::vector<nlohmann::json> read_trace(std::istream& in);

/// Games extracted from trace records, in file order.
std::vector<GameResult> games_from_trace(const std::vector<nlohmann::json>& records);

/// Recomputes a cost ledger from trace game records; must reproduce the
/// summary's ledger exactly (reconstructibility contract).
CostLedger ledger_from_games(const std::vector<GameResult>& games);

/// Minimal CSV quoting: wraps fields containing commas/quotes/newlines.
std::string csv_escape(const std::string& field);

/// Compact, locale-independent float formatting for CSV cells (shortest
/// representation that round-trips, same as the JSON encoder).
std::string csv_number(double value);

} // namespace arena
