#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergo/game.hpp"
#include "ergo/simulate.hpp"
#include "ergo/solver.hpp"

namespace ergo {

/// Raised when a game or strategy document does not match the file schema.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Game files
// ---------------------------------------------------------------------------
//
// {
//   "n_states": 2,
//   "actions_p1": [["a"], ["a", "b"]],
//   "actions_p2": [["x"], ["x"]],
//   "entries": [
//     {"s": 0, "a1": 0, "a2": 0, "reward": 1.5, "dist": [[0, 0.5], [1, 0.5]]},
//     ...
//   ]
// }
//
// Every (s, a1, a2) triple appears exactly once. Probabilities round-trip
// bit-exactly (shortest binary64 representation).

inline nlohmann::json game_to_json(const ConcurrentGame& game) {
  nlohmann::json j;
  j["n_states"] = game.n_states();
  auto labels = [&](int player) {
    nlohmann::json arr = nlohmann::json::array();
    for (int s = 0; s < game.n_states(); ++s) arr.push_back(game.action_labels(player, s));
    return arr;
  };
  j["actions_p1"] = labels(1);
  j["actions_p2"] = labels(2);
  nlohmann::json entries = nlohmann::json::array();
  for (int s = 0; s < game.n_states(); ++s) {
    for (int a1 = 0; a1 < game.n_actions(1, s); ++a1) {
      for (int a2 = 0; a2 < game.n_actions(2, s); ++a2) {
        nlohmann::json entry;
        entry["s"] = s;
        entry["a1"] = a1;
        entry["a2"] = a2;
        entry["reward"] = game.reward(s, a1, a2);
        nlohmann::json dist = nlohmann::json::array();
        for (const auto& e : game.successors(s, a1, a2)) {
          dist.push_back(nlohmann::json::array({e.state, e.prob}));
        }
        entry["dist"] = std::move(dist);
        entries.push_back(std::move(entry));
      }
    }
  }
  j["entries"] = std::move(entries);
  return j;
}

inline ConcurrentGame game_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n_states").get<int>();
    auto a1 = j.at("actions_p1").get<std::vector<std::vector<std::string>>>();
    auto a2 = j.at("actions_p2").get<std::vector<std::vector<std::string>>>();
    if (static_cast<int>(a1.size()) != n || static_cast<int>(a2.size()) != n) {
      throw FormatError("action tables do not match n_states");
    }
    ConcurrentGame game(std::move(a1), std::move(a2));
    for (const auto& entry : j.at("entries")) {
      const int s = entry.at("s").get<int>();
      const int ea1 = entry.at("a1").get<int>();
      const int ea2 = entry.at("a2").get<int>();
      if (s < 0 || s >= n) throw FormatError("entry state " + std::to_string(s) + " out of range");
      if (ea1 < 0 || ea1 >= game.n_actions(1, s) || ea2 < 0 || ea2 >= game.n_actions(2, s)) {
        throw FormatError("entry action out of range at state " + std::to_string(s));
      }
      if (game.has_entry(s, ea1, ea2)) {
        throw FormatError("duplicate entry for state " + std::to_string(s) + ", a1 " +
                          std::to_string(ea1) + ", a2 " + std::to_string(ea2));
      }
      std::vector<Successor> dist;
      for (const auto& pair : entry.at("dist")) {
        if (!pair.is_array() || pair.size() != 2) throw FormatError("dist entries must be [state, prob] pairs");
        dist.push_back({pair.at(0).get<int>(), pair.at(1).get<double>()});
      }
      game.set_entry(s, ea1, ea2, entry.at("reward").get<double>(), std::move(dist));
    }
    for (int s = 0; s < n; ++s) {
      for (int x = 0; x < game.n_actions(1, s); ++x) {
        for (int y = 0; y < game.n_actions(2, s); ++y) {
          if (!game.has_entry(s, x, y)) {
            throw FormatError("missing entry for state " + std::to_string(s) + ", a1 " +
                              std::to_string(x) + ", a2 " + std::to_string(y));
          }
        }
      }
    }
    return game;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed game document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Strategy files
// ---------------------------------------------------------------------------
//
// {"player": 1, "probs": [[1.0], [0.25, 0.75]], "actions": [["a"], ["a","b"]]}
//
// The action labels duplicate the game's, for auditability; when present
// they are checked against the game on load.

inline nlohmann::json strategy_to_json(const StationaryStrategy& strat,
                                       const ConcurrentGame& game) {
  nlohmann::json j;
  j["player"] = strat.player;
  j["probs"] = strat.probs;
  nlohmann::json labels = nlohmann::json::array();
  for (int s = 0; s < game.n_states(); ++s) labels.push_back(game.action_labels(strat.player, s));
  j["actions"] = std::move(labels);
  return j;
}

inline StationaryStrategy strategy_from_json(const nlohmann::json& j, const ConcurrentGame& game) {
  try {
    StationaryStrategy strat;
    strat.player = j.at("player").get<int>();
    if (strat.player != 1 && strat.player != 2) throw FormatError("player must be 1 or 2");
    strat.probs = j.at("probs").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(strat.probs.size()) != game.n_states()) {
      throw FormatError("strategy covers " + std::to_string(strat.probs.size()) +
                        " states, game has " + std::to_string(game.n_states()));
    }
    for (int s = 0; s < game.n_states(); ++s) {
      const int expect = game.n_actions(strat.player, s);
      if (static_cast<int>(strat.probs[s].size()) != expect) {
        throw FormatError("state " + std::to_string(s) + ": distribution over " +
                          std::to_string(strat.probs[s].size()) + " actions, game offers " +
                          std::to_string(expect));
      }
    }
    if (j.contains("actions")) {
      const auto labels = j.at("actions").get<std::vector<std::vector<std::string>>>();
      for (int s = 0; s < game.n_states() && s < static_cast<int>(labels.size()); ++s) {
        if (labels[s] != game.action_labels(strat.player, s)) {
          throw FormatError("state " + std::to_string(s) +
                            ": strategy action labels do not match the game");
        }
      }
    }
    return strat;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed strategy document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const SolveReport& report, const ConcurrentGame& game) {
  nlohmann::json j;
  j["lower"] = report.lower;
  j["upper"] = report.upper;
  j["epsilon_requested"] = report.epsilon_requested;
  j["epsilon_achieved"] = report.upper - report.lower;
  j["termination"] = to_string(report.termination);
  j["iterations_p1"] = report.iterations_p1;
  j["iterations_p2"] = report.iterations_p2;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [lo, hi] : report.gain_trace) trace.push_back(nlohmann::json::array({lo, hi}));
  j["trace"] = std::move(trace);
  j["strategy_p1"] = strategy_to_json(report.strategy_p1, game);
  j["strategy_p2"] = strategy_to_json(report.strategy_p2, game);
  return j;
}

inline nlohmann::json simulation_to_json(const SimulationResult& result) {
  nlohmann::json j;
  j["mean_payoff_estimate"] = result.mean_payoff_estimate;
  j["half_width_95"] = result.half_width_95;
  j["steps"] = result.steps;
  j["batches"] = result.batches;
  j["seed"] = result.seed;
  j["rng"] = result.rng;
  return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << "\n";
}

inline ConcurrentGame load_game(const std::string& path) {
  return game_from_json(load_json_file(path));
}

inline void save_game(const std::string& path, const ConcurrentGame& game) {
  save_json_file(path, game_to_json(game));
}

}  // namespace ergo
