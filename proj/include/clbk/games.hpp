// clbk :: Bundled games
//
// coffee(zmax): the environment orders x grams of sugar and y*10cc of milk,
// the machine answers with a strength z in 1..zmax. The order is good iff
// h(x,y,z) = |z - xy - 1| is zero.
//
// dollar(vmax): the environment asks for v in 1..vmax, the machine must
// answer r = 2v.
//
// In both games the machine wins unless the environment finished its part
// and the machine's answer is missing or wrong.

#ifndef CLBK_GAMES_HPP_
#define CLBK_GAMES_HPP_

#include <charconv>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include "engine.hpp"

namespace clbk {

  namespace detail {

    struct KeyValue {
      std::string key;
      long value;
    };

    inline std::optional<KeyValue> split_move(const std::string& m) {
      auto eq = m.find('=');
      if (eq == std::string::npos || eq == 0) return std::nullopt;
      long v = 0;
      const char* first = m.data() + eq + 1;
      const char* last = m.data() + m.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
      return KeyValue{m.substr(0, eq), v};
    }

    // key -> value of the first well-formed move with that key
    inline std::map<std::string, long> values(const Run& run) {
      std::map<std::string, long> out;
      for (const auto& lm: run)
        if (auto kv = split_move(lm.payload)) out.try_emplace(kv->key, kv->value);
      return out;
    }

  }

  class CoffeeGame: public GameDef {
  public:
    explicit CoffeeGame(long zmax = 10): zmax_(zmax) {}

    std::string name() const override { return "coffee"; }
    long zmax() const { return zmax_; }

    bool legal(const Run& run, Player who, const std::string& payload) const override {
      auto kv = detail::split_move(payload);
      if (!kv) return false;
      auto v = detail::values(run);
      if (who == Player::Environment) {
        if (kv->key == "x") return !v.contains("x") && kv->value >= 0;
        if (kv->key == "y") return v.contains("x") && !v.contains("y") && kv->value >= 0;
        return false;
      }
      return kv->key == "z" && v.contains("x") && v.contains("y") && !v.contains("z") && kv->value >= 1 && kv->value <= zmax_;
    }

    Player winner(const Run& run) const override {
      auto v = detail::values(run);
      if (!v.contains("x") || !v.contains("y")) return Player::Machine;
      if (!v.contains("z")) return Player::Environment;
      return std::labs(v["z"] - v["x"] * v["y"] - 1) == 0 ? Player::Machine : Player::Environment;
    }

    bool complete(const Run& run) const override {
      auto v = detail::values(run);
      return v.contains("x") && v.contains("y") && v.contains("z");
    }

  private:
    long zmax_;
  };

  class DollarGame: public GameDef {
  public:
    explicit DollarGame(long vmax = 5): vmax_(vmax) {}

    std::string name() const override { return "dollar"; }
    long vmax() const { return vmax_; }

    bool legal(const Run& run, Player who, const std::string& payload) const override {
      auto kv = detail::split_move(payload);
      if (!kv) return false;
      auto v = detail::values(run);
      if (who == Player::Environment) return kv->key == "v" && !v.contains("v") && kv->value >= 1 && kv->value <= vmax_;
      return kv->key == "r" && v.contains("v") && !v.contains("r") && kv->value >= 1 && kv->value <= 2 * vmax_;
    }

    Player winner(const Run& run) const override {
      auto v = detail::values(run);
      if (!v.contains("v")) return Player::Machine;
      if (!v.contains("r")) return Player::Environment;
      return v["r"] == 2 * v["v"] ? Player::Machine : Player::Environment;
    }

    bool complete(const Run& run) const override {
      auto v = detail::values(run);
      return v.contains("v") && v.contains("r");
    }

  private:
    long vmax_;
  };

  // argmin over 1..zmax of |k - xy - 1|, smallest k on ties
  inline std::optional<std::string> coffee_heuristic(const Run& run, long zmax) {
    auto v = detail::values(run);
    if (!v.contains("x") || !v.contains("y") || v.contains("z")) return std::nullopt;
    long target = v["x"] * v["y"] + 1;
    long best = 1;
    for (long k = 1; k <= zmax; k++)
      if (std::labs(k - target) < std::labs(best - target)) best = k;
    return "z=" + std::to_string(best);
  }

  inline std::optional<std::string> dollar_heuristic(const Run& run) {
    auto v = detail::values(run);
    if (!v.contains("v") || v.contains("r")) return std::nullopt;
    return "r=" + std::to_string(2 * v["v"]);
  }

  // Builtin heuristic by name, sized for the given game.
  inline std::optional<Heuristic> builtin_heuristic(const std::string& name, const std::shared_ptr<const GameDef>& game) {
    if (name == "coffee") {
      auto* c = dynamic_cast<const CoffeeGame*>(game.get());
      long zmax = c ? c->zmax() : 10;
      return Heuristic([zmax](const Run& r) { return coffee_heuristic(r, zmax); });
    }
    if (name == "dollar") return Heuristic(dollar_heuristic);
    return std::nullopt;
  }

  // "coffee(zmax=10)", "dollar(vmax=5)", or the bare name with defaults.
  inline std::shared_ptr<const GameDef> make_game(const std::string& spec) {
    std::string name = spec, arg;
    long value = -1;
    if (auto open = spec.find('('); open != std::string::npos) {
      if (spec.back() != ')') throw Error("malformed game '" + spec + "'");
      name = spec.substr(0, open);
      arg = spec.substr(open + 1, spec.size() - open - 2);
      if (!arg.empty()) {
        auto kv = detail::split_move(arg);
        if (!kv) throw Error("malformed game parameter '" + arg + "'");
        if ((name == "coffee" && kv->key != "zmax") || (name == "dollar" && kv->key != "vmax"))
          throw Error("unknown parameter '" + kv->key + "' for game " + name);
        value = kv->value;
        if (value < 1) throw Error("game parameter must be positive");
      }
    }
    if (name == "coffee") return std::make_shared<CoffeeGame>(value < 0 ? 10 : value);
    if (name == "dollar") return std::make_shared<DollarGame>(value < 0 ? 5 : value);
    throw Error("unknown game '" + name + "'");
  }

}

#endif // CLBK_GAMES_HPP_
