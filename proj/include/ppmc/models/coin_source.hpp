#pragma once

#include <functional>

#include "ppmc/errors.hpp"
#include "ppmc/rng.hpp"

namespace ppmc {

/// A black-box source of coin flips: possibly biased, possibly correlated,
/// assumed stationary. A fresh instance is created per model evaluation so
/// that evaluation stays a pure function of (x, rng state).
using CoinSource = std::function<bool(RngStream&)>;
using CoinSourceFactory = std::function<CoinSource()>;

/// Independent fair flips.
inline CoinSourceFactory fair_coin_source() {
  return [] { return CoinSource([](RngStream& rng) {
    return sample_bernoulli(rng, 0.5);
  }); };
}

/// Two-state symmetric Markov chain: repeats the previous flip with
/// probability `stay_prob`. The first flip is drawn from the stationary
/// distribution (fair, by symmetry).
inline CoinSourceFactory markov_coin_source(double stay_prob) {
  if (!(stay_prob >= 0.0 && stay_prob <= 1.0))
    throw DomainError("markov_coin_source: stay probability outside [0,1]");
  return [stay_prob] {
    return CoinSource([stay_prob, state = -1](RngStream& rng) mutable {
      if (state < 0)
        state = sample_bernoulli(rng, 0.5) ? 1 : 0;
      else if (!sample_bernoulli(rng, stay_prob))
        state = 1 - state;
      return state == 1;
    });
  };
}

/// Degenerate source that always reports the same face.
inline CoinSourceFactory constant_coin_source(bool value) {
  return [value] { return CoinSource([value](RngStream&) { return value; }); };
}

}  // namespace ppmc
