#pragma once

#include <chrono>
#include <exception>
#include <functional>
#include <string>

#include "vfl/checks.hpp"

namespace vfl::checks {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline CriterionResult start(int id, const std::string& title) {
  CriterionResult r;
  r.id = id;
  r.title = title;
  return r;
}

// Runs body; an escaping exception fails the criterion with its message.
inline CriterionResult guarded(CriterionResult& r, const Timer& timer,
                               const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("aborted: ") + e.what();
  }
  r.seconds = timer.seconds();
  return r;
}

}  // namespace vfl::checks
