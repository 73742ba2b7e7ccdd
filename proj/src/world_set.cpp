#include "produpd/world_set.hpp"

#include <algorithm>

#include "produpd/error.hpp"

namespace produpd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::DuplicateWorld: return "DuplicateWorld";
    case ErrorCode::UnknownWorldInRelation: return "UnknownWorldInRelation";
    case ErrorCode::UnknownWorldInValuation: return "UnknownWorldInValuation";
    case ErrorCode::EmptyEventSet: return "EmptyEventSet";
    case ErrorCode::DuplicateEvent: return "DuplicateEvent";
    case ErrorCode::UnknownEventInRelation: return "UnknownEventInRelation";
    case ErrorCode::MissingPrecondition: return "MissingPrecondition";
    case ErrorCode::PreconditionNotBaseMso: return "PreconditionNotBaseMso";
    case ErrorCode::WorldOutOfModel: return "WorldOutOfModel";
    case ErrorCode::NominalOutsideProductContext: return "NominalOutsideProductContext";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::UnknownEvent: return "UnknownEvent";
    case ErrorCode::InputNotSentenceFragment: return "InputNotSentenceFragment";
    case ErrorCode::NotABisimulation: return "NotABisimulation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ParseError::ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected)
    : Error(ErrorCode::ParseError,
            message + " at line " + std::to_string(span.line) + ", offset " + std::to_string(span.start)),
      span_(span),
      expected_(std::move(expected)) {}

WorldSet::WorldSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

WorldSet WorldSet::full(std::size_t universe) {
  WorldSet s(universe);
  std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
  s.trim();
  return s;
}

WorldSet WorldSet::singleton(std::size_t universe, std::size_t index) {
  WorldSet s(universe);
  s.set(index);
  return s;
}

void WorldSet::clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

void WorldSet::trim() noexcept {
  if (universe_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }
}

std::size_t WorldSet::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool WorldSet::empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool WorldSet::is_full() const noexcept { return count() == universe_; }

bool WorldSet::is_subset_of(const WorldSet& other) const noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

bool WorldSet::intersects(const WorldSet& other) const noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & other.words_[i]) != 0) return true;
  }
  return false;
}

WorldSet WorldSet::complement() const {
  WorldSet s = *this;
  for (auto& w : s.words_) w = ~w;
  s.trim();
  return s;
}

WorldSet& WorldSet::operator&=(const WorldSet& other) noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

WorldSet& WorldSet::operator|=(const WorldSet& other) noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

WorldSet& WorldSet::operator-=(const WorldSet& other) noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

bool operator==(const WorldSet& a, const WorldSet& b) noexcept {
  return a.universe_ == b.universe_ && std::equal(a.words_.begin(), a.words_.end(), b.words_.begin());
}

std::vector<std::size_t> WorldSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t i) { out.push_back(i); });
  return out;
}

}  // namespace produpd
