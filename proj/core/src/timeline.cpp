#include "nrsl/timeline.hpp"

#include <string>

#include "nrsl/errors.hpp"

namespace nrsl {

Numerology::Numerology(int mu) : mu_(mu) {
  if (mu < 0 || mu > 2) {
    throw UnsupportedNumerology("numerology mu=" + std::to_string(mu) +
                                " is not supported (expected 0, 1 or 2)");
  }
}

SlotIndex Numerology::first_slot_at_or_after(std::chrono::microseconds t) const {
  const auto d = slot_duration().count();
  const auto us = t.count();
  if (us <= 0) {
    return 0;
  }
  return (us + d - 1) / d;
}

std::chrono::microseconds slot_duration(int mu) { return Numerology(mu).slot_duration(); }

std::int64_t ms_to_slots(std::int64_t duration_ms, int mu) {
  return Numerology(mu).to_slots(std::chrono::milliseconds{duration_ms});
}

SidelinkPattern::SidelinkPattern(std::vector<SlotKind> tdd, std::vector<bool> bitmap)
    : tdd_(std::move(tdd)), bitmap_(std::move(bitmap)) {
  if (tdd_.empty()) {
    throw ConfigError("TDD pattern must contain at least one slot");
  }
  if (bitmap_.empty()) {
    throw ConfigError("sidelink bitmap must contain at least one bit");
  }
  ul_rank_.assign(tdd_.size(), -1);
  for (std::size_t i = 0; i < tdd_.size(); ++i) {
    if (tdd_[i] == SlotKind::Uplink) {
      ul_rank_[i] = ul_per_period_++;
    }
  }
}

namespace {

bool is_separator(char c) { return c == '|' || c == ',' || c == ' ' || c == '\t'; }

}  // namespace

SidelinkPattern SidelinkPattern::parse(std::string_view tdd, std::string_view bitmap) {
  std::vector<SlotKind> kinds;
  for (char c : tdd) {
    if (is_separator(c)) {
      continue;
    }
    switch (c) {
      case 'D':
      case 'd':
        kinds.push_back(SlotKind::Downlink);
        break;
      case 'U':
      case 'u':
        kinds.push_back(SlotKind::Uplink);
        break;
      case 'S':
      case 's':
      case 'F':
      case 'f':
        kinds.push_back(SlotKind::Special);
        break;
      default:
        throw ConfigError(std::string("invalid TDD slot kind '") + c + "'");
    }
  }
  std::vector<bool> bits;
  for (char c : bitmap) {
    if (is_separator(c)) {
      continue;
    }
    if (c != '0' && c != '1') {
      throw ConfigError(std::string("invalid sidelink bitmap character '") + c + "'");
    }
    bits.push_back(c == '1');
  }
  return {std::move(kinds), std::move(bits)};
}

SidelinkPattern SidelinkPattern::all_sidelink() { return {{SlotKind::Uplink}, {true}}; }

bool SidelinkPattern::is_uplink(SlotIndex slot) const {
  if (slot < 0) {
    return false;
  }
  const auto n = static_cast<SlotIndex>(tdd_.size());
  return tdd_[static_cast<std::size_t>(slot % n)] == SlotKind::Uplink;
}

bool SidelinkPattern::is_sidelink(SlotIndex slot) const {
  if (!is_uplink(slot)) {
    return false;
  }
  const auto n = static_cast<SlotIndex>(tdd_.size());
  const SlotIndex ul_index =
      (slot / n) * ul_per_period_ + ul_rank_[static_cast<std::size_t>(slot % n)];
  return bitmap_[static_cast<std::size_t>(ul_index % static_cast<SlotIndex>(bitmap_.size()))];
}

std::vector<SlotIndex> SidelinkPattern::enumerate(SlotRange range) const {
  std::vector<SlotIndex> out;
  for (SlotIndex s = range.begin; s < range.end; ++s) {
    if (is_sidelink(s)) {
      out.push_back(s);
    }
  }
  return out;
}

std::int64_t SidelinkPattern::count(SlotRange range) const {
  std::int64_t n = 0;
  for (SlotIndex s = range.begin; s < range.end; ++s) {
    n += is_sidelink(s) ? 1 : 0;
  }
  return n;
}

std::string SidelinkPattern::tdd_string() const {
  std::string s;
  for (auto k : tdd_) {
    s.push_back(static_cast<char>(k));
  }
  return s;
}

std::string SidelinkPattern::bitmap_string() const {
  std::string s;
  for (bool b : bitmap_) {
    s.push_back(b ? '1' : '0');
  }
  return s;
}

std::vector<SlotIndex> enumerate_sidelink_slots(const SidelinkPattern& pattern, SlotRange range) {
  return pattern.enumerate(range);
}

}  // namespace nrsl
