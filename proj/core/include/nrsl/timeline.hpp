#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nrsl {

/// Absolute slot index counted from simulation time zero.
using SlotIndex = std::int64_t;

/// Half-open slot range [begin, end).
struct SlotRange {
  SlotIndex begin = 0;
  SlotIndex end = 0;

  [[nodiscard]] bool empty() const { return end <= begin; }
  [[nodiscard]] std::int64_t size() const { return empty() ? 0 : end - begin; }
  [[nodiscard]] bool contains(SlotIndex s) const { return s >= begin && s < end; }

  friend bool operator==(const SlotRange&, const SlotRange&) = default;
};

/// NR numerology for FR1 sidelink (mu in {0, 1, 2}).
class Numerology {
 public:
  explicit Numerology(int mu);

  [[nodiscard]] int mu() const { return mu_; }
  [[nodiscard]] int scs_khz() const { return 15 << mu_; }
  [[nodiscard]] std::int64_t slots_per_ms() const { return std::int64_t{1} << mu_; }
  [[nodiscard]] std::chrono::microseconds slot_duration() const {
    return std::chrono::microseconds{1000 >> mu_};
  }

  [[nodiscard]] std::int64_t to_slots(std::chrono::milliseconds d) const {
    return d.count() * slots_per_ms();
  }
  [[nodiscard]] std::chrono::microseconds slot_start(SlotIndex s) const {
    return slot_duration() * s;
  }
  /// First slot whose start is at or after t.
  [[nodiscard]] SlotIndex first_slot_at_or_after(std::chrono::microseconds t) const;

 private:
  int mu_;
};

std::chrono::microseconds slot_duration(int mu);
std::int64_t ms_to_slots(std::int64_t duration_ms, int mu);

enum class SlotKind : char { Downlink = 'D', Uplink = 'U', Special = 'S' };

/// TDD pattern plus sidelink bitmap. The bitmap is applied cyclically over
/// the subsequence of UL slots; bit 0 lines up with the first UL slot at
/// simulation time zero. D and S slots never carry sidelink.
class SidelinkPattern {
 public:
  SidelinkPattern(std::vector<SlotKind> tdd, std::vector<bool> bitmap);

  /// Parses e.g. ("DDDSUUUUUU", "111111000111"). '|', ',' and whitespace
  /// are ignored so "D|D|D|S|U|..." also works.
  static SidelinkPattern parse(std::string_view tdd, std::string_view bitmap);

  /// Every slot UL with an all-ones bitmap.
  static SidelinkPattern all_sidelink();

  [[nodiscard]] bool is_uplink(SlotIndex slot) const;
  [[nodiscard]] bool is_sidelink(SlotIndex slot) const;
  [[nodiscard]] std::vector<SlotIndex> enumerate(SlotRange range) const;
  [[nodiscard]] std::int64_t count(SlotRange range) const;

  [[nodiscard]] const std::vector<SlotKind>& tdd() const { return tdd_; }
  [[nodiscard]] const std::vector<bool>& bitmap() const { return bitmap_; }
  [[nodiscard]] std::string tdd_string() const;
  [[nodiscard]] std::string bitmap_string() const;

 private:
  std::vector<SlotKind> tdd_;
  std::vector<bool> bitmap_;
  // UL rank of each TDD position (-1 for D/S).
  std::vector<int> ul_rank_;
  int ul_per_period_ = 0;
};

/// Free-function form of SidelinkPattern::enumerate.
std::vector<SlotIndex> enumerate_sidelink_slots(const SidelinkPattern& pattern, SlotRange range);

}  // namespace nrsl
