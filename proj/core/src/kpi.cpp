#include "nrsl/kpi.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "nrsl/errors.hpp"

namespace nrsl {

void KpiTrace::register_pair(UeId tx, UeId rx) { pairs_.emplace_back(tx, rx); }

void KpiTrace::record_pssch_tx(SlotIndex slot, UeId tx, const Resource& resource,
                               std::uint64_t packet_id) {
  if (!pssch_tx_.empty() && slot < pssch_tx_.back().slot) {
    throw OutOfOrderEvent("PSSCH transmission at slot " + std::to_string(slot) +
                          " recorded after slot " + std::to_string(pssch_tx_.back().slot));
  }
  pssch_tx_.push_back({slot, tx, resource, packet_id});
}

void KpiTrace::record_app_rx(std::chrono::microseconds rx_time, UeId tx, UeId rx,
                             std::uint64_t packet_id, std::chrono::microseconds sent_time) {
  if (!app_rx_.empty() && rx_time < app_rx_.back().rx_time) {
    throw OutOfOrderEvent("application reception out of time order");
  }
  app_rx_.push_back({rx_time, tx, rx, packet_id, sent_time});
}

std::string KpiTrace::serialize() const {
  std::ostringstream os;
  os << "# pairs\n";
  for (const auto& [tx, rx] : pairs_) {
    os << tx << ',' << rx << '\n';
  }
  os << "# pssch_tx slot,tx,subchannel,num_subchannels,packet\n";
  for (const auto& t : pssch_tx_) {
    os << t.slot << ',' << t.tx << ',' << t.resource.subchannel << ','
       << t.resource.num_subchannels << ',' << t.packet_id << '\n';
  }
  os << "# app_rx rx_us,tx,rx,packet,sent_us\n";
  for (const auto& r : app_rx_) {
    os << r.rx_time.count() << ',' << r.tx << ',' << r.rx << ',' << r.packet_id << ','
       << r.sent_time.count() << '\n';
  }
  os << "# counters generated,delivered,lost,in_flight,selection_failures\n"
     << counters_.generated << ',' << counters_.delivered << ',' << counters_.lost << ','
     << counters_.in_flight() << ',' << selection_failures << '\n';
  return os.str();
}

PirResult compute_pir(const KpiTrace& trace) {
  std::map<std::pair<UeId, UeId>, std::vector<std::chrono::microseconds>> stamps;
  for (const auto& pair : trace.pairs()) {
    stamps[pair];
  }
  for (const auto& r : trace.app_rx()) {
    auto it = stamps.find({r.tx, r.rx});
    if (it != stamps.end()) {
      it->second.push_back(r.sent_time);
    }
  }
  PirResult out;
  for (const auto& pair : trace.pairs()) {
    auto& ts = stamps[pair];
    if (ts.size() < 2) {
      out.starved.push_back(pair);
      continue;
    }
    std::sort(ts.begin(), ts.end());
    const auto span_us = (ts.back() - ts.front()).count();
    const double mean_us = static_cast<double>(span_us) / static_cast<double>(ts.size() - 1);
    out.samples.push_back({pair.first, pair.second, mean_us / 1000.0});
  }
  return out;
}

double simultaneous_pct(const KpiTrace& trace, SimultaneousScope scope) {
  const auto& txs = trace.pssch_tx();
  if (txs.empty()) {
    spdlog::warn("simultaneous_pct: trace holds no PSSCH transmission, reporting 0%");
    return 0.0;
  }
  std::unordered_map<SlotIndex, std::vector<const PsschTxRecord*>> by_slot;
  for (const auto& t : txs) {
    by_slot[t.slot].push_back(&t);
  }
  std::size_t simultaneous = 0;
  for (const auto& t : txs) {
    const auto& same = by_slot[t.slot];
    const bool clash = std::any_of(same.begin(), same.end(), [&](const PsschTxRecord* o) {
      if (o->tx == t.tx) {
        return false;
      }
      return scope == SimultaneousScope::Slot || o->resource.overlaps(t.resource);
    });
    simultaneous += clash ? 1 : 0;
  }
  return 100.0 * static_cast<double>(simultaneous) / static_cast<double>(txs.size());
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out;
  const auto n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) {
      continue;
    }
    out.push_back({samples[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double quantile(std::span<const CdfPoint> cdf, double p) {
  if (cdf.empty()) {
    throw Error("quantile of an empty distribution");
  }
  for (const auto& pt : cdf) {
    if (pt.cdf >= p) {
      return pt.value;
    }
  }
  return cdf.back().value;
}

double cdf_at(std::span<const CdfPoint> cdf, double x) {
  double c = 0.0;
  for (const auto& pt : cdf) {
    if (pt.value > x) {
      break;
    }
    c = pt.cdf;
  }
  return c;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

void export_cdf(std::span<const double> samples, const std::filesystem::path& path) {
  if (samples.empty()) {
    throw Error("cannot export the CDF of an empty sample set to " + path.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << "value,cdf\n";
  for (const auto& pt : empirical_cdf({samples.begin(), samples.end()})) {
    out << format_double(pt.value) << ',' << format_double(pt.cdf) << '\n';
  }
  if (!out) {
    throw Error("write to " + path.string() + " failed");
  }
}

namespace {

double parse_number(std::string_view s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error("malformed number '" + std::string(s) + "' in " + path.string());
  }
  return v;
}

}  // namespace

std::vector<CdfPoint> read_cdf(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "value,cdf") {
    throw Error(path.string() + " lacks the value,cdf header");
  }
  std::vector<CdfPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error("malformed CDF row in " + path.string());
    }
    const std::string_view sv(line);
    out.push_back({parse_number(sv.substr(0, comma), path), parse_number(sv.substr(comma + 1), path)});
  }
  return out;
}

}  // namespace nrsl
