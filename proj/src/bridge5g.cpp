#include "tsn5g/bridge5g.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "tsn5g/error.hpp"

namespace tsn5g {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Acklam's rational approximation followed by one Halley step against erfc.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadInput, "normal_quantile needs p in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

EmpiricalDelay EmpiricalDelay::from_unsorted(std::vector<TimeNs> samples) {
  std::sort(samples.begin(), samples.end());
  return EmpiricalDelay{std::move(samples)};
}

namespace {
double cap_mass(const ShiftedLognormal& m) {
  if (!m.cap) return 1.0;
  return normal_cdf((std::log(static_cast<double>((*m.cap - m.shift).count())) - m.mu) / m.sigma);
}
}  // namespace

double ShiftedLognormal::cdf(TimeNs x) const {
  if (x <= shift) return 0.0;
  if (cap && x >= *cap) return 1.0;
  const double z = (std::log(static_cast<double>((x - shift).count())) - mu) / sigma;
  return normal_cdf(z) / cap_mass(*this);
}

double ShiftedLognormal::quantile(double p) const {
  const double y = std::exp(mu + sigma * normal_quantile(p * cap_mass(*this)));
  return static_cast<double>(shift.count()) + y;
}

double ShiftedLognormal::mean_ns() const {
  double m = std::exp(mu + sigma * sigma / 2);
  if (cap) {
    const double lc = std::log(static_cast<double>((*cap - shift).count()));
    m *= normal_cdf((lc - mu - sigma * sigma) / sigma) / normal_cdf((lc - mu) / sigma);
  }
  return static_cast<double>(shift.count()) + m;
}

namespace {
// Root of a monotone function on [lo, hi] by bisection.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  const bool rising = f(hi) > f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0) == rising)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

ShiftedLognormal fit_synthetic(const SyntheticTargets& t) {
  if (!(t.shift < t.mean && t.mean < t.percentile_value && t.percentile_value < t.cap))
    throw Error(ErrorCode::BadInput, "synthetic targets must satisfy shift < mean < percentile value < cap");
  const double target_q = static_cast<double>(t.percentile_value.count());
  const double target_mean = static_cast<double>(t.mean.count());

  // The truncated quantile saturates at the cap once mu passes log(cap - shift).
  const double mu_hi = std::log(static_cast<double>((t.cap - t.shift).count()));
  auto with_sigma = [&](double sigma) {
    ShiftedLognormal m{t.shift, 0.0, sigma, t.cap};
    m.mu = bisect(
        [&](double mu) {
          m.mu = mu;
          return m.quantile(t.percentile) - target_q;
        },
        0.0, mu_hi);
    return m;
  };
  const double sigma = bisect([&](double s) { return with_sigma(s).mean_ns() - target_mean; }, 0.01, 3.0);
  return with_sigma(sigma);
}

std::vector<SlotKind> parse_tdd_pattern(std::string_view text) {
  std::vector<SlotKind> out;
  auto kind = [&](char ch) {
    switch (std::toupper(static_cast<unsigned char>(ch))) {
      case 'D': return SlotKind::DL;
      case 'U': return SlotKind::UL;
      case 'S':
      case 'F': return SlotKind::Flex;
      default: throw Error(ErrorCode::BadInput, "bad TDD slot letter '" + std::string(1, ch) + "'");
    }
  };
  int count = 0;
  for (char ch : text) {
    if (ch == '-' || ch == ' ') continue;
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      count = count * 10 + (ch - '0');
      continue;
    }
    out.insert(out.end(), count ? count : 1, kind(ch));
    count = 0;
  }
  if (count) throw Error(ErrorCode::BadInput, "TDD pattern ends with a count");
  return out;
}

std::string format_tdd_pattern(const std::vector<SlotKind>& pattern) {
  std::string s;
  for (SlotKind k : pattern) s += k == SlotKind::DL ? 'D' : k == SlotKind::UL ? 'U' : 'F';
  return s;
}

const DelayVariant& BridgeDelayModel::variant_for(int pcp) const {
  if (auto it = per_pcp.find(pcp); it != per_pcp.end()) return it->second;
  if (fallback) return *fallback;
  throw Error(ErrorCode::NoModelForPcp, "pcp " + std::to_string(pcp));
}

namespace {
void validate_base(const BaseDelay& b, const std::string& tag, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantDelay>) {
          if (v.delay < TimeNs{0}) out.push_back(tag + ": negative constant delay");
        } else if constexpr (std::is_same_v<T, EmpiricalDelay>) {
          if (v.sorted.empty()) out.push_back(tag + ": empty sample list");
          if (!std::is_sorted(v.sorted.begin(), v.sorted.end())) out.push_back(tag + ": samples not sorted");
          if (!v.sorted.empty() && v.sorted.front() < TimeNs{0}) out.push_back(tag + ": negative sample");
        } else {
          if (v.shift < TimeNs{0}) out.push_back(tag + ": negative shift");
          if (!(v.sigma > 0)) out.push_back(tag + ": sigma must be positive");
          if (v.cap && *v.cap <= v.shift) out.push_back(tag + ": cap must exceed shift");
        }
      },
      b);
}

void validate_variant(const DelayVariant& v, const std::string& tag, std::vector<std::string>& out) {
  if (const auto* tdd = std::get_if<TddAligned>(&v)) {
    validate_base(tdd->base, tag, out);
    if (tdd->slot_len <= TimeNs{0}) out.push_back(tag + ": slot length must be positive");
    if (std::find(tdd->pattern.begin(), tdd->pattern.end(), SlotKind::DL) == tdd->pattern.end())
      out.push_back(tag + ": TDD pattern has no DL slot");
    return;
  }
  std::visit(
      [&](const auto& b) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(b)>, TddAligned>) validate_base(BaseDelay{b}, tag, out);
      },
      v);
}
}  // namespace

std::vector<std::string> validate_bridge(const BridgeDelayModel& model) {
  std::vector<std::string> out;
  for (const auto& [pcp, v] : model.per_pcp) validate_variant(v, "bridge pcp " + std::to_string(pcp), out);
  if (model.fallback) validate_variant(*model.fallback, "bridge default", out);
  if (model.load_ns_per_byte < 0) out.push_back("bridge: negative load coefficient");
  return out;
}

TimeNs tdd_wait(TimeNs entry, TimeNs slot_len, const std::vector<SlotKind>& pattern) {
  const auto n = static_cast<std::int64_t>(pattern.size());
  const TimeNs period = slot_len * n;
  const TimeNs phase = floor_mod(entry, period);
  const std::int64_t slot = phase / slot_len;
  for (std::int64_t j = slot + 1; j <= slot + n; ++j)
    if (pattern[static_cast<std::size_t>(j % n)] == SlotKind::DL) return slot_len * j - phase;
  throw Error(ErrorCode::ConfigInvalid, "TDD pattern has no DL slot");
}

namespace {
TimeNs sample_base(const BaseDelay& b, Rng& rng) {
  return std::visit(
      [&](const auto& v) -> TimeNs {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantDelay>) {
          return v.delay;
        } else if constexpr (std::is_same_v<T, EmpiricalDelay>) {
          return v.sorted[rng.below(v.sorted.size())];
        } else {
          const double y = v.quantile(rng.uniform_open()) - static_cast<double>(v.shift.count());
          TimeNs d = v.shift + TimeNs{std::llround(y)};
          if (v.cap) d = std::min(d, *v.cap);
          return d;
        }
      },
      b);
}
}  // namespace

TimeNs sample_delay(const DelayVariant& v, TimeNs entry_time, Rng& rng) {
  if (const auto* tdd = std::get_if<TddAligned>(&v))
    return sample_base(tdd->base, rng) + tdd_wait(entry_time, tdd->slot_len, tdd->pattern);
  return std::visit(
      [&](const auto& b) -> TimeNs {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, TddAligned>)
          return TimeNs{0};  // handled above
        else
          return sample_base(BaseDelay{b}, rng);
      },
      v);
}

TimeNs sample_delay(const BridgeDelayModel& model, int pcp, TimeNs entry_time, Rng& rng) {
  return sample_delay(model.variant_for(pcp), entry_time, rng);
}

Ecdf::Ecdf(std::vector<TimeNs> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw Error(ErrorCode::EmptyInput, "ecdf of no samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(TimeNs x) const {
  const auto le = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(le) / static_cast<double>(sorted_.size());
}

Ecdf ecdf(const EmpiricalDelay& model) { return Ecdf(model.sorted); }

Bridge::Bridge(BridgeDelayModel model) : model_(std::move(model)) {}

Rng& Bridge::rng_for(int pcp) {
  auto it = rngs_.find(pcp);
  if (it == rngs_.end())
    it = rngs_.emplace(pcp, Rng(model_.seed ^ mix_seed(static_cast<std::uint64_t>(pcp) + 0x5151))).first;
  return it->second;
}

TimeNs Bridge::admit(int pcp, TimeNs entry, std::int64_t len_bytes) {
  TimeNs delay = sample_delay(model_, pcp, entry, rng_for(pcp));
  if (model_.load_ns_per_byte > 0)
    delay += TimeNs{std::llround(model_.load_ns_per_byte * static_cast<double>(in_flight_bytes_))};
  TimeNs exit = entry + delay;
  if (model_.preserve_order) {
    auto [it, fresh] = last_exit_.try_emplace(pcp, exit);
    if (!fresh) {
      exit = std::max(exit, it->second);
      it->second = exit;
    }
  }
  in_flight_bytes_ += len_bytes;
  return exit;
}

}  // namespace tsn5g
