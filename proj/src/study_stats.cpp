#include "errata/study_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "errata/error.hpp"

namespace errata {

std::string_view to_string(TestMethod method) noexcept {
  return method == TestMethod::paired_t ? "paired_t" : "wilcoxon";
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

const boost::math::normal kStdNormal;

double poly(const double* c, int order, double x) {
  double r = c[order - 1];
  for (int k = order - 2; k >= 0; --k) r = r * x + c[k];
  return r;
}

std::vector<double> differences(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(Errc::InvalidRequest, "paired samples must have equal lengths");
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return d;
}

}  // namespace

NormalityResult shapiro_wilk(std::vector<double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw Error(Errc::SampleTooSmall, "shapiro-wilk needs at least 3 values");
  if (n > 5000) throw Error(Errc::InvalidRequest, "shapiro-wilk supports at most 5000 values");
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 1e-19 * std::max(1.0, std::abs(x.front())))) {
    throw Error(Errc::DegenerateSample, "all values are identical");
  }

  static const double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static const double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static const double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static const double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static const double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static const double c6[] = {-0.4803, -0.082676, 0.0030302};
  static const double g[] = {-2.273, 0.459};

  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = boost::math::quantile(kStdNormal, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - m[0] / ssumm2;
    std::size_t first = 1;
    double fac = 0.0;
    if (n > 5) {
      first = 2;
      const double a2 = -m[1] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  }

  // scale by the range to keep the sums well conditioned
  double xbar = 0.0;
  for (double v : x) xbar += v / range;
  xbar /= an;
  double ssq = 0.0;
  for (double v : x) ssq += (v / range - xbar) * (v / range - xbar);
  double num = 0.0;
  for (std::size_t i = 0; i < half; ++i) num += a[i] * (x[n - 1 - i] - x[i]) / range;
  double w = std::min(1.0, num * num / ssq);

  NormalityResult out;
  out.W = w;
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6 / pi
    constexpr double stqr = 1.04719755119660;  // asin(sqrt(3/4))
    out.p = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    return out;
  }
  const double w1 = std::log(1.0 - w);
  double y = w1;
  double mu = 0.0;
  double sigma = 1.0;
  if (n <= 11) {
    const double gamma = poly(g, 2, an);
    if (y >= gamma) {
      out.p = 1e-99;
      return out;
    }
    y = -std::log(gamma - w1);
    mu = poly(c3, 4, an);
    sigma = std::exp(poly(c4, 4, an));
  } else {
    const double ln = std::log(an);
    mu = poly(c5, 4, ln);
    sigma = std::exp(poly(c6, 3, ln));
  }
  out.p = boost::math::cdf(boost::math::complement(kStdNormal, (y - mu) / sigma));
  return out;
}

TestResult paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  const auto d = differences(a, b);
  if (d.size() < 3) throw Error(Errc::SampleTooSmall, "a paired test needs at least 3 pairs");
  const double sd = sample_sd(d);
  if (!(sd > 0.0)) throw Error(Errc::DegenerateDifferences, "the differences have zero variance");
  const double n = static_cast<double>(d.size());
  TestResult r;
  r.method = TestMethod::paired_t;
  r.n = d.size();
  r.statistic = mean(d) / (sd / std::sqrt(n));
  r.df = static_cast<int>(d.size()) - 1;
  const boost::math::students_t dist(n - 1.0);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic))));
  return r;
}

TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  auto d = differences(a, b);
  d.erase(std::remove(d.begin(), d.end(), 0.0), d.end());
  if (d.empty()) throw Error(Errc::AllZeroDifferences, "every difference is zero");
  const std::size_t n = d.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });
  // doubled mid-ranks stay integral
  std::vector<long> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const long r2 = static_cast<long>(i + j + 2);  // 2 * mean of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = r2;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  long plus2 = 0;
  long total2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    total2 += rank2[k];
    if (d[k] > 0) plus2 += rank2[k];
  }
  const long t2 = std::min(plus2, total2 - plus2);

  TestResult r;
  r.method = TestMethod::wilcoxon;
  r.n = n;
  r.statistic = static_cast<double>(t2) / 2.0;

  const double nn = static_cast<double>(n);
  const double mu = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  double dev = r.statistic - mu;
  if (dev != 0.0) dev -= std::copysign(0.5, dev);
  const double z = var > 0.0 ? dev / std::sqrt(var) : 0.0;
  r.z = z;
  r.effect_r = std::abs(z) / std::sqrt(nn);

  if (n <= kWilcoxonExactMax) {
    // distribution of the doubled positive-rank sum over all sign patterns
    std::vector<std::uint64_t> count(static_cast<std::size_t>(total2) + 1, 0);
    count[0] = 1;
    long reach = 0;
    for (std::size_t k = 0; k < n; ++k) {
      for (long s = reach; s >= 0; --s) {
        if (count[s]) count[s + rank2[k]] += count[s];
      }
      reach += rank2[k];
    }
    std::uint64_t extreme = 0;
    for (long s = 0; s <= total2; ++s) {
      if (std::min(s, total2 - s) <= t2) extreme += count[s];
    }
    r.p = static_cast<double>(extreme) / static_cast<double>(std::uint64_t{1} << n);
    r.exact = true;
  } else {
    r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(kStdNormal, std::abs(z))));
  }
  return r;
}

TestResult choose_and_run(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
  const auto d = differences(a, b);
  const auto normality = shapiro_wilk(d);
  auto r = normality.p >= alpha ? paired_t(a, b) : wilcoxon_signed_rank(a, b);
  r.normality = normality;
  return r;
}

}  // namespace errata
