#include "graphmask/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "graphmask/error.hpp"
#include "graphmask/rng.hpp"
#include "graphmask/spectral.hpp"

namespace graphmask {

namespace {

// Sum of a few random planar cosine waves, roughly in [-1, 1].
struct SmoothField {
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves;

  SmoothField(Rng& rng, double scale_km, int count) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
    const double norm = 1.0 / std::sqrt(static_cast<double>(count));
    for (int k = 0; k < count; ++k) waves.push_back({nd(rng) / scale_km, nd(rng) / scale_km, ud(rng), norm});
  }

  double operator()(double x, double y) const {
    double v = 0.0;
    for (const auto& w : waves) v += w.amp * std::cos(w.kx * x + w.ky * y + w.phase);
    return v;
  }
};

}  // namespace

Matrix planted_weather_weights(const Matrix& gps, const Matrix& alt) {
  const auto n = static_cast<int>(gps.rows());
  // Planted station graph: lowland pairs relate through position, pairs
  // touching an upland station through altitude, shared edges through both.
  const MultiLayerGraph layers = layers_from_features({{"gps", gps}, {"altitude", alt}}, 0.10);
  std::vector<double> sorted_alt(alt.data(), alt.data() + n);
  std::nth_element(sorted_alt.begin(), sorted_alt.begin() + n / 2, sorted_alt.end());
  const double median_alt = sorted_alt[static_cast<std::size_t>(n / 2)];
  Matrix planted = Matrix::Zero(n, n);
  for (const auto& e : layers.union_edges()) {
    const double wg = layers.layer(0).weight(e.i, e.j), wa = layers.layer(1).weight(e.i, e.j);
    const bool lowland = alt(e.i, 0) < median_alt && alt(e.j, 0) < median_alt;
    double w = 0.0;
    if (wg > 0.0 && wa > 0.0) w = 0.5 * (wg + wa);
    else if (wg > 0.0 && lowland) w = wg;
    else if (wa > 0.0) w = wa;
    planted(e.i, e.j) = planted(e.j, e.i) = w;
  }
  return planted;
}

StationTable make_weather_fixture(const WeatherFixtureConfig& cfg) {
  if (cfg.stations < 4) throw ValidationError("weather fixture needs at least 4 stations");
  if (cfg.missing_temperature < 0 || cfg.missing_temperature >= cfg.stations - 1)
    throw ValidationError("invalid count of stations without temperature");
  const int n = cfg.stations;
  Rng rng(derive_seed(cfg.seed, "weather"));
  std::uniform_real_distribution<double> ux(0.0, cfg.width_km), uy(0.0, cfg.height_km), u01(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);

  struct Peak {
    double x, y, h, r;
  };
  std::vector<Peak> peaks;
  for (int k = 0; k < 4; ++k) peaks.push_back({ux(rng), uy(rng), 500.0 + 700.0 * u01(rng), 35.0 + 30.0 * u01(rng)});

  Matrix gps(n, 2), alt(n, 1);
  for (int i = 0; i < n; ++i) {
    const double x = ux(rng), y = uy(rng);
    double h = 300.0;
    for (const auto& p : peaks) h += p.h * std::exp(-((x - p.x) * (x - p.x) + (y - p.y) * (y - p.y)) / (2.0 * p.r * p.r));
    // Stations sit on slopes and in valleys, so altitude is only loosely tied to position.
    h += 180.0 * nd(rng);
    gps(i, 0) = std::round(x * 100.0) / 100.0;
    gps(i, 1) = std::round(y * 100.0) / 100.0;
    alt(i, 0) = std::round(std::clamp(h, 200.0, 1900.0));
  }

  const SmoothField clouds(rng, 70.0, 6), rain(rng, 110.0, 6);
  std::vector<double> season(kMonths), lapse(kMonths);
  for (int m = 0; m < kMonths; ++m) {
    season[static_cast<std::size_t>(m)] = -std::cos(2.0 * std::numbers::pi * (m + 0.5) / kMonths);
    lapse[static_cast<std::size_t>(m)] = 0.005 * (1.0 + 0.15 * season[static_cast<std::size_t>(m)]);
  }

  auto block = [&](auto value) {
    Matrix b(n, kMonths + 1);
    for (int i = 0; i < n; ++i) {
      for (int m = 0; m < kMonths; ++m) b(i, m) = value(i, m);
      b(i, kMonths) = b.row(i).head(kMonths).mean();
    }
    return b;
  };
  auto round1 = [](double v) { return std::round(v * 10.0) / 10.0; };
  auto xy = [&](int i) { return std::pair{gps(i, 0), gps(i, 1)}; };

  const Matrix planted = planted_weather_weights(gps, alt);
  // Unit-RMS smooth fields: one persistent across the year plus one per month.
  Matrix anomaly =
      generate_smooth_signals(laplacian_from_weights(planted), kMonths + 1, derive_seed(cfg.seed, "weather-anomaly"));
  for (Eigen::Index c = 0; c < anomaly.cols(); ++c) anomaly.col(c) /= std::sqrt(anomaly.col(c).squaredNorm() / n);
  for (Eigen::Index c = 0; c < kMonths; ++c) anomaly.col(c) = 0.7 * anomaly.col(kMonths) + std::sqrt(0.51) * anomaly.col(c);

  Vector micro(n);
  for (int i = 0; i < n; ++i) micro(i) = nd(rng);
  Matrix temperature = block([&](int i, int m) {
    const auto sm = static_cast<std::size_t>(m);
    return round1(16.0 + 7.0 * season[sm] - lapse[sm] * (alt(i, 0) - 800.0) + 1.5 * anomaly(i, m) + 0.3 * micro(i) +
                  0.2 * nd(rng));
  });
  Matrix snowfall = block([&](int i, int m) {
    const auto sm = static_cast<std::size_t>(m);
    const double winter = std::max(0.0, -season[sm]);
    return round1(std::max(0.0, winter * (alt(i, 0) - 450.0) / 12.0 + 2.0 * nd(rng) * winter));
  });
  Matrix precipitation = block([&](int i, int m) {
    const auto [x, y] = xy(i);
    const auto sm = static_cast<std::size_t>(m);
    return round1(80.0 + 25.0 * rain(x, y) + 0.02 * (alt(i, 0) - 600.0) + 20.0 * season[sm] + 3.0 * nd(rng));
  });
  Matrix humidity = block([&](int i, int m) {
    const auto [x, y] = xy(i);
    const auto sm = static_cast<std::size_t>(m);
    return round1(76.0 - 6.0 * season[sm] + 4.0 * clouds(x, y) - 0.003 * (alt(i, 0) - 600.0) + 1.0 * nd(rng));
  });
  Matrix cloudy = block([&](int i, int m) {
    const auto [x, y] = xy(i);
    const auto sm = static_cast<std::size_t>(m);
    return round1(11.0 - 3.0 * season[sm] + 4.0 * clouds(x, y) + 0.4 * nd(rng));
  });
  Matrix sunshine = block([&](int i, int m) {
    const auto [x, y] = xy(i);
    const auto sm = static_cast<std::size_t>(m);
    return round1(140.0 + 70.0 * season[sm] - 25.0 * clouds(x, y) + 0.01 * alt(i, 0) + 4.0 * nd(rng));
  });

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int k = 0; k < cfg.missing_temperature; ++k)
    temperature.row(order[static_cast<std::size_t>(k)]).setConstant(std::numeric_limits<double>::quiet_NaN());

  StationTable t;
  for (int i = 0; i < n; ++i) t.ids.push_back("ST" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1));
  t.features = {{"gps", gps}, {"altitude", alt}};
  t.measurements = {{"temperature", temperature}, {"snowfall", snowfall},   {"precipitation", precipitation},
                    {"humidity", humidity},       {"sunshine", sunshine}, {"cloudy_days", cloudy}};
  t.validate();
  return t;
}

RelationTable make_office_fixture(const OfficeFixtureConfig& cfg) {
  if (cfg.facebook_users < 3 || cfg.facebook_users >= cfg.actors)
    throw ValidationError("facebook users must be a proper subset of the actors");
  if (cfg.communities < 1) throw ValidationError("need at least one community");
  if (!(cfg.work_on_facebook >= 0.0 && cfg.work_on_facebook <= 1.0))
    throw ValidationError("work_on_facebook must lie in [0, 1]");
  const int n = cfg.actors, na = cfg.facebook_users;
  Rng rng(derive_seed(cfg.seed, "office"));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  if (cfg.outsiders < 0 || cfg.outsiders > n - na) throw ValidationError("invalid outsider count");
  // Outsiders are the last actors and form their own group, cut off from A.
  const int inside = n - cfg.outsiders;
  std::vector<int> community(static_cast<std::size_t>(n), cfg.communities);
  for (int v = 0; v < inside; ++v) community[static_cast<std::size_t>(v)] = v % cfg.communities;
  std::shuffle(community.begin(), community.begin() + inside, rng);
  // Actors 0 .. na-1 are the facebook users; ids are shuffled at the end.
  std::vector<Edge> lunch;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool same = community[static_cast<std::size_t>(i)] == community[static_cast<std::size_t>(j)];
      const bool cut = (i < na && j >= inside) || (j < na && i >= inside);
      if (!cut && u01(rng) < (same ? cfg.lunch_within : cfg.lunch_across)) lunch.emplace_back(i, j);
    }

  std::vector<Edge> lunch_a, other_a;
  for (const auto& e : lunch)
    if (e.j < na) lunch_a.push_back(e);
  const EdgeSet lunch_set(lunch);
  for (int i = 0; i < na; ++i)
    for (int j = i + 1; j < na; ++j)
      if (!lunch_set.contains(Edge(i, j))) other_a.emplace_back(i, j);
  std::shuffle(lunch_a.begin(), lunch_a.end(), rng);
  std::shuffle(other_a.begin(), other_a.end(), rng);

  const auto total = static_cast<double>(lunch_a.size());
  const auto n_out = static_cast<std::size_t>(std::llround(cfg.share_outside * total));
  const auto n_both = static_cast<std::size_t>(std::llround(cfg.share_both * total));
  const auto n_fb = static_cast<std::size_t>(std::llround(cfg.share_facebook_only * total));
  if (n_out + n_both + n_fb > lunch_a.size()) throw ValidationError("lunch edge shares exceed one");
  std::vector<Edge> facebook, work;
  for (std::size_t k = n_out; k < lunch_a.size(); ++k) {
    const std::size_t r = k - n_out;
    if (r < n_both) {
      facebook.push_back(lunch_a[k]);
      work.push_back(lunch_a[k]);
    } else if (r < n_both + n_fb) {
      facebook.push_back(lunch_a[k]);
    } else {
      work.push_back(lunch_a[k]);
    }
  }
  const auto fb_fill = static_cast<std::size_t>(std::max<long>(0, cfg.facebook_edges - static_cast<long>(facebook.size())));
  const auto work_fill = static_cast<std::size_t>(std::max<long>(0, cfg.work_edges - static_cast<long>(work.size())));
  if (fb_fill + work_fill > other_a.size()) throw ValidationError("not enough non-lunch pairs for the layer sizes");
  // Facebook friendships outside lunch are spread at random; work ties outside lunch prefer the same community.
  for (std::size_t k = 0; k < fb_fill; ++k) facebook.push_back(other_a[k]);
  const auto on_fb = std::min(fb_fill, static_cast<std::size_t>(std::llround(cfg.work_on_facebook * static_cast<double>(work_fill))));
  for (std::size_t k = 0; k < on_fb; ++k) work.push_back(other_a[k]);
  std::vector<Edge> rest(other_a.begin() + static_cast<std::ptrdiff_t>(fb_fill), other_a.end());
  std::stable_partition(rest.begin(), rest.end(), [&](const Edge& e) {
    return community[static_cast<std::size_t>(e.i)] == community[static_cast<std::size_t>(e.j)] || u01(rng) < 0.05;
  });
  for (std::size_t k = 0; k < work_fill - on_fb; ++k) work.push_back(rest[k]);

  // Random public ids so group membership is not visible in the ordering.
  std::vector<int> label(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) label[static_cast<std::size_t>(v)] = v;
  std::shuffle(label.begin(), label.end(), rng);
  auto relabel = [&](const std::vector<Edge>& edges) {
    std::vector<Edge> out;
    for (const auto& e : edges) out.emplace_back(label[static_cast<std::size_t>(e.i)], label[static_cast<std::size_t>(e.j)]);
    return EdgeSet(std::move(out));
  };
  RelationTable t;
  for (int v = 0; v < n; ++v) t.actors.push_back("P" + std::string(v + 1 < 10 ? "0" : "") + std::to_string(v + 1));
  t.relations.emplace("facebook", relabel(facebook));
  t.relations.emplace("work", relabel(work));
  t.relations.emplace("lunch", relabel(lunch));
  t.validate();
  return t;
}

}  // namespace graphmask
