#include "flatlab/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "flatlab/errors.hpp"

namespace flatlab {

Json space_to_json(const MeasureSpace& space) {
  switch (space.geometry()) {
    case Geometry::Interval:
      return {{"kind", "interval"}, {"n", space.size()}};
    case Geometry::Grid:
      return {{"kind", "grid"}, {"nx", space.nx()}, {"ny", space.ny()}};
    case Geometry::Custom:
      break;
  }
  Json weights = Json::array();
  for (double w : space.weights()) weights.push_back(w);
  return {{"kind", "custom"}, {"weights", weights}};
}

MeasureSpace space_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "interval") return MeasureSpace::uniform_interval(j.at("n").get<std::size_t>());
    if (kind == "grid") {
      if (j.contains("n")) {
        const auto n = j.at("n").get<std::size_t>();
        return MeasureSpace::product_grid(n, n);
      }
      return MeasureSpace::product_grid(j.at("nx").get<std::size_t>(),
                                        j.at("ny").get<std::size_t>());
    }
    if (kind == "custom")
      return MeasureSpace::from_weights(j.at("weights").get<std::vector<double>>());
    throw ParseError("unknown space kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("space descriptor: ") + e.what());
  }
}

Json set_to_json(const MeasurableSet& e) { return e.indices(); }

MeasurableSet set_from_json(const MeasureSpace& space, const Json& j) {
  try {
    const auto idx = j.get<std::vector<std::size_t>>();
    return MeasurableSet::from_indices(space, idx);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("set: ") + e.what());
  }
}

Json to_json(const OperatorNormEstimate& est) {
  return {{"lower", est.lower},
          {"upper", est.upper},
          {"method", std::string(to_string(est.method))},
          {"iterations", est.iterations},
          {"converged", est.converged}};
}

Json to_json(const FlatReport& report) {
  Json flats = Json::array();
  for (const auto& f : report.flats)
    flats.push_back({{"value", f.value}, {"measure", f.measure}, {"atoms", f.set.count()},
                     {"set", set_to_json(f.set)}});
  return {{"theta", report.theta}, {"tau", report.tau}, {"flats", flats}};
}

Json to_json(const LevelBand& band) {
  Json j{{"kind", std::string(to_string(band.kind))}, {"alpha", band.alpha}};
  if (band.beta) j["beta"] = *band.beta;
  j["measure"] = band.set.measure();
  j["atoms"] = band.set.count();
  return j;
}

namespace {

Json values_of(const LpFunction& f) {
  Json a = Json::array();
  for (std::size_t i = 0; i < f.size(); ++i) a.push_back(f[i]);
  return a;
}

}  // namespace

Json to_json(const WitnessTrace& trace, bool include_vectors) {
  Json steps = Json::array();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    Json j{{"n", s.n},
           {"alpha", s.alpha},
           {"gamma", s.gamma},
           {"beta", s.beta},
           {"a_side", s.took_lower ? "lower" : "upper"},
           {"norm_a", s.norm_a},
           {"norm_b", s.norm_b},
           {"norm_u", s.norm_u},
           {"norm_v", s.norm_v},
           {"ratio", s.ratio},
           {"split_deviation", s.split_deviation},
           {"consistency", s.consistency},
           {"c1_hat", trace.c1_hat[i]},
           {"delta_hat", trace.delta_hat_n[i]},
           {"norm_image", trace.images[i].norm()},
           {"b_band_atoms", s.b_band.count()}};
    if (include_vectors) {
      j["e"] = values_of(trace.e[i]);
      j["image"] = values_of(trace.images[i]);
    }
    steps.push_back(std::move(j));
  }
  Json j{{"p", trace.p},
         {"c", trace.c},
         {"c1", trace.c1},
         {"delta", trace.delta},
         {"delta_hat", trace.delta_hat},
         {"operator_norm", to_json(trace.a_norm)},
         {"norm_x", trace.norm_x},
         {"norm_y", trace.norm_y},
         {"requested_steps", trace.requested_steps},
         {"effective_steps", trace.effective_steps()},
         {"stop_reason", trace.stop_reason},
         {"steps", steps}};
  return j;
}

Json to_json(const VerdictReport& report) {
  Json list = Json::array();
  for (const auto& v : report.verdicts)
    list.push_back({{"name", v.name}, {"n", v.n}, {"pass", v.pass}, {"value", v.value},
                    {"bound", v.bound}});
  return {{"all_pass", report.all_pass()}, {"failures", report.failures()}, {"checks", list}};
}

Json to_json(const DecayReport& report) {
  return {{"norms", report.norms},
          {"dominating_norms", report.dominating_norms},
          {"head_max", report.head_max},
          {"tail_max", report.tail_max},
          {"factor", report.factor},
          {"decays", report.decays},
          {"domination_consistent", report.domination_consistent}};
}

void write_trace_csv(std::ostream& out, const WitnessTrace& trace) {
  out << "k,norm_a,norm_b,norm_u,norm_v,ratio,margin_a_lower,margin_a_upper,"
         "margin_b_upper,margin_image\n";
  out << std::setprecision(17);
  out << 0 << ',' << trace.norm_x << ",," << trace.norm_y << ",,,,,,\n";
  double cum = 1.0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    const double n = static_cast<double>(s.n);
    cum *= s.ratio;
    const double lo1 = cum * trace.norm_y / trace.a_norm.upper;
    const double hi1 = std::pow(trace.c, n) * trace.norm_x;
    const double hi2 = trace.c1_hat[i] * std::pow(trace.c, n - 1.0) * trace.norm_x;
    out << s.n << ',' << s.norm_a << ',' << s.norm_b << ',' << s.norm_u << ',' << s.norm_v
        << ',' << s.ratio << ',' << s.norm_a - lo1 << ',' << hi1 - s.norm_a << ','
        << hi2 - s.norm_b << ',' << trace.images[i].norm() - trace.delta_hat << '\n';
  }
}

void write_decay_csv(std::ostream& out, const DecayReport& report) {
  out << "n,norm_image,norm_dominating\n" << std::setprecision(17);
  for (std::size_t n = 0; n < report.norms.size(); ++n) {
    out << n + 1 << ',' << report.norms[n] << ',';
    if (n < report.dominating_norms.size()) out << report.dominating_norms[n];
    out << '\n';
  }
}

}  // namespace flatlab
