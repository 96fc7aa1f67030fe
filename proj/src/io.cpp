#include "cthmm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cthmm/error.hpp"

namespace cthmm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}


std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Configuration

EmConfig RunConfig::em() const {
  EmConfig em = mixture.em;
  em.seed = seed;
  if (terminal_intervention) {
    if (!intervention_feature) {
      throw Error(ErrorKind::InvalidArgument, "terminal intervention needs an intervention feature");
    }
    em.terminal_intervention =
        InterventionConstraint{static_cast<int>(binning.index_of(*intervention_feature)), intervention_epsilon};
  } else {
    em.terminal_intervention.reset();
  }
  return em;
}

std::vector<int> RunConfig::score_indices() const {
  std::vector<int> out;
  if (!score_features.empty()) {
    for (const auto& name : score_features) out.push_back(static_cast<int>(binning.index_of(name)));
    return out;
  }
  for (std::size_t d = 0; d < binning.size(); ++d)
    if (!intervention_feature || binning[d].name != *intervention_feature) out.push_back(static_cast<int>(d));
  return out;
}

RunConfig default_config() {
  RunConfig config;
  config.binning = BinningScheme({{"heart_rate", 40.0, 150.0, 5},
                                  {"systolic_bp", 40.0, 200.0, 5},
                                  {"intervention", 0.0, 1.0, 2}});
  config.intervention_feature = "intervention";
  return config;
}

RunConfig parse_config(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "config: top level must be an object");

  static const std::set<std::string> known = {
      "time_unit",        "features",         "intervention_feature", "terminal_intervention",
      "intervention_epsilon", "score_features", "subtypes",            "states",
      "left_to_right",    "em",               "max_alternations",     "reestimate_prior",
      "train_fraction",   "prefix_fraction",  "seed",                 "simulate"};
  auto reject_unknown = [](const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorKind::ParseError, "config: " + where + " must be an object");
    for (const auto& [key, value] : obj.items())
      if (!allowed.count(key)) throw Error(ErrorKind::ParseError, "config: unknown key '" + where + key + "'");
  };
  reject_unknown(doc, known, "");

  RunConfig config = default_config();
  try {
    config.time_unit = doc.value("time_unit", config.time_unit);
    if (doc.contains("features")) {
      std::vector<FeatureBinning> features;
      for (const auto& f : doc.at("features")) {
        reject_unknown(f, {"name", "lower", "upper", "bins", "binary"}, "features.");
        FeatureBinning b;
        b.name = f.at("name").get<std::string>();
        if (f.value("binary", false)) {
          b.lower = 0.0;
          b.upper = 1.0;
          b.bins = 2;
        } else {
          b.lower = f.at("lower").get<double>();
          b.upper = f.at("upper").get<double>();
          b.bins = f.value("bins", 5);
        }
        features.push_back(std::move(b));
      }
      config.binning = BinningScheme(std::move(features));
      config.intervention_feature.reset();
    }
    if (doc.contains("intervention_feature")) {
      const auto& v = doc.at("intervention_feature");
      if (v.is_null()) {
        config.intervention_feature.reset();
      } else {
        config.intervention_feature = v.get<std::string>();
      }
    }
    config.terminal_intervention = doc.value("terminal_intervention", config.terminal_intervention);
    config.intervention_epsilon = doc.value("intervention_epsilon", config.intervention_epsilon);
    config.score_features = doc.value("score_features", config.score_features);
    auto int_list = [&](const char* key, std::vector<int>& dest) {
      if (!doc.contains(key)) return;
      const auto& v = doc.at(key);
      dest = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
    };
    int_list("subtypes", config.subtypes);
    int_list("states", config.states);
    if (doc.value("left_to_right", false)) config.mixture.em.mask = MaskKind::Chain;
    config.mixture.max_alternations = doc.value("max_alternations", config.mixture.max_alternations);
    config.mixture.reestimate_prior = doc.value("reestimate_prior", config.mixture.reestimate_prior);
    config.train_fraction = doc.value("train_fraction", config.train_fraction);
    config.prefix_fraction = doc.value("prefix_fraction", config.prefix_fraction);
    config.seed = doc.value("seed", config.seed);
    if (doc.contains("em")) {
      const auto& em = doc.at("em");
      reject_unknown(em, {"max_iterations", "tolerance", "smoothing", "q_min", "q_max", "restarts", "gap_quantum"},
                     "em.");
      auto& out = config.mixture.em;
      out.max_iterations = em.value("max_iterations", out.max_iterations);
      out.tolerance = em.value("tolerance", out.tolerance);
      out.smoothing = em.value("smoothing", out.smoothing);
      out.bounds.q_min = em.value("q_min", out.bounds.q_min);
      out.bounds.q_max = em.value("q_max", out.bounds.q_max);
      out.restarts = em.value("restarts", out.restarts);
      if (em.contains("gap_quantum") && !em.at("gap_quantum").is_null())
        out.gap_quantum = em.at("gap_quantum").get<double>();
    }
    if (doc.contains("simulate")) {
      const auto& sim = doc.at("simulate");
      reject_unknown(sim, {"patients", "min_observations", "max_observations", "mean_gap", "missing_rate"},
                     "simulate.");
      config.patients = sim.value("patients", config.patients);
      config.times.min_observations = sim.value("min_observations", config.times.min_observations);
      config.times.max_observations = sim.value("max_observations", config.times.max_observations);
      config.times.mean_gap = sim.value("mean_gap", config.times.mean_gap);
      config.missing_rate = sim.value("missing_rate", config.missing_rate);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }

  auto fraction_ok = [](double f) { return f > 0.0 && f < 1.0; };
  if (!fraction_ok(config.train_fraction) || !fraction_ok(config.prefix_fraction)) {
    throw Error(ErrorKind::InvalidArgument, "config: fractions must lie in (0, 1)");
  }
  if (config.intervention_feature) config.binning.index_of(*config.intervention_feature);
  config.score_indices();
  config.em();
  validate_config(config.mixture.em);
  return config;
}

RunConfig load_config(const std::string& path) {
  auto in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

// ---------------------------------------------------------------------------
// Cohort files

std::vector<Trajectory> read_cohort(std::istream& in, const BinningScheme& binning) {
  std::string line;
  std::size_t line_no = 0;
  auto parse_error = [&](const std::string& what) {
    std::ostringstream os;
    os << "line " << line_no << ": " << what;
    throw Error(ErrorKind::ParseError, os.str());
  };

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorKind::EmptyCohort, "cohort file is empty");
  if (!header.front().empty() && header.front().rfind("\xEF\xBB\xBF", 0) == 0)
    header.front().erase(0, 3);
  if (header.size() < 2 || header[0] != "patient_id" || header[1] != "time") {
    parse_error("header must start with patient_id,time");
  }

  // column -> feature index
  std::vector<std::size_t> column_feature;
  std::vector<bool> seen(binning.size(), false);
  for (std::size_t c = 2; c < header.size(); ++c) {
    std::size_t d = 0;
    try {
      d = binning.index_of(header[c]);
    } catch (const Error&) {
      throw Error(ErrorKind::UnknownColumn, "column '" + header[c] + "' is not a configured feature");
    }
    if (seen[d]) parse_error("column '" + header[c] + "' appears twice");
    seen[d] = true;
    column_feature.push_back(d);
  }
  for (std::size_t d = 0; d < binning.size(); ++d)
    if (!seen[d]) parse_error("missing column for feature '" + binning[d].name + "'");

  struct Row {
    double time;
    ObservationVector obs;
    std::size_t line;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<Row>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << "expected " << header.size() << " fields, found " << fields.size();
      parse_error(os.str());
    }
    if (fields[0].empty()) parse_error("empty patient_id");
    const auto time = parse_double(fields[1]);
    if (!time || !std::isfinite(*time)) parse_error("invalid time '" + fields[1] + "'");
    ObservationVector obs(binning.size(), kMissing);
    for (std::size_t c = 2; c < fields.size(); ++c) {
      if (fields[c].empty()) continue;
      const auto value = parse_double(fields[c]);
      if (!value) parse_error("invalid value '" + fields[c] + "' in column '" + header[c] + "'");
      const std::size_t d = column_feature[c - 2];
      obs[d] = binning.discretize(*value, d);
    }
    auto [it, inserted] = rows.try_emplace(fields[0]);
    if (inserted) order.push_back(fields[0]);
    it->second.push_back({*time, std::move(obs), line_no});
  }
  if (order.empty()) throw Error(ErrorKind::EmptyCohort, "cohort file has no records");

  std::vector<Trajectory> cohort;
  cohort.reserve(order.size());
  for (const auto& id : order) {
    auto& patient_rows = rows[id];
    std::stable_sort(patient_rows.begin(), patient_rows.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    Trajectory traj;
    traj.id = id;
    for (std::size_t i = 0; i < patient_rows.size(); ++i) {
      if (i > 0 && patient_rows[i].time == patient_rows[i - 1].time) {
        std::ostringstream os;
        os << "patient '" << id << "' has two records at time " << patient_rows[i].time
           << " (lines " << patient_rows[i - 1].line << " and " << patient_rows[i].line << ")";
        throw Error(ErrorKind::DuplicateTimestamp, os.str());
      }
      traj.times.push_back(patient_rows[i].time);
      traj.observations.push_back(std::move(patient_rows[i].obs));
    }
    cohort.push_back(std::move(traj));
  }
  return cohort;
}

std::vector<Trajectory> load_cohort(const std::string& path, const BinningScheme& binning) {
  auto in = open_in(path);
  return read_cohort(in, binning);
}

void write_cohort(std::ostream& out, const std::vector<Trajectory>& cohort,
                  const BinningScheme& binning) {
  out << "patient_id,time";
  for (const auto& f : binning.features()) out << ',' << f.name;
  out << '\n';
  for (const auto& traj : cohort) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      out << traj.id << ',' << format_double(traj.times[i]);
      for (std::size_t d = 0; d < binning.size(); ++d) {
        out << ',';
        const int bin = traj.observations[i][d];
        if (bin == kMissing) continue;
        const auto& f = binning[d];
        out << format_double(f.representative(bin));
      }
      out << '\n';
    }
  }
}

void save_cohort(const std::string& path, const std::vector<Trajectory>& cohort,
                 const BinningScheme& binning) {
  auto out = open_out(path);
  write_cohort(out, cohort, binning);
}

void save_truth(const std::string& path, const SyntheticCohort& cohort) {
  auto out = open_out(path);
  out << "patient_id,subtype,time,state\n";
  for (std::size_t n = 0; n < cohort.trajectories.size(); ++n) {
    const auto& traj = cohort.trajectories[n];
    for (std::size_t i = 0; i < traj.size(); ++i) {
      out << traj.id << ',' << cohort.labels[n] << ',' << format_double(traj.times[i]) << ','
          << cohort.hidden_states[n][i] << '\n';
    }
  }
}

std::map<std::string, int> load_truth_labels(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::map<std::string, int> labels;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || trim(line).empty()) continue;
    const auto fields = split_csv(line);
    int label = 0;
    if (fields.size() < 2 ||
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), label).ec != std::errc()) {
      std::ostringstream os;
      os << "truth file line " << line_no << " is malformed";
      throw Error(ErrorKind::ParseError, os.str());
    }
    labels[fields[0]] = label;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Model files
//
//   cthmm-mixture-model
//   version 1
//   subtypes M states K features D
//   bounds q_min q_max
//   feature <name> <lower> <upper> <bins>      (D lines)
//   prior p_0 .. p_{M-1}
//   subtype m                                   (M blocks)
//     initial pi_0 .. pi_{K-1}
//     mask <K*K 0/1>
//     rates <K*K row-major>
//     emission k d w_0 .. w_{J-1}               (K*D lines)
//   assignments N a_0 ..
//   objective T v_0 ..
//   end

void write_model(std::ostream& out, const MixtureModel& mixture, RateBounds bounds) {
  validate_mixture(mixture);
  const int k = mixture.states();
  const auto& layout = mixture.subtypes.front().emissions;
  out << "cthmm-mixture-model\n";
  out << "version " << kModelFormatVersion << '\n';
  out << "subtypes " << mixture.size() << " states " << k << " features " << layout.features() << '\n';
  out << "bounds " << format_double(bounds.q_min) << ' ' << format_double(bounds.q_max) << '\n';
  for (int d = 0; d < layout.features(); ++d) {
    if (mixture.binning.size() == static_cast<std::size_t>(layout.features())) {
      const auto& f = mixture.binning[static_cast<std::size_t>(d)];
      out << "feature " << f.name << ' ' << format_double(f.lower) << ' ' << format_double(f.upper)
          << ' ' << f.bins << '\n';
    } else {
      out << "feature f" << d << " 0 1 " << layout.bins(d) << '\n';
    }
  }
  out << "prior";
  for (int m = 0; m < mixture.size(); ++m) out << ' ' << format_double(mixture.prior(m));
  out << '\n';
  for (int m = 0; m < mixture.size(); ++m) {
    const auto& model = mixture.subtypes[static_cast<std::size_t>(m)];
    out << "subtype " << m << '\n';
    out << "initial";
    for (int a = 0; a < k; ++a) out << ' ' << format_double(model.initial(a));
    out << "\nmask";
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) out << ' ' << (model.generator.mask()(a, b) ? 1 : 0);
    out << "\nrates";
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) out << ' ' << format_double(model.generator(a, b));
    out << '\n';
    for (int s = 0; s < k; ++s) {
      for (int d = 0; d < model.emissions.features(); ++d) {
        out << "emission " << s << ' ' << d;
        for (double p : model.emissions.row(s, d)) out << ' ' << format_double(p);
        out << '\n';
      }
    }
  }
  out << "assignments " << mixture.assignments.size();
  for (int a : mixture.assignments) out << ' ' << a;
  out << "\nobjective " << mixture.objective_trace.size();
  for (double v : mixture.objective_trace) out << ' ' << format_double(v);
  out << "\nend\n";
}

void save_model(const MixtureModel& mixture, const std::string& path, RateBounds bounds) {
  auto out = open_out(path);
  write_model(out, mixture, bounds);
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "model file line " << line_no_ << ": " << what;
    throw Error(ErrorKind::InvariantViolation, os.str());
  }

  // Next non-empty line, split into tokens; the first must equal `keyword`.
  std::vector<std::string> expect(const std::string& keyword) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string t; ss >> t;) tokens.push_back(std::move(t));
      if (tokens.empty()) continue;
      if (tokens.front() != keyword) fail("expected '" + keyword + "', found '" + tokens.front() + "'");
      tokens.erase(tokens.begin());
      return tokens;
    }
    fail("unexpected end of file, expected '" + keyword + "'");
  }

  double number(const std::string& token) const {
    const auto v = parse_double(token);
    if (!v) fail("'" + token + "' is not a number");
    return *v;
  }

  long long integer(const std::string& token) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) fail("'" + token + "' is not an integer");
    return v;
  }

  void count(const std::vector<std::string>& tokens, std::size_t n, const char* what) const {
    if (tokens.size() != n) {
      std::ostringstream os;
      os << what << " has " << tokens.size() << " values, expected " << n;
      fail(os.str());
    }
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

MixtureModel read_model(std::istream& in) {
  ModelReader r(in);
  r.expect("cthmm-mixture-model");
  const auto version = r.expect("version");
  r.count(version, 1, "version");
  if (version[0] != std::to_string(kModelFormatVersion)) {
    std::ostringstream os;
    os << "model file has format version " << version[0] << ", this build reads version "
       << kModelFormatVersion;
    throw Error(ErrorKind::VersionMismatch, os.str());
  }
  const auto dims = r.expect("subtypes");
  if (dims.size() != 5 || dims[1] != "states" || dims[3] != "features") r.fail("malformed dimension line");
  const long long m_count = r.integer(dims[0]);
  const long long k = r.integer(dims[2]);
  const long long d_count = r.integer(dims[4]);
  if (m_count < 1 || k < 1 || d_count < 1 || m_count > 10000 || k > 1000 || d_count > 10000) {
    r.fail("dimensions out of range");
  }
  const auto bounds_tokens = r.expect("bounds");
  r.count(bounds_tokens, 2, "bounds");
  const RateBounds bounds{r.number(bounds_tokens[0]), r.number(bounds_tokens[1])};
  if (!(bounds.q_min > 0.0 && bounds.q_min <= bounds.q_max)) r.fail("invalid rate bounds");

  std::vector<FeatureBinning> features;
  for (long long d = 0; d < d_count; ++d) {
    const auto t = r.expect("feature");
    r.count(t, 4, "feature");
    const long long bins = r.integer(t[3]);
    if (bins < 2 || bins > 100000) r.fail("feature bin count out of range");
    features.push_back({t[0], r.number(t[1]), r.number(t[2]), static_cast<int>(bins)});
  }

  MixtureModel mixture;
  try {
    mixture.binning = BinningScheme(features);
  } catch (const Error& e) {
    r.fail(e.detail());
  }
  const auto bins = mixture.binning.bin_counts();

  const auto prior = r.expect("prior");
  r.count(prior, static_cast<std::size_t>(m_count), "prior");
  mixture.prior.resize(m_count);
  for (long long m = 0; m < m_count; ++m) mixture.prior(m) = r.number(prior[static_cast<std::size_t>(m)]);

  const auto kk = static_cast<std::size_t>(k * k);
  for (long long m = 0; m < m_count; ++m) {
    const auto header = r.expect("subtype");
    if (header.size() != 1 || r.integer(header[0]) != m) r.fail("subtype blocks out of order");
    const auto init = r.expect("initial");
    r.count(init, static_cast<std::size_t>(k), "initial");
    Eigen::VectorXd pi(k);
    for (long long a = 0; a < k; ++a) pi(a) = r.number(init[static_cast<std::size_t>(a)]);

    const auto mask_tokens = r.expect("mask");
    r.count(mask_tokens, kk, "mask");
    StructureMask mask(k, k);
    for (std::size_t i = 0; i < kk; ++i) {
      if (mask_tokens[i] != "0" && mask_tokens[i] != "1") r.fail("mask entries must be 0 or 1");
      mask(static_cast<Eigen::Index>(i) / k, static_cast<Eigen::Index>(i) % k) = mask_tokens[i] == "1";
    }
    for (long long a = 0; a < k; ++a)
      if (mask(a, a)) r.fail("mask diagonal must be 0");

    const auto rate_tokens = r.expect("rates");
    r.count(rate_tokens, kk, "rates");
    Eigen::MatrixXd raw(k, k);
    for (std::size_t i = 0; i < kk; ++i)
      raw(static_cast<Eigen::Index>(i) / k, static_cast<Eigen::Index>(i) % k) = r.number(rate_tokens[i]);

    std::optional<GeneratorMatrix> generator;
    try {
      generator = GeneratorMatrix::validate(raw, mask, bounds);
    } catch (const Error& e) {
      r.fail(e.detail());
    }
    for (long long a = 0; a < k; ++a) {
      for (long long b = 0; b < k; ++b) {
        if (a != b && !mask(a, b) && raw(a, b) != 0.0) r.fail("masked-out rate is nonzero");
      }
    }
    if (!same_entries(generator->rates(), raw)) {
      r.fail("rates break generator invariants (bounds or zero row sums)");
    }

    EmissionTable w(static_cast<int>(k), bins);
    for (long long s = 0; s < k; ++s) {
      for (long long d = 0; d < d_count; ++d) {
        const auto t = r.expect("emission");
        r.count(t, 2 + static_cast<std::size_t>(bins[static_cast<std::size_t>(d)]), "emission");
        if (r.integer(t[0]) != s || r.integer(t[1]) != d) r.fail("emission rows out of order");
        for (int j = 0; j < bins[static_cast<std::size_t>(d)]; ++j)
          w(static_cast<int>(s), static_cast<int>(d), j) = r.number(t[2 + static_cast<std::size_t>(j)]);
      }
    }
    mixture.subtypes.push_back({std::move(pi), std::move(*generator), std::move(w)});
  }

  const auto assignments = r.expect("assignments");
  if (assignments.empty()) r.fail("assignments line lacks a count");
  const long long n = r.integer(assignments[0]);
  if (n < 0) r.fail("negative assignment count");
  r.count(assignments, static_cast<std::size_t>(n) + 1, "assignments");
  for (long long i = 0; i < n; ++i)
    mixture.assignments.push_back(static_cast<int>(r.integer(assignments[static_cast<std::size_t>(i) + 1])));

  const auto objective = r.expect("objective");
  if (objective.empty()) r.fail("objective line lacks a count");
  const long long t = r.integer(objective[0]);
  if (t < 0) r.fail("negative objective count");
  r.count(objective, static_cast<std::size_t>(t) + 1, "objective");
  for (long long i = 0; i < t; ++i)
    mixture.objective_trace.push_back(r.number(objective[static_cast<std::size_t>(i) + 1]));
  r.expect("end");

  try {
    validate_mixture(mixture);
  } catch (const Error& e) {
    r.fail(e.detail());
  }
  return mixture;
}

MixtureModel load_model(const std::string& path) {
  auto in = open_in(path);
  return read_model(in);
}

}  // namespace cthmm
