#include "eikfm/survey_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "eikfm/errors.hpp"
#include "eikfm/field_io.hpp"

namespace eikfm {

namespace {

constexpr std::string_view kSurveyMagic = "EIKSURV";
constexpr std::string_view kFieldMagic = "EIKFIELD";

}  // namespace

void write_survey(std::ostream& os, const Survey& survey) {
  survey.validate();
  std::string header = field_header(survey.grid);
  header.replace(0, kFieldMagic.size(), kSurveyMagic);
  os << header << ' ' << survey.sources.size() << ' ' << survey.receivers.size()
     << '\n';
  std::vector<std::int64_t> src;
  src.reserve(survey.sources.size());
  for (const auto& s : survey.sources) src.push_back(survey.grid.linearize(s.index));
  write_le_int64(os, src);
  const std::vector<std::int64_t> rec(survey.receivers.begin(), survey.receivers.end());
  write_le_int64(os, rec);
  write_le_doubles(os, survey.d_obs.values);
}

Survey read_survey(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind(kSurveyMagic, 0) != 0 ||
      (line.size() > kSurveyMagic.size() && line[kSurveyMagic.size()] != ' ')) {
    throw DomainError("not an EIKSURV header");
  }
  std::string as_field = line;
  as_field.replace(0, kSurveyMagic.size(), kFieldMagic);
  Survey s;
  s.grid = parse_field_header(as_field);

  std::istringstream tokens(line);
  std::vector<std::string> words;
  for (std::string w; tokens >> w;) words.push_back(w);
  const std::size_t expected = 3 + 2 * static_cast<std::size_t>(s.grid.dim()) + 1 + 2;
  if (words.size() != expected) throw DomainError("EIKSURV: malformed header");
  long long ns = -1, nr = -1;
  try {
    ns = std::stoll(words[expected - 2]);
    nr = std::stoll(words[expected - 1]);
  } catch (const std::exception&) {
    throw DomainError("EIKSURV: bad source/receiver counts");
  }
  if (ns < 0 || nr < 0) throw DomainError("EIKSURV: bad source/receiver counts");

  std::vector<std::int64_t> src(static_cast<std::size_t>(ns));
  std::vector<std::int64_t> rec(static_cast<std::size_t>(nr));
  read_le_int64(is, src);
  read_le_int64(is, rec);
  for (std::int64_t k : src) {
    if (k < 0 || k >= s.grid.size()) throw DomainError("survey: source off-grid");
    s.sources.push_back({s.grid.delinearize(k)});
  }
  s.receivers.assign(rec.begin(), rec.end());
  s.d_obs = DataMatrix(static_cast<std::size_t>(ns), static_cast<std::size_t>(nr));
  read_le_doubles(is, s.d_obs.values);
  s.validate();
  return s;
}

void write_survey(const std::filesystem::path& path, const Survey& survey) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open '" + path.string() + "' for writing");
  write_survey(os, survey);
}

Survey read_survey(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open '" + path.string() + "'");
  return read_survey(is);
}

InversionConfig parse_inversion_config(const std::string& text,
                                       const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("inversion config: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("inversion config: expected a JSON object");

  static const std::set<std::string> known = {
      "alpha", "n_gn",  "n_cg",   "ls_factor", "ls_max",
      "armijo", "m_low", "m_high", "order",     "enforce_monotonicity",
      "m_ref"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw DomainError("inversion config: unknown key '" + item.key() + "'");
    }
  }

  InversionConfig cfg;
  try {
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.n_gn = j.value("n_gn", cfg.n_gn);
    cfg.n_cg = j.value("n_cg", cfg.n_cg);
    cfg.ls_factor = j.value("ls_factor", cfg.ls_factor);
    cfg.ls_max = j.value("ls_max", cfg.ls_max);
    cfg.armijo = j.value("armijo", cfg.armijo);
    cfg.bound.low = j.value("m_low", cfg.bound.low);
    cfg.bound.high = j.value("m_high", cfg.bound.high);
    cfg.fm.order = j.value("order", cfg.fm.order);
    cfg.fm.enforce_monotonicity =
        j.value("enforce_monotonicity", cfg.fm.enforce_monotonicity);
    if (j.contains("m_ref")) {
      std::filesystem::path p = j.at("m_ref").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.m_ref = read_field(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("inversion config: ") + e.what());
  }
  if (cfg.fm.order != 1 && cfg.fm.order != 2) {
    throw DomainError("inversion config: order must be 1 or 2");
  }
  cfg.validate();
  return cfg;
}

InversionConfig read_inversion_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_inversion_config(buf.str(), path.parent_path());
}

void write_data_csv(std::ostream& os, const DataMatrix& data) {
  os << "source";
  for (std::size_t r = 0; r < data.receivers; ++r) os << ",r" << r;
  os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t s = 0; s < data.sources; ++s) {
    os << s;
    for (std::size_t r = 0; r < data.receivers; ++r) os << ',' << data(s, r);
    os << '\n';
  }
}

DataMatrix read_data_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("source", 0) != 0) {
    throw DomainError("data CSV: missing header");
  }
  std::size_t nr = 0;
  for (char c : line) nr += (c == ',');
  DataMatrix out;
  out.receivers = nr;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (std::stoull(cell) != out.sources) throw DomainError("data CSV: rows out of order");
    std::size_t count = 0;
    while (std::getline(row, cell, ',')) {
      out.values.push_back(std::stod(cell));
      ++count;
    }
    if (count != nr) throw DomainError("data CSV: ragged row");
    ++out.sources;
  }
  return out;
}

}  // namespace eikfm
