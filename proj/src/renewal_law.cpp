#include "pinlab/renewal_law.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pinlab/errors.hpp"
#include "pinlab/logspace.hpp"

namespace pinlab {

namespace {

// Euler-Maclaurin remainder: sum_{l >= N} l^{-s}.  Good to ~1e-15 relative
// for N >= 64 and s in (1, 4].
double em_power_tail(double n0, double s) {
  const double f = std::pow(n0, -s);
  double tail = std::pow(n0, 1.0 - s) / (s - 1.0);
  tail += 0.5 * f;
  tail += s * f / (12.0 * n0);
  tail -= s * (s + 1.0) * (s + 2.0) * f / (720.0 * n0 * n0 * n0);
  tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * f /
          (30240.0 * std::pow(n0, 5.0));
  return tail;
}

// sum_{l=N}^{infinity} l^{-s}, summing explicitly up to at least 1e5 terms
// when N is too small for the remainder expansion alone.
double power_tail_from(int n0, double s) {
  if (n0 >= 64) return em_power_tail(static_cast<double>(n0), s);
  const int n1 = 100000;
  double sum = 0.0, comp = 0.0;
  for (int l = n1 - 1; l >= n0; --l)
    detail::kahan_add(sum, comp, std::pow(static_cast<double>(l), -s));
  return sum + comp + em_power_tail(static_cast<double>(n1), s);
}

void finalize_tables(RenewalLaw& law) {
  const int t = static_cast<int>(law.tail_table.size()) - 2;
  law.mass_table = Eigen::ArrayXd::Zero(t + 1);
  for (int m = 1; m <= t; ++m)
    law.mass_table[m] = law.tail_table[m] - law.tail_table[m + 1];

  law.log_mass_table = Eigen::ArrayXd::Constant(t + 1, kLogZero);
  law.log_tail_table = Eigen::ArrayXd::Constant(t + 2, kLogZero);
  for (int m = 1; m <= t; ++m)
    if (law.mass_table[m] > 0.0)
      law.log_mass_table[m] = std::log(law.mass_table[m]);
  for (int m = 1; m <= t + 1; ++m)
    if (law.tail_table[m] > 0.0)
      law.log_tail_table[m] = std::log(law.tail_table[m]);

  Fnv1a f;
  f.update_u64(static_cast<uint64_t>(law.family));
  f.update_double(law.param);
  f.update_u64(static_cast<uint64_t>(t));
  for (int m = 1; m <= t; ++m) f.update_double(law.mass_table[m]);
  law.checksum = f.digest();
}

}  // namespace

std::string family_name(LawFamily f) {
  switch (f) {
    case LawFamily::PowerLaw: return "powerlaw";
    case LawFamily::SimpleRandomWalkReturn: return "srw";
    case LawFamily::Geometric: return "geometric";
  }
  return "?";
}

std::string RenewalLaw::spec_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (family) {
    case LawFamily::PowerLaw: os << "powerlaw:alpha=" << param; break;
    case LawFamily::SimpleRandomWalkReturn: os << "srw"; break;
    case LawFamily::Geometric: os << "geometric:p=" << param; break;
  }
  return os.str();
}

double zeta_partial(double s) {
  if (!(s > 1.0)) throw ConfigError("zeta_partial requires s > 1");
  const int n0 = 100000;
  double sum = 0.0, comp = 0.0;
  for (int n = n0; n >= 1; --n)
    detail::kahan_add(sum, comp, std::pow(static_cast<double>(n), -s));
  return sum + comp + em_power_tail(static_cast<double>(n0 + 1), s);
}

RenewalLaw build_law(LawFamily family, double param, int n_table) {
  if (n_table < 2) throw ConfigError("n_table must be at least 2");
  RenewalLaw law;
  law.family = family;
  law.param = param;
  const int t = n_table;
  law.tail_table = Eigen::ArrayXd::Zero(t + 2);
  law.tail_table[0] = 1.0;  // bar K(0) = 1, unused by the accessors

  switch (family) {
    case LawFamily::PowerLaw: {
      if (!(param > 0.0) || !std::isfinite(param))
        throw ConfigError("PowerLaw requires alpha > 0");
      law.alpha = param;
      const double s = 1.0 + param;
      // Unnormalized tails, accumulated backwards with compensation so the
      // whole table is consistent with one pass.
      Eigen::ArrayXd utail(t + 2);
      double sum = power_tail_from(t + 1, s);
      double comp = 0.0;
      utail[t + 1] = sum;
      for (int m = t; m >= 1; --m) {
        detail::kahan_add(sum, comp, std::pow(static_cast<double>(m), -s));
        utail[m] = sum + comp;
      }
      const double zeta = utail[1];
      for (int m = 1; m <= t + 1; ++m) law.tail_table[m] = utail[m] / zeta;
      break;
    }
    case LawFamily::SimpleRandomWalkReturn: {
      law.alpha = 0.5;
      law.param = 0.0;
      // u_{2k} = P(S_{2k} = 0) = C(2k,k) 2^{-2k};  bar K(m) = u_{2 floor((m-1)/2)}.
      const int kmax = t / 2 + 1;
      Eigen::ArrayXd u2(kmax + 1);
      u2[0] = 1.0;
      for (int k = 1; k <= kmax; ++k)
        u2[k] = u2[k - 1] * (2.0 * k - 1.0) / (2.0 * k);
      for (int m = 1; m <= t + 1; ++m) law.tail_table[m] = u2[(m - 1) / 2];
      break;
    }
    case LawFamily::Geometric: {
      if (!(param > 1e-9) || !(param < 1.0 - 1e-9))
        throw ConfigError("Geometric requires p in (0, 1)");
      law.alpha = std::numeric_limits<double>::infinity();
      const double logq = std::log1p(-param);
      for (int m = 1; m <= t + 1; ++m)
        law.tail_table[m] = std::exp(static_cast<double>(m - 1) * logq);
      break;
    }
  }

  finalize_tables(law);
  return law;
}

RenewalLaw parse_law_spec(const std::string& spec, int n_table) {
  std::string s = spec;
  for (auto& c : s) c = static_cast<char>(std::tolower(c));
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (const auto eq = arg.find('='); eq != std::string::npos)
    arg = arg.substr(eq + 1);

  auto need_value = [&](const char* fam) {
    if (arg.empty())
      throw ConfigError(std::string(fam) + " law spec needs a parameter, e.g. \"" +
                        fam + ":0.5\"");
    try {
      return std::stod(arg);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse law parameter '" + arg + "'");
    }
  };

  if (name == "powerlaw")
    return build_law(LawFamily::PowerLaw, need_value("powerlaw"), n_table);
  if (name == "srw" || name == "simplerandomwalkreturn")
    return build_law(LawFamily::SimpleRandomWalkReturn, 0.0, n_table);
  if (name == "geometric")
    return build_law(LawFamily::Geometric, need_value("geometric"), n_table);
  throw ConfigError("unknown law family '" + name + "'");
}

double mass(const RenewalLaw& law, int n) {
  if (n < 1 || n > law.n_table())
    throw ConfigError("mass: n out of table range");
  return law.mass_table[n];
}

double tail(const RenewalLaw& law, int m) {
  if (m < 1 || m > law.n_table() + 1)
    throw ConfigError("tail: m out of table range");
  return law.tail_table[m];
}

double log_mass(const RenewalLaw& law, int n) {
  if (n < 1 || n > law.n_table())
    throw ConfigError("log_mass: n out of table range");
  return law.log_mass_table[n];
}

double log_tail(const RenewalLaw& law, int m) {
  if (m < 1 || m > law.n_table() + 1)
    throw ConfigError("log_tail: m out of table range");
  return law.log_tail_table[m];
}

int64_t sample_gap(const RenewalLaw& law, Xoshiro256pp& rng) {
  const int t = law.n_table();
  const double r = 1.0 - rng.next_unit();  // in (0, 1]
  // Smallest g with bar K(g+1) < r, i.e. CDF(g) > 1 - r.
  if (law.tail_table[t + 1] < r) {
    int lo = 1, hi = t;  // g range; tail_table[g+1] indexed g+1
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (law.tail_table[mid + 1] < r)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

  // Beyond-table fallback via the family's analytic tail.
  const double rc = r / law.tail_table[t + 1];  // conditional residual, (0, 1]
  double g = 0.0;
  switch (law.family) {
    case LawFamily::Geometric: {
      const double logq = std::log1p(-law.param);
      g = static_cast<double>(t) + std::floor(std::log(rc) / logq) + 1.0;
      break;
    }
    case LawFamily::PowerLaw:
      // bar K(m) ~ c m^{-alpha}: asymptotic inversion of the conditional tail.
      g = std::ceil((t + 1) * std::pow(rc, -1.0 / law.alpha)) - 1.0;
      break;
    case LawFamily::SimpleRandomWalkReturn:
      g = std::ceil((t + 1) * std::pow(rc, -2.0));
      if (static_cast<int64_t>(g) % 2 != 0) g += 1.0;  // gaps are even
      break;
  }
  g = std::max(g, static_cast<double>(t + 1));
  g = std::min(g, 0x1.0p40);  // astronomically deep tails clamp here
  return static_cast<int64_t>(g);
}

void save_law_record(const RenewalLaw& law, const std::filesystem::path& path) {
  nlohmann::json j;
  j["family"] = family_name(law.family);
  j["param"] = law.param;
  j["alpha"] = std::isfinite(law.alpha) ? nlohmann::json(law.alpha)
                                        : nlohmann::json(nullptr);
  j["n_table"] = law.n_table();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(law.checksum));
  j["mass_checksum"] = buf;
  std::ofstream os(path);
  if (!os) throw DataFormatError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << "\n";
}

RenewalLaw load_law_record(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataFormatError("cannot open " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw DataFormatError("malformed law record: " + std::string(e.what()));
  }
  const std::string fam = j.at("family").get<std::string>();
  const double param = j.at("param").get<double>();
  const int n_table = j.at("n_table").get<int>();
  LawFamily family;
  if (fam == "powerlaw")
    family = LawFamily::PowerLaw;
  else if (fam == "srw")
    family = LawFamily::SimpleRandomWalkReturn;
  else if (fam == "geometric")
    family = LawFamily::Geometric;
  else
    throw DataFormatError("unknown family in law record: " + fam);
  RenewalLaw law = build_law(family, param, n_table);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(law.checksum));
  if (j.contains("mass_checksum") &&
      j.at("mass_checksum").get<std::string>() != buf)
    throw DataFormatError("law record checksum mismatch: tables do not "
                          "reproduce the recorded masses");
  return law;
}

}  // namespace pinlab
