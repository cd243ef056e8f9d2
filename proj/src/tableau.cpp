#include "relaxlab/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace relax {

double ConditionReport::maxResidual() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.residual);
  return m;
}

bool ConditionReport::allPass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

const ConditionEntry& ConditionReport::find(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw Error(ErrorCode::InvalidArgument, "no condition named " + id);
}

namespace {

constexpr double kStructureTol = 1e-14;

std::vector<double> row_sums(const RealMatrix& m, bool include_diagonal) {
  std::vector<double> c(m.rows(), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    int last = include_diagonal ? i : i - 1;
    for (int j = 0; j <= last; ++j) acc += m(i, j);
    c[i] = acc;
  }
  return c;
}

}  // namespace

Tableau new_tableau(const RealMatrix& Hexp, const RealMatrix& Himp,
                    const std::vector<double>& bexp, const std::vector<double>& bimp) {
  int s = Hexp.rows();
  if (s < 1) throw Error(ErrorCode::ShapeMismatch, "tableau needs at least one stage");
  if (!Hexp.square() || !Himp.square() || Himp.rows() != s ||
      static_cast<int>(bexp.size()) != s || static_cast<int>(bimp.size()) != s)
    throw Error(ErrorCode::ShapeMismatch, "tableau blocks must all be s x s / length s");

  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j)
      if (std::abs(Hexp(i, j)) > kStructureTol)
        throw Error(ErrorCode::StructureViolation,
                    "explicit matrix must be strictly lower triangular");
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j)
      if (std::abs(Himp(i, j)) > kStructureTol)
        throw Error(ErrorCode::StructureViolation,
                    "implicit matrix must be lower triangular");
    if (Himp(i, i) < 0.0)
      throw Error(ErrorCode::StructureViolation,
                  "implicit diagonal entries must be non-negative");
  }

  Tableau t;
  t.s = s;
  t.Hexp = Hexp;
  t.Himp = Himp;
  t.bexp = bexp;
  t.bimp = bimp;
  t.cexp = row_sums(Hexp, false);
  t.cimp = row_sums(Himp, true);
  return t;
}

Classification classify(const Tableau& t) {
  Classification cl;
  int s = t.s;

  bool first_row_zero = true;
  for (int j = 0; j < s; ++j)
    if (std::abs(t.Himp(0, j)) > kStructureTol) first_row_zero = false;

  bool hat_invertible = false;
  if (s >= 2 && first_row_zero) {
    // lower-right (s-1)x(s-1) block, lower triangular: det is the diagonal product
    double det = 1.0, scale = 1.0;
    for (int i = 1; i < s; ++i) {
      det *= t.Himp(i, i);
      scale *= std::max(std::abs(t.Himp(i, i)), 1.0);
    }
    hat_invertible = std::abs(det) > 1e-12 * scale;
  }
  cl.isCK = first_row_zero && hat_invertible;

  bool first_col_zero = true;
  for (int i = 1; i < s; ++i)
    if (std::abs(t.Himp(i, 0)) > kStructureTol) first_col_zero = false;
  cl.isARS = cl.isCK && first_col_zero && std::abs(t.bimp[0]) <= kStructureTol;

  cl.isISA = true;
  for (int j = 0; j < s; ++j)
    if (std::abs(t.Himp(s - 1, j) - t.bimp[j]) > kStructureTol) cl.isISA = false;

  cl.isGSA = cl.isISA;
  for (int j = 0; j < s; ++j)
    if (std::abs(t.Hexp(s - 1, j) - t.bexp[j]) > kStructureTol) cl.isGSA = false;

  cl.cMatched = true;
  double cscale = 1.0;
  for (int i = 0; i < s; ++i) cscale = std::max(cscale, std::abs(t.cimp[i]));
  for (int i = 0; i < s; ++i)
    if (std::abs(t.cexp[i] - t.cimp[i]) > kConditionTol * cscale) cl.cMatched = false;

  return cl;
}

ConditionReport order_residuals(const Tableau& t, int p) {
  if (p < 1 || p > 3)
    throw Error(ErrorCode::InvalidArgument, "order_residuals: p must be 1, 2 or 3");
  int s = t.s;
  const auto& bt = t.bexp;
  const auto& b = t.bimp;
  const auto& ct = t.cexp;
  const auto& c = t.cimp;

  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (int i = 0; i < s; ++i) acc += x[i] * y[i];
    return acc;
  };
  auto quad = [&](const std::vector<double>& w, const RealMatrix& m,
                  const std::vector<double>& v) {
    double acc = 0.0;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) acc += w[i] * m(i, j) * v[j];
    return acc;
  };
  auto triple = [&](const std::vector<double>& w, const std::vector<double>& x,
                    const std::vector<double>& y) {
    double acc = 0.0;
    for (int i = 0; i < s; ++i) acc += w[i] * x[i] * y[i];
    return acc;
  };

  ConditionReport rep;
  auto add = [&](const std::string& id, double value, double target) {
    double res = std::abs(value - target);
    rep.entries.push_back({id, res, target, res < kConditionTol});
  };

  std::vector<double> ones(s, 1.0);
  add("sum_bt = 1", dot(bt, ones), 1.0);
  add("sum_b = 1", dot(b, ones), 1.0);
  if (p >= 2) {
    add("sum_bt_ct = 1/2", dot(bt, ct), 0.5);
    add("sum_b_c = 1/2", dot(b, c), 0.5);
    add("sum_bt_c = 1/2", dot(bt, c), 0.5);
    add("sum_b_ct = 1/2", dot(b, ct), 0.5);
  }
  if (p >= 3) {
    add("sum_bt_Ht_ct = 1/6", quad(bt, t.Hexp, ct), 1.0 / 6.0);
    add("sum_b_H_c = 1/6", quad(b, t.Himp, c), 1.0 / 6.0);
    add("sum_bt_ct_ct = 1/3", triple(bt, ct, ct), 1.0 / 3.0);
    add("sum_b_c_c = 1/3", triple(b, c, c), 1.0 / 3.0);
    add("sum_bt_Ht_c = 1/6", quad(bt, t.Hexp, c), 1.0 / 6.0);
    add("sum_bt_H_ct = 1/6", quad(bt, t.Himp, ct), 1.0 / 6.0);
    add("sum_bt_H_c = 1/6", quad(bt, t.Himp, c), 1.0 / 6.0);
    add("sum_b_Ht_c = 1/6", quad(b, t.Hexp, c), 1.0 / 6.0);
    add("sum_b_H_ct = 1/6", quad(b, t.Himp, ct), 1.0 / 6.0);
    add("sum_b_Ht_ct = 1/6", quad(b, t.Hexp, ct), 1.0 / 6.0);
    add("sum_bt_c_c = 1/3", triple(bt, c, c), 1.0 / 3.0);
    add("sum_bt_ct_c = 1/3", triple(bt, ct, c), 1.0 / 3.0);
    add("sum_b_ct_ct = 1/3", triple(b, ct, ct), 1.0 / 3.0);
    add("sum_b_ct_c = 1/3", triple(b, ct, c), 1.0 / 3.0);
  }
  return rep;
}

ConditionReport stage_conditions(const Tableau& t) {
  if (t.s < 3)
    throw Error(ErrorCode::TooFewStages, "stage conditions need at least 3 stages");
  int s = t.s;
  const auto& c = t.cimp;

  ConditionReport rep;
  auto add = [&](const std::string& id, double res) {
    rep.entries.push_back({id, res, 0.0, res < kConditionTol});
  };

  for (int i = 2; i < s; ++i) {
    double target = 0.5 * c[i] * c[i];
    double exp_sum = 0.0, imp_sum = 0.0;
    for (int j = 0; j < i; ++j) exp_sum += t.Hexp(i, j) * c[j];
    for (int j = 0; j <= i; ++j) imp_sum += t.Himp(i, j) * c[j];
    add("stage_exp_" + std::to_string(i + 1), std::abs(target - exp_sum));
    add("stage_imp_" + std::to_string(i + 1), std::abs(target - imp_sum));
  }

  add("vanish_bt2", std::abs(t.bexp[1]));
  double h2 = 0.0;
  for (int i = 2; i < s; ++i) h2 = std::max(h2, std::abs(t.Himp(i, 1)));
  add("vanish_h_i2", h2);
  return rep;
}

RealMatrix mstar(const RealMatrix& m) {
  if (!m.square() || m.rows() < 2)
    throw Error(ErrorCode::ShapeMismatch, "mstar: M must be square with s >= 2");
  int s = m.rows();
  RealMatrix l(s, s);
  for (int i = 1; i < s; ++i) {
    l(i, 0) = -1.0;
    l(i, i) = 1.0;
  }
  RealMatrix out = m * l;
  out(0, 0) += 1.0;
  out(s - 1, s - 1) -= 1.0;
  return out;
}

MCheckReport check_M(const Tableau& t, const MCertificate& cert) {
  if (!cert.M.square() || cert.M.rows() != t.s)
    throw Error(ErrorCode::ShapeMismatch, "check_M: M must match the tableau stages");

  MCheckReport rep;
  RealMatrix mh = cert.M * t.Himp;
  RealMatrix sym1 = mh + mh.transposed();
  rep.m1Eigen = sym_eigen(sym1);
  PsdResult p1 = is_psd(sym1, cert.tol);
  rep.m1Pass = p1.psd && p1.positiveRank == t.s - 1;

  RealMatrix ms = mstar(cert.M);
  RealMatrix sym2 = ms + ms.transposed();
  rep.m2Eigen = sym_eigen(sym2);
  PsdResult p2 = is_psd(sym2, cert.tol);
  rep.m2Pass = p2.psd && p2.positiveRank == t.s - 1;
  return rep;
}

NullSpaceResult assumption_H(const Tableau& t) {
  int s = t.s;
  const RealMatrix& h = t.Himp;
  double scale = std::max(h.maxAbs(), 1e-300);

  std::vector<double> v;
  bool triangular_path = std::abs(h(0, 0)) <= 1e-14 * std::max(1.0, scale);
  for (int i = 1; i < s && triangular_path; ++i)
    if (h(i, i) <= 1e-14 * scale) triangular_path = false;

  if (triangular_path) {
    // h11 = 0 with invertible trailing block: the kernel is exactly
    // one-dimensional and forward substitution delivers its generator.
    v.assign(s, 0.0);
    v[0] = 1.0;
    for (int i = 1; i < s; ++i) {
      double acc = 0.0;
      for (int j = 0; j < i; ++j) acc += h(i, j) * v[j];
      v[i] = -acc / h(i, i);
    }
  } else {
    auto basis = null_space(h, 1e-12);
    if (basis.size() != 1)
      throw Error(ErrorCode::NullityMismatch,
                  "implicit matrix nullity is " + std::to_string(basis.size()) +
                      ", expected 1");
    v = basis.front();
  }

  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  NullSpaceResult out;
  out.vector = v;
  out.pass = std::abs(v[s - 1]) <= 1e-12 * norm;
  return out;
}

namespace {

Tableau make_ars111() {
  Tableau t = new_tableau(RealMatrix{{0, 0}, {1, 0}}, RealMatrix{{0, 0}, {0, 1}},
                          {1.0, 0.0}, {0.0, 1.0});
  t.name = "ars111";
  t.claimedOrder = 1;
  return t;
}

Tableau make_ars222() {
  const double g = 1.0 - std::sqrt(2.0) / 2.0;
  const double d = 1.0 - 1.0 / (2.0 * g);
  Tableau t = new_tableau(RealMatrix{{0, 0, 0}, {g, 0, 0}, {d, 1.0 - d, 0}},
                          RealMatrix{{0, 0, 0}, {0, g, 0}, {0, 1.0 - g, g}},
                          {d, 1.0 - d, 0.0}, {0.0, 1.0 - g, g});
  t.name = "ars222";
  t.claimedOrder = 2;
  return t;
}

Tableau make_ars443() {
  RealMatrix hexp{{0, 0, 0, 0, 0},
                  {1.0 / 2, 0, 0, 0, 0},
                  {11.0 / 18, 1.0 / 18, 0, 0, 0},
                  {5.0 / 6, -5.0 / 6, 1.0 / 2, 0, 0},
                  {1.0 / 4, 7.0 / 4, 3.0 / 4, -7.0 / 4, 0}};
  RealMatrix himp{{0, 0, 0, 0, 0},
                  {0, 1.0 / 2, 0, 0, 0},
                  {0, 1.0 / 6, 1.0 / 2, 0, 0},
                  {0, -1.0 / 2, 1.0 / 2, 1.0 / 2, 0},
                  {0, 3.0 / 2, -3.0 / 2, 1.0 / 2, 1.0 / 2}};
  Tableau t = new_tableau(hexp, himp, {1.0 / 4, 7.0 / 4, 3.0 / 4, -7.0 / 4, 0.0},
                          {0.0, 3.0 / 2, -3.0 / 2, 1.0 / 2, 1.0 / 2});
  t.name = "ars443";
  t.claimedOrder = 3;
  return t;
}

Tableau make_bhr553s() {
  const double g = 424782. / 974569.;
  RealMatrix himp(5, 5), hexp(5, 5);
  himp(1, 0) = g;
  himp(1, 1) = g;
  himp(2, 0) = g;
  himp(2, 1) = -31733082319927313. / 455705377221960889379854647102.;
  himp(2, 2) = g;
  himp(3, 0) =
      -3012378541084922027361996761794919360516301377809610. /
      45123394056585269977907753045030512597955897345819349.;
  himp(3, 1) = -62865589297807153294268. / 102559673441610672305587327019095047.;
  himp(3, 2) = 418769796920855299603146267001414900945214277000. /
               212454360385257708555954598099874818603217167139.;
  himp(3, 3) = g;
  himp(4, 0) = 487698502336740678603511. / 1181159636928185920260208.;
  himp(4, 1) = 0.0;
  himp(4, 2) = 302987763081184622639300143137943089. /
               1535359944203293318639180129368156500.;
  himp(4, 3) = -105235928335100616072938218863. / 2282554452064661756575727198000.;
  himp(4, 4) = g;

  hexp(1, 0) = 2.0 * g;
  hexp(2, 0) = g;
  hexp(2, 1) = g;
  hexp(3, 0) = -475883375220285986033264. / 594112726933437845704163.;
  hexp(3, 1) = 0.0;
  hexp(3, 2) = 1866233449822026827708736. / 594112726933437845704163.;
  hexp(4, 0) = 62828845818073169585635881686091391737610308247. /
               176112910684412105319781630311686343715753056000.;
  hexp(4, 1) = -himp(4, 2);
  hexp(4, 2) = 262315887293043739337088563996093207. /
               297427554730376353252081786906492000.;
  hexp(4, 3) = -987618231894176581438124717087. / 23877337660202969319526901856000.;

  std::vector<double> b(5);
  for (int j = 0; j < 5; ++j) b[j] = himp(4, j);
  Tableau t = new_tableau(hexp, himp, b, b);
  t.name = "bhr553s";
  t.claimedOrder = 3;
  return t;
}

void self_validate(const Tableau& t) {
  ConditionReport rep = order_residuals(t, t.claimedOrder);
  if (!rep.allPass())
    throw Error(ErrorCode::Internal,
                "registry tableau " + t.name + " violates its claimed order " +
                    std::to_string(t.claimedOrder) + " (max residual " +
                    std::to_string(rep.maxResidual()) + ")");
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"ars111", "ars222", "ars443", "bhr553s"};
}

Tableau registry(const std::string& name) {
  Tableau t;
  if (name == "ars111") t = make_ars111();
  else if (name == "ars222") t = make_ars222();
  else if (name == "ars443") t = make_ars443();
  else if (name == "bhr553s") t = make_bhr553s();
  else throw Error(ErrorCode::UnknownScheme, "unknown scheme: " + name);
  self_validate(t);
  return t;
}

Tableau load_tableau_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open tableau file: " + path);
  int s = 0;
  if (!(in >> s) || s < 1)
    throw Error(ErrorCode::IoFailure, "bad stage count in " + path);
  auto read_row = [&](int count) {
    std::vector<double> row(count);
    for (double& v : row)
      if (!(in >> v)) throw Error(ErrorCode::IoFailure, "truncated tableau in " + path);
    return row;
  };
  RealMatrix hexp(s, s), himp(s, s);
  for (int i = 0; i < s; ++i) {
    auto row = read_row(s);
    for (int j = 0; j < s; ++j) hexp(i, j) = row[j];
  }
  for (int i = 0; i < s; ++i) {
    auto row = read_row(s);
    for (int j = 0; j < s; ++j) himp(i, j) = row[j];
  }
  std::vector<double> bexp = read_row(s);
  std::vector<double> bimp = read_row(s);
  Tableau t = new_tableau(hexp, himp, bexp, bimp);
  size_t slash = path.find_last_of('/');
  t.name = slash == std::string::npos ? path : path.substr(slash + 1);
  return t;
}

}  // namespace relax
