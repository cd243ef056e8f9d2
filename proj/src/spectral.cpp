#include "relaxlab/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace relax {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ModalState project(const std::vector<std::function<double(double)>>& components, int N) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "project: N must be >= 0");
  int m = static_cast<int>(components.size());
  int points = 2 * N + 2;
  ModalState state(m, N);

  std::vector<double> samples(points);
  for (int comp = 0; comp < m; ++comp) {
    for (int j = 0; j < points; ++j) {
      double x = -std::numbers::pi + kTwoPi * j / points;
      samples[j] = components[comp](x);
      if (!std::isfinite(samples[j]))
        throw Error(ErrorCode::InvalidArgument, "project: non-finite sample");
    }
    for (int k = 0; k <= N; ++k) {
      double re = 0.0, im = 0.0;
      for (int j = 0; j < points; ++j) {
        double x = -std::numbers::pi + kTwoPi * j / points;
        re += samples[j] * std::cos(k * x);
        im -= samples[j] * std::sin(k * x);
      }
      state.at(comp, k) = cplx(re / points, im / points);
    }
  }
  return state;
}

GridField synthesize(const ModalState& state) {
  int points = 2 * state.N + 2;
  GridField field;
  field.m = state.m;
  field.x.resize(points);
  for (int j = 0; j < points; ++j)
    field.x[j] = -std::numbers::pi + kTwoPi * j / points;
  field.values.resize(static_cast<size_t>(state.m) * points);

  for (int comp = 0; comp < state.m; ++comp) {
    for (int j = 0; j < points; ++j) {
      double x = field.x[j];
      double acc = state.at(comp, 0).real();
      for (int k = 1; k <= state.N; ++k) {
        cplx u = state.at(comp, k);
        acc += 2.0 * (u.real() * std::cos(k * x) - u.imag() * std::sin(k * x));
      }
      field.values[static_cast<size_t>(comp) * points + j] = acc;
    }
  }
  return field;
}

double l2_norm(const ModalState& state) {
  double acc = 0.0;
  for (int comp = 0; comp < state.m; ++comp) {
    acc += std::norm(state.at(comp, 0));
    for (int k = 1; k <= state.N; ++k) acc += 2.0 * std::norm(state.at(comp, k));
  }
  return std::sqrt(kTwoPi * acc);
}

double l2_norm(const ModalState& state, const RealMatrix& weight) {
  if (!weight.square() || weight.rows() != state.m)
    throw Error(ErrorCode::ShapeMismatch, "l2_norm: weight shape mismatch");
  double acc = 0.0;
  for (int k = 0; k <= state.N; ++k) {
    double factor = (k == 0) ? 1.0 : 2.0;
    for (int i = 0; i < state.m; ++i) {
      cplx ui = state.at(i, k);
      for (int j = 0; j < state.m; ++j) {
        cplx uj = state.at(j, k);
        acc += factor * weight(i, j) * (std::conj(ui) * uj).real();
      }
    }
  }
  return std::sqrt(std::max(0.0, kTwoPi * acc));
}

double modal_error(const ModalState& a, const ModalState& b) {
  if (a.m != b.m || a.N != b.N)
    throw Error(ErrorCode::ShapeMismatch, "modal_error: states differ in shape");
  double acc = 0.0;
  for (int comp = 0; comp < a.m; ++comp) {
    acc += std::norm(a.at(comp, 0) - b.at(comp, 0));
    for (int k = 1; k <= a.N; ++k)
      acc += 2.0 * std::norm(a.at(comp, k) - b.at(comp, k));
  }
  return std::sqrt(kTwoPi * acc);
}

ModalState derivative(const ModalState& state) {
  ModalState out = state;
  for (int comp = 0; comp < state.m; ++comp)
    for (int k = 0; k <= state.N; ++k)
      out.at(comp, k) = cplx(0.0, static_cast<double>(k)) * state.at(comp, k);
  return out;
}

void write_grid_csv(const GridField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  out << "x";
  for (int comp = 0; comp < field.m; ++comp) out << ",comp" << comp + 1;
  out << "\n";
  char buf[64];
  for (size_t j = 0; j < field.x.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", field.x[j]);
    out << buf;
    for (int comp = 0; comp < field.m; ++comp) {
      std::snprintf(buf, sizeof buf, "%.17g", field.at(comp, static_cast<int>(j)));
      out << "," << buf;
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

}  // namespace relax
