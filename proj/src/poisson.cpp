#include "gcl/poisson.hpp"

#include <algorithm>
#include <cmath>

namespace gcl {

namespace {

// Lagrange weights for nodes floor(q)-1 .. floor(q)+2 at fractional offset t.
std::array<double, 4> cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

struct AxisStencil {
  std::array<long, 4> index{};
  std::array<double, 4> weight{};
  int size = 0;
};

bool axis_stencil(const GridAxis& axis, double coord, Interpolation kind, AxisStencil& st) {
  const double q = (coord - axis.origin) / axis.spacing;
  const double last = static_cast<double>(axis.count - 1);
  if (q < -1e-9 || q > last + 1e-9) return false;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9) {
    st.size = 1;
    st.index[0] = static_cast<long>(r);
    st.weight[0] = 1.0;
    return true;
  }
  const double fl = std::floor(q);
  const double t = q - fl;
  const long i0 = static_cast<long>(fl);
  if (kind == Interpolation::Linear) {
    st.size = 2;
    st.index = {i0, i0 + 1, 0, 0};
    st.weight = {1.0 - t, t, 0.0, 0.0};
  } else {
    st.size = 4;
    st.index = {i0 - 1, i0, i0 + 1, i0 + 2};
    st.weight = cubic_weights(t);
  }
  // Nodes beyond the grid hold zero.
  for (int k = 0; k < st.size; ++k) {
    if (st.index[k] < 0 || st.index[k] >= static_cast<long>(axis.count)) st.weight[k] = 0.0;
  }
  return true;
}

// First-derivative weights at 0 for the 7 nodes o, o+1, .., o+6 (Lagrange).
std::array<double, 7> d1_weights(long o) {
  std::array<double, 7> w{};
  for (int j = 0; j < 7; ++j) {
    double denom = 1.0;
    for (int k = 0; k < 7; ++k) {
      if (k != j) denom *= static_cast<double>(j - k);
    }
    double num = 0.0;
    for (int l = 0; l < 7; ++l) {
      if (l == j) continue;
      double prod = 1.0;
      for (int k = 0; k < 7; ++k) {
        if (k != j && k != l) prod *= -static_cast<double>(o + k);
      }
      num += prod;
    }
    w[j] = num / denom;
  }
  return w;
}

}  // namespace

cplx interpolate(const SampledSymbol& s, std::span<const double> x, std::span<const double> xi,
                 Interpolation kind) {
  const auto& grid = s.grid;
  const std::size_t n = grid.base_dim(), m = grid.fiber_dim(), dims = n + m;
  std::array<AxisStencil, 16> st{};
  if (dims > st.size()) throw Error("interpolate: too many dimensions");
  for (std::size_t d = 0; d < n; ++d) {
    if (!axis_stencil(grid.base_axes()[d], x[d], kind, st[d])) return 0.0;
  }
  for (std::size_t d = 0; d < m; ++d) {
    if (!axis_stencil(grid.fiber_axes()[d], xi[d], kind, st[n + d])) return 0.0;
  }
  std::array<int, 16> pos{};
  cplx sum = 0.0;
  const std::size_t fs = grid.fiber_size();
  while (true) {
    double w = 1.0;
    std::size_t bflat = 0, fflat = 0;
    for (std::size_t d = 0; d < dims && w != 0.0; ++d) {
      w *= st[d].weight[pos[d]];
      const auto idx = static_cast<std::size_t>(std::max(0L, st[d].index[pos[d]]));
      if (d < n) bflat += idx * grid.base_stride(d);
      else fflat += idx * grid.fiber_stride(d - n);
    }
    if (w != 0.0) sum += w * s.values[bflat * fs + fflat];
    std::size_t d = dims;
    while (d-- > 0) {
      if (++pos[d] < st[d].size) break;
      pos[d] = 0;
      if (d == 0) return sum;
    }
    if (dims == 0) return sum;
  }
}

SampledSymbol sampled_derivative(const SampledSymbol& s, bool base, std::size_t axis) {
  const auto& grid = s.grid;
  const auto& ax = base ? grid.base_axes().at(axis) : grid.fiber_axes().at(axis);
  const std::size_t stride = base ? grid.base_stride(axis) * grid.fiber_size()
                                  : grid.fiber_stride(axis);
  const long count = static_cast<long>(ax.count);
  if (count < 7) throw GridMismatchError("sampled derivative needs at least 7 nodes per axis");
  // Stencil start offset per position: centred inside, shifted at the edges.
  std::vector<std::array<double, 7>> table(7);
  for (long o = -6; o <= 0; ++o) table[static_cast<std::size_t>(o + 6)] = d1_weights(o);
  const double inv_h = 1.0 / ax.spacing;
  SampledSymbol out(grid);
  const std::size_t fs = grid.fiber_size();
  for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
    const std::size_t b = flat / fs, f = flat % fs;
    const long k = static_cast<long>(base ? (b / grid.base_stride(axis)) % ax.count
                                          : (f / grid.fiber_stride(axis)) % ax.count);
    const long o = std::clamp(-3L, -k, count - 1 - k - 6);
    const auto& w = table[static_cast<std::size_t>(o + 6)];
    cplx acc = 0.0;
    for (long j = 0; j < 7; ++j) {
      if (w[j] == 0.0) continue;
      acc += w[j] * s.values[static_cast<std::size_t>(static_cast<long>(flat) +
                                                     (o + j) * static_cast<long>(stride))];
    }
    out.values[flat] = acc * inv_h;
  }
  return out;
}

SampledSymbol Operand::sample(const GridSpec& grid) const {
  if (is_exact()) return eval_symbol(exact(), grid);
  if (!(samples().grid == grid)) throw GridMismatchError("operand sampled on a different grid");
  return samples();
}

Operand Operand::times_xi(std::size_t i) const {
  if (is_exact()) return exact().times_xi(i);
  SampledSymbol out = samples();
  const auto& grid = out.grid;
  if (i >= grid.fiber_dim()) throw Error("times_xi: fiber index out of range");
  const auto& ax = grid.fiber_axes()[i];
  for (std::size_t b = 0; b < grid.base_size(); ++b) {
    for (std::size_t f = 0; f < grid.fiber_size(); ++f) {
      out.at(b, f) *= ax.node((f / grid.fiber_stride(i)) % ax.count);
    }
  }
  return out;
}

Operand Operand::d_x(std::size_t j) const {
  if (is_exact()) return exact().d_x(j);
  return sampled_derivative(samples(), true, j);
}

Operand Operand::d_xi(std::size_t k) const {
  if (is_exact()) return exact().d_xi(k);
  return sampled_derivative(samples(), false, k);
}

cplx Operand::value_at(std::span<const double> x, std::span<const double> xi,
                       Interpolation kind) const {
  if (is_exact()) return exact()(x, xi);
  return interpolate(samples(), x, xi, kind);
}

SampledSymbol fiber_convolve(const SampledSymbol& f, const SampledSymbol& g,
                             std::span<const double> mu_on_base) {
  require_same_grid(f, g, "fiber_convolve");
  const auto& grid = f.grid;
  if (mu_on_base.size() != grid.base_size()) {
    throw GridMismatchError("fiber_convolve: weight table does not match the base grid");
  }
  const std::size_t m = grid.fiber_dim(), fs = grid.fiber_size();
  SampledSymbol out(grid);
  if (m == 0) {
    for (std::size_t b = 0; b < grid.base_size(); ++b) out.at(b, 0) = mu_on_base[b] * f.at(b, 0) * g.at(b, 0);
    return out;
  }

  std::vector<long> shift(m), count(m);
  std::vector<double> frac(m);
  bool lattice = true;
  for (std::size_t d = 0; d < m; ++d) {
    const auto& ax = grid.fiber_axes()[d];
    const double s = -ax.origin / ax.spacing;
    const double fl = std::floor(s + 1e-9);
    shift[d] = static_cast<long>(fl);
    frac[d] = std::max(0.0, s - fl);
    if (frac[d] <= 1e-9) frac[d] = 0.0;
    else lattice = false;
    count[d] = static_cast<long>(ax.count);
  }
  Vec wts(fs);
  for (std::size_t c = 0; c < fs; ++c) wts[c] = grid.fiber_weight(c);
  std::vector<std::size_t> stride(m);
  for (std::size_t d = 0; d < m; ++d) stride[d] = grid.fiber_stride(d);

  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<long> a(m), lo(m), hi(m), c(m);
    std::vector<std::size_t> aidx(m);
    for (std::size_t flat = begin; flat < end; ++flat) {
      const std::size_t b = flat / fs, af = flat % fs;
      const cplx* fb = &f.values[b * fs];
      const cplx* gb = &g.values[b * fs];
      grid.fiber_index(af, aidx);
      for (std::size_t d = 0; d < m; ++d) a[d] = static_cast<long>(aidx[d]);
      cplx sum = 0.0;
      if (lattice) {
        // g index along axis d is a_d - c_d + shift_d.
        bool empty = false;
        for (std::size_t d = 0; d < m; ++d) {
          lo[d] = std::max(0L, a[d] + shift[d] - (count[d] - 1));
          hi[d] = std::min(count[d] - 1, a[d] + shift[d]) + 1;
          if (lo[d] >= hi[d]) empty = true;
        }
        if (!empty) {
          c = lo;
          const std::size_t last = m - 1;
          while (true) {
            std::size_t fo = 0, go = 0;
            for (std::size_t d = 0; d < last; ++d) {
              fo += static_cast<std::size_t>(c[d]) * stride[d];
              go += static_cast<std::size_t>(a[d] - c[d] + shift[d]) * stride[d];
            }
            for (long cl = lo[last]; cl < hi[last]; ++cl) {
              const std::size_t fi = fo + static_cast<std::size_t>(cl);
              const std::size_t gi = go + static_cast<std::size_t>(a[last] - cl + shift[last]);
              sum += wts[fi] * (fb[fi] * gb[gi]);
            }
            if (last == 0) break;
            std::size_t d = last;
            bool done = false;
            while (true) {
              --d;
              if (++c[d] < hi[d]) break;
              c[d] = lo[d];
              if (d == 0) {
                done = true;
                break;
              }
            }
            if (done) break;
          }
        }
      } else {
        // Off-lattice: multilinear interpolation between the two nearest nodes.
        for (std::size_t ci = 0; ci < fs; ++ci) {
          std::size_t rem = ci;
          cplx gval = 0.0;
          for (std::size_t d = 0; d < m; ++d) {
            c[d] = static_cast<long>(rem / stride[d]);
            rem %= stride[d];
          }
          for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
            double w = 1.0;
            std::size_t gi = 0;
            for (std::size_t d = 0; d < m && w != 0.0; ++d) {
              const bool up = (corner >> d) & 1U;
              const long idx = a[d] - c[d] + shift[d] + (up ? 1 : 0);
              const double wd = up ? frac[d] : 1.0 - frac[d];
              if (idx < 0 || idx >= count[d]) w = 0.0;
              else {
                w *= wd;
                gi += static_cast<std::size_t>(idx) * stride[d];
              }
            }
            if (w != 0.0) gval += w * gb[gi];
          }
          sum += wts[ci] * (fb[ci] * gval);
        }
      }
      out.values[flat] = mu_on_base[b] * sum;
    }
  });
  return out;
}

SampledSymbol poisson_bracket(const Operand& f, const Operand& g, const AlgebroidData& data,
                                  const GridSpec& grid) {
  data.require_matches(grid);
  const std::size_t n = grid.base_dim(), m = grid.fiber_dim(), fs = grid.fiber_size();
  const auto& mu = data.weights;
  SampledSymbol result(grid);

  // Adds coef(b) * term at every node.
  auto accumulate = [&](const auto& coef, const SampledSymbol& term) {
    for (std::size_t b = 0; b < grid.base_size(); ++b) {
      const cplx c = coef(b);
      if (c == cplx(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < fs; ++k) result.at(b, k) += c * term.at(b, k);
    }
  };

  const SampledSymbol fs_ = f.sample(grid);
  const SampledSymbol gs_ = g.sample(grid);

  for (std::size_t i = 0; i < m; ++i) {
    bool any_anchor = false;
    for (std::size_t j = 0; j < n; ++j) any_anchor = any_anchor || !data.anchor_vanishes(i, j);
    if (!any_anchor) continue;
    const SampledSymbol xf = f.times_xi(i).sample(grid);
    const SampledSymbol xg = g.times_xi(i).sample(grid);
    for (std::size_t j = 0; j < n; ++j) {
      if (data.anchor_vanishes(i, j)) continue;
      SampledSymbol term = fiber_convolve(xf, g.d_x(j).sample(grid), mu);
      term -= fiber_convolve(xg, f.d_x(j).sample(grid), mu);
      accumulate([&](std::size_t b) { return kTwoPiI * data.anchor(b, i, j); }, term);
    }
    bool any_weight = false;
    for (std::size_t b = 0; b < data.size() && !any_weight; ++b) {
      for (std::size_t j = 0; j < n; ++j) {
        if (data.anchor(b, i, j) * data.log_weight_grad(b, j) != 0.0) any_weight = true;
      }
    }
    if (any_weight) {
      SampledSymbol term = fiber_convolve(xf, gs_, mu);
      term -= fiber_convolve(xg, fs_, mu);
      accumulate(
          [&](std::size_t b) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += data.anchor(b, i, j) * data.log_weight_grad(b, j);
            return kTwoPiI * s;
          },
          term);
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        if (data.structure_vanishes(i, j, k)) continue;
        SampledSymbol term =
            fiber_convolve(f.times_xi(i).d_xi(k).sample(grid), g.times_xi(j).sample(grid), mu);
        term -= fiber_convolve(g.times_xi(i).d_xi(k).sample(grid), f.times_xi(j).sample(grid), mu);
        accumulate([&](std::size_t b) { return -0.5 * kTwoPiI * data.structure(b, i, j, k); }, term);
      }
    }
  }
  return result;
}

namespace {

// Contracts fiber axis `axis` of `in` (shape dims) with kernel[z][k], giving
// shape dims with dims[axis] replaced by kernel rows.
std::vector<cplx> transform_axis(const std::vector<cplx>& in, std::size_t base_size,
                                 std::vector<std::size_t>& dims, std::size_t axis,
                                 const std::vector<cplx>& kernel, std::size_t rows) {
  const std::size_t cols = dims[axis];
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= dims[d];
  for (std::size_t d = axis + 1; d < dims.size(); ++d) inner *= dims[d];
  const std::size_t in_block = outer * cols * inner, out_block = outer * rows * inner;
  std::vector<cplx> out(base_size * out_block);
  parallel_for(base_size * outer, [&](std::size_t begin, std::size_t end) {
    for (std::size_t bo = begin; bo < end; ++bo) {
      const std::size_t b = bo / outer, o = bo % outer;
      const cplx* src = &in[b * in_block + o * cols * inner];
      cplx* dst = &out[b * out_block + o * rows * inner];
      for (std::size_t z = 0; z < rows; ++z) {
        const cplx* krow = &kernel[z * cols];
        for (std::size_t i = 0; i < inner; ++i) {
          cplx acc = 0.0;
          for (std::size_t k = 0; k < cols; ++k) acc += krow[k] * src[k * inner + i];
          dst[z * inner + i] = acc;
        }
      }
    }
  });
  dims[axis] = rows;
  return out;
}

SampledSymbol fiber_transform(const SampledSymbol& f, const GridSpec& target, double sign,
                              bool from_primal) {
  const auto& src_axes = f.grid.fiber_axes();
  const auto& dst_axes = target.fiber_axes();
  std::vector<std::size_t> dims;
  for (const auto& a : src_axes) dims.push_back(a.count);
  std::vector<cplx> data = f.values;
  for (std::size_t d = 0; d < src_axes.size(); ++d) {
    const auto& sa = src_axes[d];
    const auto& da = dst_axes[d];
    std::vector<cplx> kernel(da.count * sa.count);
    for (std::size_t z = 0; z < da.count; ++z) {
      for (std::size_t k = 0; k < sa.count; ++k) {
        const double phase = sign * 2.0 * kPi * da.node(z) * sa.node(k);
        kernel[z * sa.count + k] = sa.weight(k) * cplx(std::cos(phase), std::sin(phase));
      }
    }
    data = transform_axis(data, f.grid.base_size(), dims, d, kernel, da.count);
  }
  (void)from_primal;
  SampledSymbol out(target);
  out.values = std::move(data);
  return out;
}

void check_transform_grids(const SampledSymbol& f, const GridSpec& other,
                           std::span<const double> mu) {
  if (!(f.grid.base_axes() == other.base_axes()) || f.grid.fiber_dim() != other.fiber_dim()) {
    throw GridMismatchError("Fourier transform: base grids or fiber dimensions differ");
  }
  if (mu.size() != f.grid.base_size()) {
    throw GridMismatchError("Fourier transform: weight table does not match the base grid");
  }
}

}  // namespace

SampledSymbol fourier(const SampledSymbol& f, std::span<const double> mu_on_base,
                      const GridSpec& dual) {
  check_transform_grids(f, dual, mu_on_base);
  SampledSymbol out = fiber_transform(f, dual, -1.0, true);
  const std::size_t fs = dual.fiber_size();
  for (std::size_t b = 0; b < dual.base_size(); ++b) {
    for (std::size_t k = 0; k < fs; ++k) out.at(b, k) *= mu_on_base[b];
  }
  return out;
}

SampledSymbol inverse_fourier(const SampledSymbol& F, std::span<const double> mu_on_base,
                              const GridSpec& target) {
  check_transform_grids(F, target, mu_on_base);
  SampledSymbol out = fiber_transform(F, target, +1.0, false);
  const std::size_t fs = target.fiber_size();
  for (std::size_t b = 0; b < target.base_size(); ++b) {
    if (!(mu_on_base[b] > 0.0)) throw WeightError("inverse Fourier: nonpositive Haar weight");
    for (std::size_t k = 0; k < fs; ++k) out.at(b, k) /= mu_on_base[b];
  }
  return out;
}

DualGridChoice choose_dual_grid(const std::vector<const SampledSymbol*>& samples,
                                std::span<const double> mu_on_base, const DualGridOptions& opts) {
  if (samples.empty()) throw Error("choose_dual_grid: no samples");
  const GridSpec& grid = samples.front()->grid;
  const std::size_t m = grid.fiber_dim();
  std::vector<GridAxis> probe_axes(m);
  Vec band(m);
  for (std::size_t d = 0; d < m; ++d) {
    const auto& ax = grid.fiber_axes()[d];
    band[d] = 1.0 / (2.0 * ax.spacing);
    probe_axes[d] = GridAxis::symmetric(band[d], 4 * (ax.count - 1));
  }
  const GridSpec probe = grid.with_fiber(probe_axes);

  Vec radius(m, 0.0);
  for (const SampledSymbol* s : samples) {
    require_same_grid(*s, *samples.front(), "choose_dual_grid");
    const SampledSymbol F = fourier(*s, mu_on_base, probe);
    const double peak = F.sup();
    if (peak == 0.0) continue;
    std::vector<std::size_t> idx(m);
    for (std::size_t b = 0; b < probe.base_size(); ++b) {
      for (std::size_t k = 0; k < probe.fiber_size(); ++k) {
        if (std::abs(F.at(b, k)) <= opts.coverage * peak) continue;
        probe.fiber_index(k, idx);
        for (std::size_t d = 0; d < m; ++d) {
          const double z = std::abs(probe_axes[d].node(idx[d])) + probe_axes[d].spacing;
          radius[d] = std::max(radius[d], z);
        }
      }
    }
  }
  DualGridChoice choice;
  std::vector<GridAxis> axes(m);
  for (std::size_t d = 0; d < m; ++d) {
    double r = radius[d];
    if (r == 0.0 || r > opts.band_fraction * band[d]) {
      if (r != 0.0) choice.band_limited = true;
      r = opts.band_fraction * band[d];
    }
    const auto nodes = static_cast<double>(grid.fiber_axes()[d].count) * opts.count_factor;
    std::size_t intervals = 2 * static_cast<std::size_t>(std::ceil(nodes / 2.0));
    intervals = std::max(intervals, opts.min_count - 1);
    axes[d] = GridAxis::symmetric(r, intervals);
  }
  choice.grid = grid.with_fiber(axes);
  return choice;
}

SampledSymbol DualBracketParts::combine(DualSigns s) const {
  SampledSymbol out = anchor_part;
  out *= static_cast<double>(s.anchor);
  SampledSymbol sp = structure_part;
  sp *= static_cast<double>(s.structure);
  out += sp;
  return out;
}

DualBracketParts dual_bracket_parts(const SampledSymbol& F, const SampledSymbol& G,
                                    const AlgebroidData& data) {
  require_same_grid(F, G, "dual bracket");
  const auto& grid = F.grid;
  data.require_matches(grid);
  const std::size_t n = grid.base_dim(), m = grid.fiber_dim(), fs = grid.fiber_size();
  DualBracketParts parts{SampledSymbol(grid), SampledSymbol(grid)};

  std::vector<SampledSymbol> dF, dG;
  for (std::size_t i = 0; i < m; ++i) {
    dF.push_back(sampled_derivative(F, false, i));
    dG.push_back(sampled_derivative(G, false, i));
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) any = any || !data.anchor_vanishes(i, j);
    if (!any) continue;
    const SampledSymbol Fx = sampled_derivative(F, true, j);
    const SampledSymbol Gx = sampled_derivative(G, true, j);
    for (std::size_t i = 0; i < m; ++i) {
      if (data.anchor_vanishes(i, j)) continue;
      for (std::size_t b = 0; b < grid.base_size(); ++b) {
        const double a = data.anchor(b, i, j);
        for (std::size_t k = 0; k < fs; ++k) {
          parts.anchor_part.at(b, k) +=
              a * (dF[i].at(b, k) * Gx.at(b, k) - dG[i].at(b, k) * Fx.at(b, k));
        }
      }
    }
  }
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t kk = 0; kk < m; ++kk) {
        if (data.structure_vanishes(i, j, kk)) continue;
        const auto& ax = grid.fiber_axes()[kk];
        for (std::size_t b = 0; b < grid.base_size(); ++b) {
          const double c = data.structure(b, i, j, kk);
          for (std::size_t k = 0; k < fs; ++k) {
            const double zeta = ax.node((k / grid.fiber_stride(kk)) % ax.count);
            parts.structure_part.at(b, k) += c * zeta * dF[i].at(b, k) * dG[j].at(b, k);
          }
        }
      }
    }
  }
  return parts;
}

SampledSymbol dual_poisson_bracket(const SampledSymbol& F, const SampledSymbol& G,
                                   const AlgebroidData& data, DualSigns signs) {
  return dual_bracket_parts(F, G, data).combine(signs);
}

IntertwiningResult intertwining_residual(const Operand& f, const Operand& g,
                                         const AlgebroidData& data, const GridSpec& grid,
                                         const DualGridOptions& opts) {
  for (std::size_t b = 0; b < data.size(); ++b) {
    bool flat = data.weights[b] == 1.0;
    for (std::size_t j = 0; j < data.n; ++j) flat = flat && data.log_weight_grad(b, j) == 0.0;
    if (!flat) throw Error("intertwining check requires a unit Haar weight (mu_e == 1)");
  }
  const SampledSymbol fs_ = f.sample(grid), gs_ = g.sample(grid);
  const SampledSymbol br = poisson_bracket(f, g, data, grid);
  const auto& mu = data.weights;
  const DualGridChoice dual = choose_dual_grid({&fs_, &gs_, &br}, mu, opts);
  const SampledSymbol Fb = fourier(br, mu, dual.grid);
  const SampledSymbol F = fourier(fs_, mu, dual.grid);
  const SampledSymbol G = fourier(gs_, mu, dual.grid);
  const DualBracketParts parts = dual_bracket_parts(F, G, data);

  IntertwiningResult res;
  res.dual = dual.grid;
  res.band_limited = dual.band_limited;
  const std::array<DualSigns, 4> choices = {DualSigns{1, 1}, DualSigns{1, -1}, DualSigns{-1, 1},
                                            DualSigns{-1, -1}};
  std::size_t best = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    const SampledSymbol D = parts.combine(choices[c]);
    res.by_signs[c] = sup_diff(Fb, D) / residual_scale(Fb, D);
    if (res.by_signs[c] < res.by_signs[best]) best = c;
  }
  res.residual = res.by_signs[best];
  const double floor = 1e-12 * std::max(Fb.sup(), 1e-30);
  res.s1 = parts.anchor_part.sup() > floor ? choices[best].anchor : 0;
  res.s2 = parts.structure_part.sup() > floor ? choices[best].structure : 0;
  return res;
}

DualSigns consistent_signs(const std::vector<IntertwiningResult>& runs) {
  DualSigns out{0, 0};
  for (const auto& r : runs) {
    if (r.s1 != 0) {
      if (out.anchor != 0 && out.anchor != r.s1) {
        throw SignConsistencyError("intertwining runs selected different anchor signs");
      }
      out.anchor = r.s1;
    }
    if (r.s2 != 0) {
      if (out.structure != 0 && out.structure != r.s2) {
        throw SignConsistencyError("intertwining runs selected different structure signs");
      }
      out.structure = r.s2;
    }
  }
  return out;
}

}  // namespace gcl
