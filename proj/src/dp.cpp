#include "relaydp/dp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "relaydp/errors.hpp"

namespace relaydp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fixed chunk count for scenario partitioning keeps the reduction
// order, and therefore every bit of the result, independent of the
// thread count.
constexpr int kScenarioChunks = 8;

struct Lerp {
    int i;
    double f;
};

inline Lerp split_units(double u, int cells) {
    if (!(u > 0.0)) return {0, 0.0};
    if (u >= static_cast<double>(cells)) return {cells - 1, 1.0};
    const int i = static_cast<int>(u);
    return {i, u - static_cast<double>(i)};
}

inline double lerp_at(std::span<const double> v, double u, int cells, InterpKind kind) {
    if (kind == InterpKind::Nearest) {
        const long i = std::lround(std::clamp(u, 0.0, static_cast<double>(cells)));
        return v[static_cast<std::size_t>(i)];
    }
    const Lerp l = split_units(u, cells);
    return v[static_cast<std::size_t>(l.i)] +
           l.f * (v[static_cast<std::size_t>(l.i) + 1] - v[static_cast<std::size_t>(l.i)]);
}

inline double interp1(std::span<const double> v, const Grid& g, double x, InterpKind kind) {
    return lerp_at(v, x / g.step, g.cells, kind);
}

inline double interp2(std::span<const double> v, const Grid& g, double relay, double dest,
                      InterpKind kind) {
    const int w = g.size();
    const double ur = relay / g.step;
    const double ud = dest / g.step;
    if (kind == InterpKind::Nearest) {
        const long ir = std::lround(std::clamp(ur, 0.0, static_cast<double>(g.cells)));
        const long id = std::lround(std::clamp(ud, 0.0, static_cast<double>(g.cells)));
        return v[static_cast<std::size_t>(ir * w + id)];
    }
    const Lerp lr = split_units(ur, g.cells);
    const Lerp ld = split_units(ud, g.cells);
    const std::size_t base = static_cast<std::size_t>(lr.i) * static_cast<std::size_t>(w) +
                             static_cast<std::size_t>(ld.i);
    const double v00 = v[base];
    const double v01 = v[base + 1];
    const double v10 = v[base + static_cast<std::size_t>(w)];
    const double v11 = v[base + static_cast<std::size_t>(w) + 1];
    const double lo = v00 + ld.f * (v01 - v00);
    const double hi = v10 + ld.f * (v11 - v10);
    return lo + lr.f * (hi - lo);
}

template <typename F>
void golden_refine(F&& f, double a, double b, int iters, double& best_x, double& best_v) {
    if (!(b > a) || iters <= 0) return;
    constexpr double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    if (f1 < best_v) {
        best_v = f1;
        best_x = x1;
    }
    if (f2 < best_v) {
        best_v = f2;
        best_x = x2;
    }
}

// Coarse scan over grid-aligned candidates in [lo, hi] (stride chosen
// so at most scan_cap points are touched), endpoints included, then
// golden refinement around the winner.
template <typename F>
std::pair<double, double> minimize_scalar(F&& f, double lo, double hi, double step,
                                          const InnerSearch& inner) {
    if (!(hi > lo)) return {lo, f(lo)};
    double best_x = lo;
    double best_v = f(lo);
    {
        const double vh = f(hi);
        if (vh < best_v) {
            best_v = vh;
            best_x = hi;
        }
    }
    const long npts = static_cast<long>(std::floor((hi - lo) / step));
    const long stride =
        std::max<long>(1, (npts + std::max(1, inner.scan_cap) - 1) / std::max(1, inner.scan_cap));
    const double ds = step * static_cast<double>(stride);
    for (long j = static_cast<long>(std::ceil(lo / step)); ; j += stride) {
        const double x = static_cast<double>(j) * step;
        if (x >= hi) break;
        if (x <= lo) continue;
        const double v = f(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    golden_refine(f, std::max(lo, best_x - ds), std::min(hi, best_x + ds), inner.golden_iters,
                  best_x, best_v);
    return {best_x, best_v};
}

// Integer ternary search for the argmin of a quasiconvex sequence on
// [lo, hi] (inclusive).
template <typename F>
int ternary_argmin(F&& f, int lo, int hi) {
    while (hi - lo >= 3) {
        const int m1 = lo + (hi - lo) / 3;
        const int m2 = hi - (hi - lo) / 3;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
    }
    int best = lo;
    double bv = f(lo);
    for (int j = lo + 1; j <= hi; ++j) {
        const double v = f(j);
        if (v < bv) {
            bv = v;
            best = j;
        }
    }
    return best;
}

std::vector<double> mi_inv_table(const Grid& grid) {
    std::vector<double> miv(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) miv[static_cast<std::size_t>(i)] = detail::mi_inv(grid.point(i));
    return miv;
}

template <typename Body>
void run_chunked(int n_items, int threads, Body&& body) {
    const int chunks = std::min(kScenarioChunks, std::max(1, n_items));
    if (threads <= 1) {
        for (int c = 0; c < chunks; ++c) body(c, chunks);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= chunks) return;
            body(c, chunks);
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min(threads, chunks);
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace

Grid Grid::make(double step, double requested_max) {
    if (!(step > 0.0)) throw ConfigError("Grid: step must be > 0");
    if (!(requested_max > 0.0)) throw ConfigError("Grid: span must be > 0");
    Grid g;
    g.step = step;
    g.requested_max = requested_max;
    g.cells = std::max(1, static_cast<int>(std::ceil(requested_max / step - 1e-9)));
    return g;
}

void SolverConfig::validate() const {
    if (slots < 1) throw ConfigError("SolverConfig: slots must be >= 1");
    if (!(rate_per_slot > 0.0)) throw ConfigError("SolverConfig: rate_per_slot must be > 0");
    if (!(grid_step > 0.0)) throw ConfigError("SolverConfig: grid_step must be > 0");
    if (n_scenarios < 1) throw ConfigError("SolverConfig: n_scenarios must be >= 1");
    if (!(value_cap > 0.0)) throw ConfigError("SolverConfig: value_cap must be > 0");
    if (markov_order != 0)
        throw ConfigError("SolverConfig: only Markov order 0 (i.i.d. SNRs) is solvable");
    channel.validate();
}

double terminal_power(Phase phase, double dest_needed, const LinkSnrTriple& snr) {
    if (dest_needed <= 0.0) return 0.0;
    if (phase == Phase::Terminated) return 0.0;
    const double gain = phase == Phase::Phase1 ? snr.sd : snr.strongest_to_dest();
    if (!(gain > 0.0)) return kInf;
    return detail::mi_inv(dest_needed) / gain;
}

RateDecision decide_phase2(double dest_needed, const LinkSnrTriple& snr, const Grid& grid,
                           std::span<const double> jbar2_next, InterpKind interp,
                           const InnerSearch& inner) {
    RateDecision out;
    if (dest_needed <= 0.0) return out;
    const double gain = snr.strongest_to_dest();
    if (!(gain > 0.0)) {
        out.value = kInf;
        out.power = kInf;
        out.rate = dest_needed;
        return out;
    }
    const double inv_gain = 1.0 / gain;
    auto f = [&](double rate) {
        return inv_gain * detail::mi_inv(rate) + interp1(jbar2_next, grid, dest_needed - rate, interp);
    };
    const auto [x, v] = minimize_scalar(f, 0.0, dest_needed, grid.step, inner);
    out.value = v;
    out.rate = x;
    out.power = inv_gain * detail::mi_inv(x);
    return out;
}

RateDecision decide_phase1(const ResidualInfo& residual, const LinkSnrTriple& snr,
                           const Grid& grid, std::span<const double> jbar1_next,
                           std::span<const double> jbar2_next, InterpKind interp,
                           const InnerSearch& inner) {
    RateDecision out;
    const double dest = residual.dest_needed;
    if (dest <= 0.0) return out;
    if (!(snr.sd > 0.0)) {
        out.value = kInf;
        out.power = kInf;
        out.rate = dest;
        return out;
    }
    const double a = 1.0 / snr.sd;
    const double relay = std::max(residual.relay_needed, 0.0);
    const double ratio = snr.sr * a;

    double rth = kInf;
    if (snr.sr > 0.0) rth = detail::mi(detail::mi_inv(relay) * snr.sd / snr.sr);
    const double bprime = std::min(rth, dest);

    auto f_switch = [&](double rate) {
        return a * detail::mi_inv(rate) + interp1(jbar2_next, grid, dest - rate, interp);
    };
    auto f_stay = [&](double rate) {
        const double g = detail::mi(detail::mi_inv(rate) * ratio);
        return a * detail::mi_inv(rate) + interp2(jbar1_next, grid, relay - g, dest - rate, interp);
    };

    const auto [x2, v2] = minimize_scalar(f_switch, bprime, dest, grid.step, inner);
    double x1 = 0.0, v1 = kInf;
    if (bprime > 0.0) std::tie(x1, v1) = minimize_scalar(f_stay, 0.0, bprime, grid.step, inner);

    if (v2 <= v1) {
        out.value = v2;
        out.rate = x2;
        out.switch_branch = true;
    } else {
        out.value = v1;
        out.rate = x1;
        out.switch_branch = false;
    }
    out.power = a * detail::mi_inv(out.rate);
    return out;
}

std::vector<double> terminal_phase2_table(const Grid& grid,
                                          std::span<const LinkSnrTriple> scenarios, double cap) {
    const auto miv = mi_inv_table(grid);
    std::vector<double> out(static_cast<std::size_t>(grid.size()), 0.0);
    for (const auto& snr : scenarios) {
        const double gain = snr.strongest_to_dest();
        for (int d = 1; d < grid.size(); ++d) {
            const double v = gain > 0.0 ? miv[static_cast<std::size_t>(d)] / gain : kInf;
            out[static_cast<std::size_t>(d)] += std::min(v, cap);
        }
    }
    const double inv_n = 1.0 / static_cast<double>(scenarios.size());
    for (auto& v : out) v *= inv_n;
    return out;
}

std::vector<double> terminal_phase1_table(const Grid& grid,
                                          std::span<const LinkSnrTriple> scenarios, double cap) {
    const auto miv = mi_inv_table(grid);
    const int w = grid.size();
    std::vector<double> slice(static_cast<std::size_t>(w), 0.0);
    for (const auto& snr : scenarios) {
        for (int d = 1; d < w; ++d) {
            const double v = snr.sd > 0.0 ? miv[static_cast<std::size_t>(d)] / snr.sd : kInf;
            slice[static_cast<std::size_t>(d)] += std::min(v, cap);
        }
    }
    const double inv_n = 1.0 / static_cast<double>(scenarios.size());
    for (auto& v : slice) v *= inv_n;
    // The last slot spends power on the source-destination link no
    // matter how much the relay still needs, so every relay row is the
    // same slice.
    std::vector<double> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(w));
    for (int r = 0; r < w; ++r)
        std::copy(slice.begin(), slice.end(), out.begin() + static_cast<std::ptrdiff_t>(r) * w);
    return out;
}

Phase2Step bellman_step_phase2(const Grid& grid, std::span<const LinkSnrTriple> scenarios,
                               std::span<const double> jbar2_next, const StepOptions& opt) {
    const int m = grid.size();
    const int n_scen = static_cast<int>(scenarios.size());
    const auto miv = mi_inv_table(grid);

    Phase2Step out;
    out.jbar.assign(static_cast<std::size_t>(m), 0.0);
    const bool keep = opt.keep_per_scenario;
    if (keep) {
        out.per_scenario.assign(static_cast<std::size_t>(n_scen), {});
        out.rates.assign(static_cast<std::size_t>(n_scen), {});
    }

    const int chunks = std::min(kScenarioChunks, std::max(1, n_scen));
    std::vector<std::vector<double>> acc(static_cast<std::size_t>(chunks));

    run_chunked(n_scen, keep ? 1 : opt.threads, [&](int chunk, int n_chunks) {
        auto& sum = acc[static_cast<std::size_t>(chunk)];
        sum.assign(static_cast<std::size_t>(m), 0.0);
        std::vector<double> costs(static_cast<std::size_t>(m));
        for (int si = chunk; si < n_scen; si += n_chunks) {
            const auto& snr = scenarios[static_cast<std::size_t>(si)];
            std::vector<double> row(static_cast<std::size_t>(m), 0.0);
            std::vector<double> rates;
            if (keep) rates.assign(static_cast<std::size_t>(m), 0.0);
            const double gain = snr.strongest_to_dest();
            if (!(gain > 0.0)) {
                for (int d = 1; d < m; ++d) row[static_cast<std::size_t>(d)] = opt.value_cap;
            } else {
                const double b = 1.0 / gain;
                for (int j = 0; j < m; ++j) costs[static_cast<std::size_t>(j)] = b * miv[static_cast<std::size_t>(j)];
                for (int d = 1; d < m; ++d) {
                    auto on_grid = [&](int j) {
                        return costs[static_cast<std::size_t>(j)] +
                               jbar2_next[static_cast<std::size_t>(d - j)];
                    };
                    const int j_star = ternary_argmin(on_grid, 0, d);
                    double bx = grid.point(j_star);
                    double bv = on_grid(j_star);
                    auto f = [&](double rate) {
                        return lerp_at(costs, rate / grid.step, grid.cells, opt.interp) +
                               lerp_at(jbar2_next, (grid.point(d) - rate) / grid.step, grid.cells,
                                       opt.interp);
                    };
                    golden_refine(f, grid.point(std::max(0, j_star - 1)),
                                  std::min(grid.point(d), grid.point(j_star + 1)),
                                  opt.inner.golden_iters, bx, bv);
                    row[static_cast<std::size_t>(d)] = std::min(bv, opt.value_cap);
                    if (keep) rates[static_cast<std::size_t>(d)] = bx;
                }
            }
            for (int d = 0; d < m; ++d) sum[static_cast<std::size_t>(d)] += row[static_cast<std::size_t>(d)];
            if (keep) {
                out.per_scenario[static_cast<std::size_t>(si)] = std::move(row);
                out.rates[static_cast<std::size_t>(si)] = std::move(rates);
            }
        }
    });

    const double inv_n = 1.0 / static_cast<double>(n_scen);
    for (int c = 0; c < chunks; ++c)
        for (int d = 0; d < m; ++d) out.jbar[static_cast<std::size_t>(d)] += acc[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
    for (auto& v : out.jbar) v *= inv_n;
    return out;
}

Phase1Step bellman_step_phase1(const Grid& grid, std::span<const LinkSnrTriple> scenarios,
                               std::span<const double> jbar1_next,
                               std::span<const double> jbar2_next, const StepOptions& opt) {
    const int m = grid.size();
    const int n_scen = static_cast<int>(scenarios.size());
    const std::size_t table = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    const auto miv = mi_inv_table(grid);
    const double step = grid.step;

    Phase1Step out;
    out.jbar.assign(table, 0.0);
    const bool keep = opt.keep_per_scenario;
    if (keep) {
        out.per_scenario.assign(static_cast<std::size_t>(n_scen), {});
        out.rates.assign(static_cast<std::size_t>(n_scen), {});
        out.switched.assign(static_cast<std::size_t>(n_scen), {});
    }

    const int chunks = std::min(kScenarioChunks, std::max(1, n_scen));
    std::vector<std::vector<double>> acc(static_cast<std::size_t>(chunks));

    run_chunked(n_scen, keep ? 1 : opt.threads, [&](int chunk, int n_chunks) {
        auto& sum = acc[static_cast<std::size_t>(chunk)];
        sum.assign(table, 0.0);
        std::vector<double> cost_a(static_cast<std::size_t>(m));
        std::vector<double> gval(static_cast<std::size_t>(m));
        std::vector<int> g_lo(static_cast<std::size_t>(m));
        std::vector<double> g_fr(static_cast<std::size_t>(m));
        std::vector<double> rth(static_cast<std::size_t>(m));
        std::vector<double> cell(table);
        std::vector<double> cell_rate;
        std::vector<std::uint8_t> cell_switch;

        for (int si = chunk; si < n_scen; si += n_chunks) {
            const auto& snr = scenarios[static_cast<std::size_t>(si)];
            if (keep) {
                cell_rate.assign(table, 0.0);
                cell_switch.assign(table, 0);
            }
            std::fill(cell.begin(), cell.end(), 0.0);

            if (!(snr.sd > 0.0)) {
                for (int r = 0; r < m; ++r)
                    for (int d = 1; d < m; ++d)
                        cell[static_cast<std::size_t>(r) * static_cast<std::size_t>(m) +
                             static_cast<std::size_t>(d)] = opt.value_cap;
            } else {
                const double a = 1.0 / snr.sd;
                const double ratio = snr.sr * a;
                for (int j = 0; j < m; ++j) {
                    cost_a[static_cast<std::size_t>(j)] = a * miv[static_cast<std::size_t>(j)];
                    const double g = std::log1p(miv[static_cast<std::size_t>(j)] * ratio);
                    gval[static_cast<std::size_t>(j)] = g;
                    const double gq = g / step;
                    // Offsets past the grid top behave like the clamped
                    // row-0 lookup, so the cast can saturate safely.
                    const double fl = std::min(std::floor(gq), static_cast<double>(m + 1));
                    g_lo[static_cast<std::size_t>(j)] = static_cast<int>(fl);
                    g_fr[static_cast<std::size_t>(j)] = std::max(0.0, gq - fl);
                }
                for (int r = 0; r < m; ++r)
                    rth[static_cast<std::size_t>(r)] =
                        snr.sr > 0.0 ? std::log1p(miv[static_cast<std::size_t>(r)] * snr.sd / snr.sr)
                                     : kInf;

                // Stay-branch evaluation at a grid candidate j for cell
                // (r, d): destination column lands exactly on d - j, the
                // relay coordinate r - g(j*step) interpolates between rows.
                auto stay_on_grid = [&](int r, int d, int j) {
                    const int rr = r - g_lo[static_cast<std::size_t>(j)];
                    const double fr = g_fr[static_cast<std::size_t>(j)];
                    const int col = d - j;
                    double cont;
                    if (rr <= 0) {
                        cont = jbar1_next[static_cast<std::size_t>(col)];
                    } else {
                        const double hi =
                            jbar1_next[static_cast<std::size_t>(rr) * static_cast<std::size_t>(m) +
                                       static_cast<std::size_t>(col)];
                        const double lo =
                            jbar1_next[static_cast<std::size_t>(rr - 1) * static_cast<std::size_t>(m) +
                                       static_cast<std::size_t>(col)];
                        cont = fr * lo + (1.0 - fr) * hi;
                    }
                    return cost_a[static_cast<std::size_t>(j)] + cont;
                };
                // Continuous counterparts (linearized tables) used only
                // for golden refinement around scanned winners.
                auto stay_cont = [&](int r, int d, double rate) {
                    const double u = rate / step;
                    const double g = lerp_at(gval, u, grid.cells, InterpKind::Linear);
                    return lerp_at(cost_a, u, grid.cells, InterpKind::Linear) +
                           interp2(jbar1_next, grid, grid.point(r) - g, grid.point(d) - rate,
                                   opt.interp);
                };
                auto switch_cont = [&](int d, double rate) {
                    return lerp_at(cost_a, rate / step, grid.cells, InterpKind::Linear) +
                           lerp_at(jbar2_next, (grid.point(d) - rate) / step, grid.cells, opt.interp);
                };

                for (int d = 1; d < m; ++d) {
                    // Unconstrained switch optimum for this column; per
                    // relay row the interval only shrinks from the left,
                    // so the constrained optimum is either this point or
                    // the left endpoint.
                    auto sw_on_grid = [&](int j) {
                        return cost_a[static_cast<std::size_t>(j)] +
                               jbar2_next[static_cast<std::size_t>(d - j)];
                    };
                    const int j2 = ternary_argmin(sw_on_grid, 0, d);
                    double ru = grid.point(j2);
                    double vu = sw_on_grid(j2);
                    golden_refine([&](double rate) { return switch_cont(d, rate); },
                                  grid.point(std::max(0, j2 - 1)),
                                  std::min(grid.point(d), grid.point(j2 + 1)),
                                  opt.inner.golden_iters, ru, vu);

                    const double dn = grid.point(d);
                    for (int r = 1; r < m; ++r) {
                        const double lo = std::min(rth[static_cast<std::size_t>(r)], dn);
                        double sw_v, sw_x;
                        if (lo <= ru) {
                            sw_v = vu;
                            sw_x = ru;
                        } else {
                            sw_x = lo;
                            sw_v = switch_cont(d, lo);
                        }

                        double st_v = kInf, st_x = 0.0;
                        if (lo > 0.0) {
                            const int jmax = std::min(d, static_cast<int>(lo / step));
                            const int stride = std::max(
                                1, (jmax + std::max(1, opt.inner.scan_cap)) /
                                       std::max(1, opt.inner.scan_cap));
                            int bj = 0;
                            double bv = stay_on_grid(r, d, 0);
                            for (int j = stride; j <= jmax; j += stride) {
                                const double v = stay_on_grid(r, d, j);
                                if (v < bv) {
                                    bv = v;
                                    bj = j;
                                }
                            }
                            st_x = grid.point(bj);
                            st_v = bv;
                            const double lo_b = std::max(0.0, grid.point(bj - stride));
                            const double hi_b = std::min(lo, grid.point(bj + stride));
                            golden_refine([&](double rate) { return stay_cont(r, d, rate); }, lo_b,
                                          hi_b, opt.inner.golden_iters, st_x, st_v);
                        }

                        const std::size_t idx = static_cast<std::size_t>(r) * static_cast<std::size_t>(m) +
                                                static_cast<std::size_t>(d);
                        if (sw_v <= st_v) {
                            cell[idx] = std::min(sw_v, opt.value_cap);
                            if (keep) {
                                cell_rate[idx] = sw_x;
                                cell_switch[idx] = 1;
                            }
                        } else {
                            cell[idx] = std::min(st_v, opt.value_cap);
                            if (keep) cell_rate[idx] = st_x;
                        }
                    }
                    // Relay row 0 is the already-decoded boundary: the
                    // stay interval is empty and the recursion reduces to
                    // the switch branch over the full column.
                    const std::size_t idx0 = static_cast<std::size_t>(d);
                    double v0 = vu, x0 = ru;
                    cell[idx0] = std::min(v0, opt.value_cap);
                    if (keep) {
                        cell_rate[idx0] = x0;
                        cell_switch[idx0] = 1;
                    }
                }
            }

            for (std::size_t i = 0; i < table; ++i) sum[i] += cell[i];
            if (keep) {
                out.per_scenario[static_cast<std::size_t>(si)] = cell;
                out.rates[static_cast<std::size_t>(si)] = cell_rate;
                out.switched[static_cast<std::size_t>(si)] = cell_switch;
            }
        }
    });

    const double inv_n = 1.0 / static_cast<double>(n_scen);
    for (int c = 0; c < chunks; ++c) {
        const auto& sum = acc[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < table; ++i) out.jbar[i] += sum[i];
    }
    for (auto& v : out.jbar) v *= inv_n;
    return out;
}

ValueTable solve(const SolverConfig& config) {
    config.validate();
    const int slots = config.slots;

    ValueTable out;
    out.config = config;
    out.grid = Grid::make(config.grid_step, config.total_info());
    out.scenarios = make_scenarios(config.channel, slots, config.n_scenarios, config.seed);
    out.jbar1.resize(static_cast<std::size_t>(slots) + 1);
    out.jbar2.resize(static_cast<std::size_t>(slots) + 1);

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    StepOptions opt;
    opt.interp = config.interp;
    opt.value_cap = config.value_cap;
    opt.inner = config.inner;
    opt.threads = threads;

    if (slots >= 2) {
        const auto& last = out.scenarios.draws[static_cast<std::size_t>(slots) - 1];
        out.jbar2[static_cast<std::size_t>(slots)] =
            terminal_phase2_table(out.grid, last, config.value_cap);
        out.jbar1[static_cast<std::size_t>(slots)] =
            terminal_phase1_table(out.grid, last, config.value_cap);
        for (int k = slots - 1; k >= 2; --k) {
            const auto& scen = out.scenarios.draws[static_cast<std::size_t>(k) - 1];
            out.jbar2[static_cast<std::size_t>(k)] =
                bellman_step_phase2(out.grid, scen, out.jbar2[static_cast<std::size_t>(k) + 1], opt)
                    .jbar;
            out.jbar1[static_cast<std::size_t>(k)] =
                bellman_step_phase1(out.grid, scen, out.jbar1[static_cast<std::size_t>(k) + 1],
                                    out.jbar2[static_cast<std::size_t>(k) + 1], opt)
                    .jbar;
        }
    }

    // Slot 1 starts at the exact initial residual (no grid snap needed;
    // only continuation lookups interpolate).
    const double total = config.total_info();
    const auto& first = out.scenarios.draws[0];
    const int n1 = static_cast<int>(first.size());
    out.slot1_values.resize(static_cast<std::size_t>(n1));
    out.slot1_rates.resize(static_cast<std::size_t>(n1));
    out.slot1_switch.resize(static_cast<std::size_t>(n1));

    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n1; ++i) {
        const auto& snr = first[static_cast<std::size_t>(i)];
        double value, rate;
        std::uint8_t switched;
        if (slots == 1) {
            value = terminal_power(Phase::Phase1, total, snr);
            rate = total;
            switched = 0;
        } else {
            const RateDecision dec =
                decide_phase1(ResidualInfo{total, total}, snr, out.grid, out.jbar1[2], out.jbar2[2],
                              config.interp, config.inner);
            value = dec.value;
            rate = dec.rate;
            switched = dec.switch_branch ? 1 : 0;
        }
        if (!(value < config.value_cap)) {
            value = config.value_cap;
            out.cap_hit = true;
        }
        out.slot1_values[static_cast<std::size_t>(i)] = value;
        out.slot1_rates[static_cast<std::size_t>(i)] = rate;
        out.slot1_switch[static_cast<std::size_t>(i)] = switched;
        sum += value;
        sumsq += value * value;
    }
    const double mean = sum / static_cast<double>(n1);
    const double var = std::max(0.0, sumsq / static_cast<double>(n1) - mean * mean);
    out.nmese = mean / static_cast<double>(slots);
    out.nmese_std_error = std::sqrt(var / static_cast<double>(n1)) / static_cast<double>(slots);

    for (const auto& t : out.jbar1)
        for (double v : t)
            if (v >= 0.999 * config.value_cap) out.cap_hit = true;
    return out;
}

} // namespace relaydp
