//! Grid-then-golden maximizers used by every sup/inf over exponents.
//!
//! All searches run in the reciprocal coordinate `u = 1/p`, so that the
//! exponent range `[1, inf)` becomes the bounded interval `(0, 1]` and the
//! limit `p -> inf` sits at the left end. Objectives are passed in log form
//! and `NaN` is treated as `-inf`.

use crate::psi::Support;

/// Numeric stand-in for `p = inf` on unbounded supports.
pub const P_MAX: f64 = 1e6;

/// Grid size for fundamental functions and conjugates.
pub const DEFAULT_GRID: usize = 2048;

/// Per-axis grid size for two-dimensional sups.
pub const DEFAULT_GRID_2D: usize = 512;

/// Relative nudge applied to open interval ends.
const OPEN_END_NUDGE: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Which part of the search interval the maximizer landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Edge {
    Interior,
    Low,
    High,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Max1d {
    pub p: f64,
    /// Log objective at `p`.
    pub value: f64,
    pub edge: Edge,
    /// The support was unbounded and the search stopped at [`P_MAX`].
    pub capped: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Max2d {
    pub p: f64,
    pub q: f64,
    pub value: f64,
}

#[inline]
fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Finite evaluation range `[p_lo, p_hi]` for a support, after nudging
/// open ends inward and capping infinity. `None` when empty.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EvalRange {
    pub p_lo: f64,
    pub p_hi: f64,
    pub capped: bool,
}

impl EvalRange {
    pub fn from_support(s: &Support) -> Option<Self> {
        if s.is_empty() {
            return None;
        }
        let p_lo = if s.lo_closed || s.lo.is_infinite() { s.lo } else { s.lo * (1.0 + OPEN_END_NUDGE) };
        let (p_hi, capped) = if s.hi.is_infinite() {
            (P_MAX, true)
        } else if s.hi_closed {
            (s.hi, false)
        } else {
            (s.hi * (1.0 - OPEN_END_NUDGE), false)
        };
        if !p_lo.is_finite() {
            return None;
        }
        if p_lo > p_hi {
            // Degenerate single point produced by rounding of conjugate exponents.
            if (p_lo - p_hi) <= 1e-9 * p_hi {
                return Some(EvalRange { p_lo: p_hi, p_hi, capped });
            }
            return None;
        }
        Some(EvalRange { p_lo, p_hi, capped })
    }

    #[inline]
    pub fn u_min(&self) -> f64 {
        1.0 / self.p_hi
    }

    #[inline]
    pub fn u_max(&self) -> f64 {
        1.0 / self.p_lo
    }

    /// Maps `u` back to `p`, clamped into the range so that endpoint
    /// round-off can never step outside a closed support.
    #[inline]
    pub fn p_of(&self, u: f64) -> f64 {
        (1.0 / u).clamp(self.p_lo, self.p_hi)
    }

    /// Sorted (ascending `p`) evaluation points: both ends exactly, a uniform
    /// grid in `u`, and geometric clusters toward either end.
    pub fn points(&self, n: usize) -> Vec<f64> {
        if self.p_lo == self.p_hi {
            return vec![self.p_lo];
        }
        let (a, b) = (self.u_min(), self.u_max());
        let w = b - a;
        let n = n.max(3);
        let mut us: Vec<f64> = Vec::with_capacity(n + 90);
        for k in 1..n - 1 {
            us.push(a + w * (k as f64) / ((n - 1) as f64));
        }
        let start = ((n as f64).log2().ceil() as i32).max(4);
        for j in start..=52 {
            let t = w * (2f64).powi(-j);
            us.push(a + t);
            us.push(b - t);
        }
        let mut ps: Vec<f64> = us.into_iter().filter(|u| *u > a && *u < b).map(|u| self.p_of(u)).collect();
        ps.push(self.p_lo);
        ps.push(self.p_hi);
        ps.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ps.dedup();
        ps
    }
}

/// Golden-section maximization of `f(u)` on `[a, b]`. Endpoints are not
/// evaluated.
pub(crate) fn golden_max(a: f64, b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = clean(f(c));
    let mut fd = clean(f(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = clean(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = clean(f(d));
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes a log objective over the support: dense grid in `u = 1/p`,
/// then golden-section refinement on the cell bracketing the best point.
/// Ties resolve to the smallest `p`.
pub(crate) fn maximize_p(support: &Support, grid: usize, f: impl Fn(f64) -> f64) -> Option<Max1d> {
    let range = EvalRange::from_support(support)?;
    maximize_in_range(&range, grid, f)
}

pub(crate) fn maximize_in_range(range: &EvalRange, grid: usize, f: impl Fn(f64) -> f64) -> Option<Max1d> {
    let ps = range.points(grid);
    let vals: Vec<f64> = ps.iter().map(|&p| clean(f(p))).collect();
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = i;
        }
    }
    if vals[best] == f64::NEG_INFINITY {
        return None;
    }
    let mut p = ps[best];
    let mut value = vals[best];
    if ps.len() > 1 {
        let lo_i = best.saturating_sub(1);
        let hi_i = (best + 1).min(ps.len() - 1);
        let (u_a, u_b) = (1.0 / ps[hi_i], 1.0 / ps[lo_i]);
        let (u, v) = golden_max(u_a, u_b, |u| f(range.p_of(u)));
        if v > value {
            value = v;
            p = range.p_of(u);
        }
    }
    let near = |x: f64| (p - x).abs() <= 1e-9 * x;
    let edge = if near(range.p_lo) {
        Edge::Low
    } else if near(range.p_hi) {
        Edge::High
    } else {
        Edge::Interior
    };
    Some(Max1d { p, value, edge, capped: range.capped })
}

/// Feasible region for two-dimensional sups in `(u, w) = (1/p, 1/q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Region {
    /// `u + w <= 1 - margin`.
    Triangle {
        margin: f64,
    },
    Rectangle,
}

impl Region {
    #[inline]
    fn cap(&self, u: f64) -> f64 {
        match self {
            Region::Triangle { margin } => 1.0 - margin - u,
            Region::Rectangle => f64::INFINITY,
        }
    }
}

/// Pattern search from a starting point: golden-section line searches along
/// the `u` axis, the `w` axis, and the anti-diagonal `u + w = const`, repeated
/// until no direction improves.
fn refine_2d(
    rp: &EvalRange,
    rq: &EvalRange,
    region: Region,
    f: &impl Fn(f64, f64) -> f64,
    mut u: f64,
    mut w: f64,
    mut value: f64,
) -> (f64, f64, f64) {
    let (u_min, u_max) = (rp.u_min(), rp.u_max());
    let (w_min, w_max) = (rq.u_min(), rq.u_max());
    for _ in 0..60 {
        let start = value;
        // u axis
        let hi = u_max.min(region.cap(w));
        if hi > u_min {
            let (cu, cv) = golden_max(u_min, hi, |x| f(x, w));
            if cv > value {
                u = cu;
                value = cv;
            }
        }
        // w axis
        let hi = w_max.min(region.cap(u));
        if hi > w_min {
            let (cw, cv) = golden_max(w_min, hi, |y| f(u, y));
            if cv > value {
                w = cw;
                value = cv;
            }
        }
        // anti-diagonal: (u + t, w - t)
        let t_lo = (u_min - u).max(w - w_max);
        let t_hi = (u_max - u).min(w - w_min);
        if t_hi > t_lo {
            let (t, cv) = golden_max(t_lo, t_hi, |t| f(u + t, w - t));
            if cv > value {
                u += t;
                w -= t;
                value = cv;
            }
        }
        if value - start <= 1e-15 * value.abs().max(1.0) {
            break;
        }
    }
    (u, w, value)
}

/// Two-dimensional sup of `a(p) + b(q)` over the region. The grid stage is
/// exact over the product grid: with the `q` axis sorted by `w`, the best
/// feasible partner of each `p` is a prefix maximum.
pub(crate) fn maximize_separable(
    sp: &Support,
    sq: &Support,
    region: Region,
    grid: usize,
    a: impl Fn(f64) -> f64,
    b: impl Fn(f64) -> f64,
) -> Option<Max2d> {
    let rp = EvalRange::from_support(sp)?;
    let rq = EvalRange::from_support(sq)?;
    let ps = rp.points(grid);
    let mut qs = rq.points(grid);
    // ascending w == descending q
    qs.reverse();
    let av: Vec<f64> = ps.iter().map(|&p| clean(a(p))).collect();
    let bv: Vec<f64> = qs.iter().map(|&q| clean(b(q))).collect();
    let ws: Vec<f64> = qs.iter().map(|q| 1.0 / q).collect();
    let mut prefix = Vec::with_capacity(bv.len());
    let mut arg = 0usize;
    for j in 0..bv.len() {
        if bv[j] > bv[arg] {
            arg = j;
        }
        prefix.push(arg);
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, &p) in ps.iter().enumerate() {
        if av[i] == f64::NEG_INFINITY {
            continue;
        }
        let cap = region.cap(1.0 / p);
        let k = ws.partition_point(|&w| w <= cap);
        if k == 0 {
            continue;
        }
        let j = prefix[k - 1];
        let v = av[i] + bv[j];
        if v > best.map_or(f64::NEG_INFINITY, |b| b.2) {
            best = Some((i, j, v));
        }
    }
    let (i, j, v) = best?;
    let f = |u: f64, w: f64| clean(a(rp.p_of(u))) + clean(b(rq.p_of(w)));
    let (u, w, value) = refine_2d(&rp, &rq, region, &f, 1.0 / ps[i], 1.0 / qs[j], v);
    let (p, q) = if value > v { (rp.p_of(u), rq.p_of(w)) } else { (ps[i], qs[j]) };
    Some(Max2d { p, q, value: value.max(v) })
}

/// Two-dimensional sup of an arbitrary log objective `f(p, q)` by full grid
/// scan plus pattern-search refinement.
pub(crate) fn maximize_2d(
    sp: &Support,
    sq: &Support,
    region: Region,
    grid: usize,
    f: impl Fn(f64, f64) -> f64,
) -> Option<Max2d> {
    let rp = EvalRange::from_support(sp)?;
    let rq = EvalRange::from_support(sq)?;
    let ps = rp.points(grid);
    let qs = rq.points(grid);
    let mut best: Option<(f64, f64, f64)> = None;
    for &p in &ps {
        let cap = region.cap(1.0 / p);
        for &q in &qs {
            if 1.0 / q > cap {
                continue;
            }
            let v = clean(f(p, q));
            if v > best.map_or(f64::NEG_INFINITY, |b| b.2) {
                best = Some((p, q, v));
            }
        }
    }
    let (p0, q0, v0) = best?;
    let g = |u: f64, w: f64| clean(f(rp.p_of(u), rq.p_of(w)));
    let (u, w, value) = refine_2d(&rp, &rq, region, &g, 1.0 / p0, 1.0 / q0, v0);
    if value > v0 {
        Some(Max2d { p: rp.p_of(u), q: rq.p_of(w), value })
    } else {
        Some(Max2d { p: p0, q: q0, value: v0 })
    }
}
