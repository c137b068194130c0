//! Exact (or bracketed) traces of sets on straight lines `o + t d`.
//!
//! A trace is a sorted list of disjoint open intervals in t, possibly
//! unbounded. Quadric primitives are solved in closed form; subgraphs and
//! ice-cream cones are bracketed on a geometric grid and bisected.

use super::set::{dot, norm, sub, ConeSign, GeomSet};

pub type Intervals = Vec<(f64, f64)>;

/// Sampling controls for non-quadric pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineOpts {
    /// Smallest |t| sampled around t = 0.
    pub t_min: f64,
    /// Largest |t| sampled; the sign found there is extended to infinity.
    pub horizon: f64,
    /// Ratio of the geometric sample grid.
    pub ratio: f64,
}

impl Default for LineOpts {
    fn default() -> Self {
        Self { t_min: 1e-7, horizon: 1e7, ratio: 1.15 }
    }
}

pub fn complement(iv: &Intervals) -> Intervals {
    let mut out = Vec::new();
    let mut cur = f64::NEG_INFINITY;
    for &(a, b) in iv {
        if a > cur {
            out.push((cur, a));
        }
        cur = b;
    }
    if cur < f64::INFINITY {
        out.push((cur, f64::INFINITY));
    }
    out
}

pub fn intersect(x: &Intervals, y: &Intervals) -> Intervals {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < x.len() && j < y.len() {
        let a = x[i].0.max(y[j].0);
        let b = x[i].1.min(y[j].1);
        if a < b {
            out.push((a, b));
        }
        if x[i].1 < y[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

pub fn union(x: &Intervals, y: &Intervals) -> Intervals {
    complement(&intersect(&complement(x), &complement(y)))
}

/// Builds a trace from candidate crossing parameters by testing the
/// midpoint of every piece.
fn from_candidates(mut roots: Vec<f64>, inside: impl Fn(f64) -> bool) -> Intervals {
    roots.retain(|r| r.is_finite());
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup();
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(roots);
    edges.push(f64::INFINITY);
    let mut out: Intervals = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = match (a.is_finite(), b.is_finite()) {
            (true, true) => 0.5 * (a + b),
            (true, false) => a + 1.0 + a.abs(),
            (false, true) => b - 1.0 - b.abs(),
            (false, false) => 0.0,
        };
        if inside(m) {
            match out.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => out.push((a, b)),
            }
        }
    }
    out
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = vec![q / a];
    if q != 0.0 {
        r.push(c / q);
    }
    r
}

fn at(o: &[f64], d: &[f64], t: f64) -> Vec<f64> {
    o.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

fn bisect(h: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = h(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = h(m);
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Sign changes of `h` on a symmetric geometric grid in t.
fn grid_roots(h: impl Fn(f64) -> f64, opts: &LineOpts, extra: Vec<f64>) -> Vec<f64> {
    let mut ts = extra;
    ts.push(0.0);
    let mut t = opts.t_min;
    while t < opts.horizon {
        ts.push(t);
        ts.push(-t);
        t *= opts.ratio;
    }
    ts.push(opts.horizon);
    ts.push(-opts.horizon);
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    let vals: Vec<f64> = ts.iter().map(|&t| h(t)).collect();
    let mut roots = Vec::new();
    for i in 0..ts.len() - 1 {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 {
            roots.push(ts[i]);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            roots.push(bisect(&h, ts[i], ts[i + 1]));
        }
    }
    // grazing pairs: a sampled local extremum of |h| may hide two crossings
    for i in 1..ts.len() - 1 {
        let (l, c, r) = (vals[i - 1], vals[i], vals[i + 1]);
        let pos = c > 0.0;
        if (l > 0.0) != pos || (r > 0.0) != pos || l == 0.0 || r == 0.0 || c == 0.0 {
            continue;
        }
        let towards_zero = if pos { c <= l && c <= r } else { c >= l && c >= r };
        if !towards_zero {
            continue;
        }
        let g = |t: f64| if pos { h(t) } else { -h(t) };
        let (tm, vm) = golden_min(&g, ts[i - 1], ts[i + 1]);
        if vm < 0.0 {
            roots.push(bisect(&h, ts[i - 1], tm));
            roots.push(bisect(&h, tm, ts[i + 1]));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

fn golden_min(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let k = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - k * (b - a);
    let mut x2 = a + k * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1.min(f2) < 0.0 || b - a <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - k * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + k * (b - a);
            f2 = g(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Uniform samples, `width / 16` apart, where the horizontal projection of the
/// line passes within `8 width` of a bump centre. The geometric grid alone can
/// step over a short chord through a bump seen at a shallow angle.
fn feature_samples(features: &[(Vec<f64>, f64)], o: &[f64], d: &[f64], horizon: f64) -> Vec<f64> {
    let n = o.len() - 1;
    let (oh, dh) = (&o[..n], &d[..n]);
    let a = dot(dh, dh);
    let mut out = Vec::new();
    if a == 0.0 {
        return out;
    }
    for (c, w) in features {
        let wc: Vec<f64> = (0..n).map(|i| oh[i] - c.get(i).copied().unwrap_or(0.0)).collect();
        let reach = 8.0 * w;
        let b = dot(&wc, dh);
        let disc = b * b - a * (dot(&wc, &wc) - reach * reach);
        if disc <= 0.0 {
            continue;
        }
        let lo = ((-b - disc.sqrt()) / a).max(-horizon);
        let hi = ((-b + disc.sqrt()) / a).min(horizon);
        if lo >= hi {
            continue;
        }
        let step = w / 16.0 / a.sqrt();
        let k = ((hi - lo) / step).ceil().min(1e5) as usize;
        out.extend((0..=k).map(|i| lo + (hi - lo) * i as f64 / k.max(1) as f64));
    }
    out
}

/// Trace of `set` on the line `o + t d` (d need not be unit length).
pub fn line_intervals(set: &GeomSet, o: &[f64], d: &[f64], opts: &LineOpts) -> Intervals {
    use GeomSet::*;
    let dim = o.len();
    let all = vec![(f64::NEG_INFINITY, f64::INFINITY)];
    match set {
        Empty => vec![],
        Full => all,
        HalfSpace { normal, offset } => {
            let a = dot(normal, d);
            let b = offset - dot(normal, o);
            if a > 0.0 {
                vec![(f64::NEG_INFINITY, b / a)]
            } else if a < 0.0 {
                vec![(b / a, f64::INFINITY)]
            } else if b > 0.0 {
                all
            } else {
                vec![]
            }
        }
        Ball { center, radius } => {
            let w = sub(o, center);
            let a = dot(d, d);
            let b = 2.0 * dot(&w, d);
            let c = dot(&w, &w) - radius * radius;
            let mut r = quadratic_roots(a, b, c);
            if r.len() < 2 {
                return vec![];
            }
            r.sort_by(|x, y| x.partial_cmp(y).unwrap());
            if r[0] < r[1] {
                vec![(r[0], r[1])]
            } else {
                vec![]
            }
        }
        Cone { slope, apex, .. } | TruncatedCone { slope, apex, .. } => {
            let w = sub(o, apex);
            let (z0, dz) = (w[dim - 1], d[dim - 1]);
            let (wh, dh) = (&w[..dim - 1], &d[..dim - 1]);
            let l2 = slope * slope;
            let a = dz * dz - l2 * dot(dh, dh);
            let b = 2.0 * z0 * dz - l2 * 2.0 * dot(wh, dh);
            let c = z0 * z0 - l2 * dot(wh, wh);
            let mut roots = quadratic_roots(a, b, c);
            // the cone apex itself, where |w(t)| is not smooth
            let dd = dot(dh, dh);
            if dd > 0.0 {
                roots.push(-dot(wh, dh) / dd);
            }
            let cone_only = match set {
                TruncatedCone { .. } => Cone { slope: *slope, apex: apex.clone(), sign: ConeSign::Down },
                _ => set.clone(),
            };
            let tr = from_candidates(roots, |t| cone_only.contains(&at(o, d, t)));
            if let TruncatedCone { radius, .. } = set {
                intersect(&tr, &line_intervals(&Ball { center: apex.clone(), radius: *radius }, o, d, opts))
            } else {
                tr
            }
        }
        IceCreamCone { apex, radius, .. } => {
            let chord = line_intervals(&Ball { center: apex.clone(), radius: 2.0 * radius }, o, d, opts);
            let Some(&(a, b)) = chord.first() else { return vec![] };
            let m = 400;
            let h = |t: f64| set.level(&at(o, d, t));
            let mut roots = Vec::new();
            let mut prev = (a, h(a));
            for i in 1..=m {
                let t = a + (b - a) * i as f64 / m as f64;
                let v = h(t);
                if (v < 0.0) != (prev.1 < 0.0) {
                    roots.push(bisect(&h, prev.0, t));
                }
                prev = (t, v);
            }
            intersect(&from_candidates(roots, |t| set.contains(&at(o, d, t))), &chord)
        }
        Subgraph { .. } | Barrier { .. } => {
            let h = |t: f64| set.level(&at(o, d, t));
            if d[..dim - 1].iter().all(|v| *v == 0.0) {
                // vertical line: a single crossing
                let dz = d[dim - 1];
                if dz == 0.0 {
                    return if set.contains(o) { all } else { vec![] };
                }
                let z0 = o[dim - 1];
                let top = z0 - set.level(o);
                let t = (top - z0) / dz;
                return if dz > 0.0 { vec![(f64::NEG_INFINITY, t)] } else { vec![(t, f64::INFINITY)] };
            }
            let scale = norm(d).max(1e-300);
            let local = LineOpts { t_min: opts.t_min / scale, horizon: opts.horizon / scale, ratio: opts.ratio };
            let extra = match set {
                Subgraph { u } => feature_samples(&u.features(), o, d, local.horizon),
                _ => Vec::new(),
            };
            let roots = grid_roots(h, &local, extra);
            let hz = local.horizon;
            from_candidates(roots, |t| {
                // beyond the horizon the sign at the horizon is kept
                let tt = t.clamp(-hz, hz);
                set.contains(&at(o, d, tt))
            })
        }
        Complement { set } => complement(&line_intervals(set, o, d, opts)),
        Union { a, b } => union(&line_intervals(a, o, d, opts), &line_intervals(b, o, d, opts)),
        Intersection { a, b } => intersect(&line_intervals(a, o, d, opts), &line_intervals(b, o, d, opts)),
        Difference { a, b } => intersect(&line_intervals(a, o, d, opts), &complement(&line_intervals(b, o, d, opts))),
        Translate { set, by } => line_intervals(set, &sub(o, by), d, opts),
        Scale { set, factor } => {
            let oo: Vec<f64> = o.iter().map(|v| v / factor).collect();
            let dd: Vec<f64> = d.iter().map(|v| v / factor).collect();
            line_intervals(set, &oo, &dd, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_against_membership(set: &GeomSet, o: &[f64], d: &[f64]) {
        let iv = line_intervals(set, o, d, &LineOpts::default());
        for k in 0..2001 {
            let t = -10.0 + 0.01 * k as f64 + 0.00037;
            let inside = iv.iter().any(|&(a, b)| a < t && t < b);
            assert_eq!(inside, set.contains(&at(o, d, t)), "t={t} iv={iv:?}");
        }
    }

    #[test]
    fn traces_agree_with_membership() {
        let sets = vec![
            GeomSet::ball(vec![0.5, -0.2], 1.3),
            GeomSet::half_space(vec![0.3, 1.0], 0.2),
            GeomSet::Cone { slope: 0.7, apex: vec![0.1, 0.4], sign: ConeSign::Down },
            GeomSet::Cone { slope: 1.7, apex: vec![0.1, 0.4], sign: ConeSign::Up },
            GeomSet::TruncatedCone { slope: 0.5, apex: vec![0.0, 1.0], radius: 3.0 },
            GeomSet::Barrier { n: 1, alpha: 0.5, eps: 1.0 },
            GeomSet::IceCreamCone { slope: 0.5, apex: vec![0.0, 1.0], radius: 2.0 },
            GeomSet::Barrier { n: 1, alpha: 0.3, eps: 2.0 }
                .minus(GeomSet::ball(vec![2.0, 0.5], 0.7))
                .union(GeomSet::ball(vec![-3.0, 4.0], 1.0))
                .scale(1.5)
                .translate(vec![0.2, -0.3]),
        ];
        let dirs = [[1.0, 0.3], [0.2, -1.0], [-0.6, 0.8], [1.0, 0.0], [0.0, 1.0]];
        for s in &sets {
            for d in &dirs {
                check_against_membership(s, &[0.13, -0.41], d);
            }
        }
    }

    #[test]
    fn short_chords_through_narrow_bumps_are_found() {
        use crate::geometry::{GraphFn, GraphTerm};
        let u = GraphFn { terms: vec![GraphTerm::Gaussian { amp: 0.3, center: vec![6.0], width: 0.15 }] };
        let set = GeomSet::Subgraph { u };
        // the line clears the bump top by 1% of its height only on a 0.03-long chord
        let o = [0.0, 0.297 - 6.0 * 0.001];
        let d = [1.0, 0.001];
        let iv = line_intervals(&set, &o, &d, &LineOpts::default());
        assert!(iv.iter().any(|&(a, b)| a > 5.9 && b < 6.1), "{iv:?}");
        for k in 0..4001 {
            let t = 5.0 + 0.0005 * k as f64 + 1.7e-5;
            let inside = iv.iter().any(|&(a, b)| a < t && t < b);
            assert_eq!(inside, set.contains(&at(&o, &d, t)), "t={t} iv={iv:?}");
        }
    }

    #[test]
    fn interval_algebra() {
        let x = vec![(f64::NEG_INFINITY, 0.0), (1.0, 2.0)];
        let y = vec![(-1.0, 1.5)];
        assert_eq!(intersect(&x, &y), vec![(-1.0, 0.0), (1.0, 1.5)]);
        assert_eq!(union(&x, &y), vec![(f64::NEG_INFINITY, 2.0)]);
        assert_eq!(complement(&x), vec![(0.0, 1.0), (2.0, f64::INFINITY)]);
    }
}
