//! Symbolic subsets of R^{n+1}: membership, defining functions, bounds.
//!
//! Every primitive is open. `level` is a continuous defining function that is
//! negative inside and vanishes on the boundary; it is used for normals and
//! boundary snapping, while `contains` is the exact structural predicate.

use super::graph::GraphFn;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "geomset-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeSign {
    /// `x_{n+1} - a_{n+1} < -ℓ |x' - a'|`
    Down,
    /// `x_{n+1} - a_{n+1} > ℓ |x' - a'|`
    Up,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeomSet {
    Empty,
    Full,
    /// `{x : normal · x < offset}`
    HalfSpace { normal: Vec<f64>, offset: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : x_{n+1} < u(x')}`
    Subgraph { u: GraphFn },
    /// `{x : x_{n+1} < eps^{1-alpha} |x'|^alpha}` in R^{n+1}.
    Barrier { n: usize, alpha: f64, eps: f64 },
    Cone { slope: f64, apex: Vec<f64>, sign: ConeSign },
    /// Downward cone intersected with `B_radius(apex)`.
    TruncatedCone { slope: f64, apex: Vec<f64>, radius: f64 },
    /// Union of `B_{(apex - x)_{n+1}/4}(x)` over x in the truncated downward cone.
    IceCreamCone { slope: f64, apex: Vec<f64>, radius: f64 },
    Complement { set: Box<GeomSet> },
    Union { a: Box<GeomSet>, b: Box<GeomSet> },
    Intersection { a: Box<GeomSet>, b: Box<GeomSet> },
    Difference { a: Box<GeomSet>, b: Box<GeomSet> },
    Translate { set: Box<GeomSet>, by: Vec<f64> },
    Scale { set: Box<GeomSet>, factor: f64 },
}

/// Versioned JSON wrapper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeomDocument {
    pub version: String,
    pub set: GeomSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<crate::geometry::TailRegistration>,
}

impl GeomDocument {
    pub fn new(set: GeomSet) -> Self {
        Self { version: SCHEMA_VERSION.into(), set, tail: None }
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| crate::FracError::Input(e.to_string()))?;
        if doc.version != SCHEMA_VERSION {
            return Err(crate::FracError::Input(format!("unsupported schema version {}", doc.version)));
        }
        doc.set.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry serializes")
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn horiz_norm(x: &[f64]) -> f64 {
    norm(&x[..x.len() - 1])
}

/// Minimum of `|w - z| + z_{n+1}/4` over the closed truncated cone, reduced
/// to the plane spanned by `w'` and the vertical axis.
pub(crate) fn ice_cream_level(slope: f64, radius: f64, w: &[f64]) -> f64 {
    let d = w.len();
    let rw = horiz_norm(w);
    let h = w[d - 1];
    let f = |a: f64, b: f64| ((rw - a).hypot(h - b)) + 0.25 * b;
    if h < -slope * rw && rw.hypot(h) < radius {
        return 0.25 * h;
    }
    let a_max = radius / (1.0 + slope * slope).sqrt();
    let golden = |g: &dyn Fn(f64) -> f64, lo: f64, hi: f64| {
        // coarse scan then golden-section refinement around the best node
        let m = 48;
        let mut best = (lo, g(lo));
        for i in 1..=m {
            let t = lo + (hi - lo) * i as f64 / m as f64;
            let v = g(t);
            if v < best.1 {
                best = (t, v);
            }
        }
        let step = (hi - lo) / m as f64;
        let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut e = a + r * (b - a);
        let (mut fc, mut fe) = (g(c), g(e));
        for _ in 0..80 {
            if fc < fe {
                b = e;
                e = c;
                fe = fc;
                c = b - r * (b - a);
                fc = g(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + r * (b - a);
                fe = g(e);
            }
        }
        best.1.min(fc).min(fe)
    };
    let side = golden(&|a: f64| f(a, -slope * a), 0.0, a_max);
    let psi_max = (1.0 / slope).atan();
    let arc = golden(&|p: f64| f(radius * p.sin(), -radius * p.cos()), 0.0, psi_max);
    side.min(arc)
}

impl GeomSet {
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Self {
        GeomSet::HalfSpace { normal, offset }
    }

    /// `{x_{n+1} < -depth}` in R^{d}.
    pub fn lower_half_space(d: usize, depth: f64) -> Self {
        let mut normal = vec![0.0; d];
        normal[d - 1] = 1.0;
        GeomSet::HalfSpace { normal, offset: -depth }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        GeomSet::Ball { center, radius }
    }

    pub fn complement(self) -> Self {
        GeomSet::Complement { set: Box::new(self) }
    }

    pub fn union(self, other: GeomSet) -> Self {
        GeomSet::Union { a: Box::new(self), b: Box::new(other) }
    }

    pub fn intersect(self, other: GeomSet) -> Self {
        GeomSet::Intersection { a: Box::new(self), b: Box::new(other) }
    }

    pub fn minus(self, other: GeomSet) -> Self {
        GeomSet::Difference { a: Box::new(self), b: Box::new(other) }
    }

    pub fn translate(self, by: Vec<f64>) -> Self {
        GeomSet::Translate { set: Box::new(self), by }
    }

    pub fn scale(self, factor: f64) -> Self {
        GeomSet::Scale { set: Box::new(self), factor }
    }

    /// Ambient dimension if some node fixes it.
    pub fn dim(&self) -> Option<usize> {
        use GeomSet::*;
        match self {
            Empty | Full => None,
            HalfSpace { normal, .. } => Some(normal.len()),
            Ball { center, .. } => Some(center.len()),
            Subgraph { u } => u.terms.iter().find_map(|t| match t {
                super::graph::GraphTerm::Linear { grad } => Some(grad.len() + 1),
                super::graph::GraphTerm::RadialPower { center, .. } => Some(center.len() + 1),
                super::graph::GraphTerm::Gaussian { center, .. } => Some(center.len() + 1),
                _ => None,
            }),
            Barrier { n, .. } => Some(n + 1),
            Cone { apex, .. } | TruncatedCone { apex, .. } | IceCreamCone { apex, .. } => Some(apex.len()),
            Complement { set } | Scale { set, .. } => set.dim(),
            Translate { set, by } => set.dim().or(Some(by.len())),
            Union { a, b } | Intersection { a, b } | Difference { a, b } => a.dim().or(b.dim()),
        }
    }

    /// Checks radii, slopes, factors and dimension consistency.
    pub fn validate(&self) -> crate::Result<()> {
        use crate::FracError;
        use GeomSet::*;
        let bad = |m: &str| Err(FracError::Input(m.to_string()));
        match self {
            Empty | Full | Subgraph { .. } => {}
            HalfSpace { normal, .. } => {
                if norm(normal) == 0.0 {
                    return bad("half-space normal must be nonzero");
                }
            }
            Ball { radius, .. } => {
                if !(*radius > 0.0) {
                    return bad("ball radius must be positive");
                }
            }
            Barrier { n, alpha, eps } => {
                if *n == 0 || !(*alpha > 0.0 && *alpha < 1.0) || !(*eps > 0.0) {
                    return bad("barrier needs n ≥ 1, alpha in (0,1), eps > 0");
                }
            }
            Cone { slope, apex, .. } => {
                if !(*slope > 0.0) || apex.len() < 2 {
                    return bad("cone slope must be positive and apex in R^{n+1}");
                }
            }
            TruncatedCone { slope, radius, apex } | IceCreamCone { slope, radius, apex } => {
                if !(*slope > 0.0) || !(*radius > 0.0) || apex.len() < 2 {
                    return bad("cone slope and radius must be positive");
                }
            }
            Complement { set } => set.validate()?,
            Translate { set, .. } => set.validate()?,
            Scale { set, factor } => {
                if !(*factor > 0.0) {
                    return bad("scale factor must be positive");
                }
                set.validate()?
            }
            Union { a, b } | Intersection { a, b } | Difference { a, b } => {
                a.validate()?;
                b.validate()?;
                if let (Some(x), Some(y)) = (a.dim(), b.dim()) {
                    if x != y {
                        return bad("operands live in different dimensions");
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact membership with the open-set convention.
    pub fn contains(&self, x: &[f64]) -> bool {
        use GeomSet::*;
        let d = x.len();
        match self {
            Empty => false,
            Full => true,
            HalfSpace { normal, offset } => dot(normal, x) < *offset,
            Ball { center, radius } => norm(&sub(x, center)) < *radius,
            Subgraph { u } => x[d - 1] < u.value(&x[..d - 1]),
            Barrier { alpha, eps, .. } => x[d - 1] < eps.powf(1.0 - alpha) * horiz_norm(x).powf(*alpha),
            Cone { slope, apex, sign } => {
                let w = sub(x, apex);
                match sign {
                    ConeSign::Down => w[d - 1] < -slope * horiz_norm(&w),
                    ConeSign::Up => w[d - 1] > slope * horiz_norm(&w),
                }
            }
            TruncatedCone { slope, apex, radius } => {
                let w = sub(x, apex);
                w[d - 1] < -slope * horiz_norm(&w) && norm(&w) < *radius
            }
            IceCreamCone { slope, apex, radius } => ice_cream_level(*slope, *radius, &sub(x, apex)) < 0.0,
            Complement { set } => !set.contains(x),
            Union { a, b } => a.contains(x) || b.contains(x),
            Intersection { a, b } => a.contains(x) && b.contains(x),
            Difference { a, b } => a.contains(x) && !b.contains(x),
            Translate { set, by } => set.contains(&sub(x, by)),
            Scale { set, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v / factor).collect();
                set.contains(&y)
            }
        }
    }

    /// Continuous defining function (negative inside, zero on the boundary).
    pub fn level(&self, x: &[f64]) -> f64 {
        use GeomSet::*;
        let d = x.len();
        match self {
            Empty => f64::INFINITY,
            Full => f64::NEG_INFINITY,
            HalfSpace { normal, offset } => (dot(normal, x) - offset) / norm(normal),
            Ball { center, radius } => norm(&sub(x, center)) - radius,
            Subgraph { u } => x[d - 1] - u.value(&x[..d - 1]),
            Barrier { alpha, eps, .. } => x[d - 1] - eps.powf(1.0 - alpha) * horiz_norm(x).powf(*alpha),
            Cone { slope, apex, sign } => {
                let w = sub(x, apex);
                match sign {
                    ConeSign::Down => w[d - 1] + slope * horiz_norm(&w),
                    ConeSign::Up => slope * horiz_norm(&w) - w[d - 1],
                }
            }
            TruncatedCone { slope, apex, radius } => {
                let w = sub(x, apex);
                (w[d - 1] + slope * horiz_norm(&w)).max(norm(&w) - radius)
            }
            IceCreamCone { slope, apex, radius } => ice_cream_level(*slope, *radius, &sub(x, apex)),
            Complement { set } => -set.level(x),
            Union { a, b } => a.level(x).min(b.level(x)),
            Intersection { a, b } => a.level(x).max(b.level(x)),
            Difference { a, b } => a.level(x).max(-b.level(x)),
            Translate { set, by } => set.level(&sub(x, by)),
            Scale { set, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v / factor).collect();
                factor * set.level(&y)
            }
        }
    }

    /// Outward unit normal from a central difference of `level`.
    pub fn normal(&self, x: &[f64]) -> Option<Vec<f64>> {
        let h = 1e-7 * (1.0 + norm(x));
        let mut g = vec![0.0; x.len()];
        let mut y = x.to_vec();
        for i in 0..x.len() {
            y[i] = x[i] + h;
            let p = self.level(&y);
            y[i] = x[i] - h;
            let m = self.level(&y);
            y[i] = x[i];
            g[i] = (p - m) / (2.0 * h);
        }
        let l = norm(&g);
        if l.is_finite() && l > 0.0 {
            Some(g.iter().map(|v| v / l).collect())
        } else {
            None
        }
    }

    /// Bounding ball `(center, radius)` if the set is bounded.
    pub fn bounding_ball(&self) -> Option<(Vec<f64>, f64)> {
        use GeomSet::*;
        match self {
            Ball { center, radius } => Some((center.clone(), *radius)),
            TruncatedCone { apex, radius, .. } => Some((apex.clone(), *radius)),
            IceCreamCone { apex, radius, .. } => Some((apex.clone(), 2.0 * radius)),
            Empty => Some((Vec::new(), 0.0)),
            Union { a, b } => {
                let (ca, ra) = a.bounding_ball()?;
                let (cb, rb) = b.bounding_ball()?;
                if ra == 0.0 {
                    return Some((cb, rb));
                }
                if rb == 0.0 {
                    return Some((ca, ra));
                }
                Some((ca.clone(), ra.max(norm(&sub(&cb, &ca)) + rb)))
            }
            Intersection { a, b } => match (a.bounding_ball(), b.bounding_ball()) {
                (Some(x), Some(y)) => Some(if x.1 <= y.1 { x } else { y }),
                (Some(x), None) | (None, Some(x)) => Some(x),
                (None, None) => None,
            },
            Difference { a, .. } => a.bounding_ball(),
            Translate { set, by } => set.bounding_ball().map(|(c, r)| {
                if c.is_empty() {
                    (c, r)
                } else {
                    (c.iter().zip(by).map(|(a, b)| a + b).collect(), r)
                }
            }),
            Scale { set, factor } => set.bounding_ball().map(|(c, r)| (c.iter().map(|v| v * factor).collect(), r * factor)),
            _ => None,
        }
    }

    /// Projects `x` onto the boundary along the level gradient when
    /// `|level(x)| ≤ tol`; otherwise `None`.
    pub fn snap_to_boundary(&self, x: &[f64], tol: f64) -> Option<Vec<f64>> {
        let l = self.level(x);
        if !(l.abs() <= tol) {
            return None;
        }
        if l == 0.0 {
            return Some(x.to_vec());
        }
        let n = self.normal(x)?;
        let mut y: Vec<f64> = x.iter().zip(&n).map(|(a, b)| a - l * b).collect();
        for _ in 0..3 {
            let l2 = self.level(&y);
            if l2 == 0.0 {
                break;
            }
            y = y.iter().zip(&n).map(|(a, b)| a - l2 * b).collect();
        }
        Some(y)
    }
}
