//! Geometric intersection numbers by axis-linking enumeration.
//!
//! Fix the holonomy image A of the first curve and work in its eigenframe,
//! where the axis is the imaginary axis and one fundamental period is the
//! segment from i to e^L i (L the translation length). Lifts of the second
//! curve are the translates h . axis(B); each transverse crossing of the
//! closed geodesics corresponds to exactly one translate crossing the
//! half-open fundamental segment, after normalizing by powers of A. The
//! enumeration walks the left Cayley graph, dedups translates by their axis,
//! and stops once a whole breadth-first layer keeps distance greater than
//! L + margin from the segment base point; a crossing translate must come
//! within L of it. Hitting the word-length or node cap yields an uncertified
//! count, never a silent answer.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::canonical::CurveClass;
use crate::error::{Error, Result};
use crate::holonomy::Holonomy;
use crate::mat::Mat2;
use crate::word::GroupWord;

/// Tolerances and budgets for the enumeration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Cap on breadth-first depth (group word length over the marking).
    pub word_cap: usize,
    /// Safety margin added to the certification bound, in hyperbolic
    /// distance units.
    pub margin: f64,
    /// Crossing-parameter tolerance near segment endpoints.
    pub tangency_tol: f64,
    /// Cap on enumerated distinct translates.
    pub node_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            word_cap: 16,
            margin: 2.0,
            tangency_tol: 1e-10,
            node_cap: 2_000_000,
        }
    }
}

/// Outcome of one intersection computation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IntersectionResult {
    pub count: u64,
    pub certified: bool,
    pub radius_used: f64,
}

/// Boundary point of the upper half-plane; `None` is infinity.
type BPoint = Option<f64>;

fn moebius_boundary(m: &Mat2<f64>, p: BPoint) -> BPoint {
    let (num, den) = match p {
        Some(u) => (m.a * u + m.b, m.c * u + m.d),
        None => (m.a, m.c),
    };
    if den.abs() <= num.abs() * 1e-15 || den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Compactified coordinate for dedup keys: angle of the boundary circle.
fn boundary_angle(p: BPoint) -> f64 {
    match p {
        Some(u) => u.atan(),
        None => std::f64::consts::FRAC_PI_2,
    }
}

/// sinh of the distance from i to the geodesic with the given endpoints.
fn sinh_dist_to_i(u: BPoint, v: BPoint) -> f64 {
    match (u, v) {
        (Some(u), Some(v)) => {
            if u == v {
                return f64::INFINITY;
            }
            (1.0 + u * v).abs() / (u - v).abs()
        }
        (Some(u), None) | (None, Some(u)) => u.abs(),
        (None, None) => f64::INFINITY,
    }
}

struct Translate {
    rep: Mat2<f64>,
    u: BPoint,
    v: BPoint,
    depth: usize,
}

struct Enumeration {
    /// crossing positions: (period-normalized axis coordinate, endpoint tag)
    crossings: Vec<(f64, f64)>,
    certified: bool,
    max_dist_seen: f64,
}

/// Walk translates of `axis(B)` in the eigenframe of `A`.
///
/// `early_stop` returns as soon as one crossing is certain, leaving the
/// result uncertified but with a sound positive count.
fn enumerate_crossings(
    h: &Holonomy<f64>,
    seg_word: &GroupWord,
    other_word: &GroupWord,
    cfg: &EngineConfig,
    early_stop: bool,
) -> Result<Enumeration> {
    let a = h.evaluate(seg_word)?;
    let b = h.evaluate(other_word)?;
    let eps = crate::holonomy::EPS_PARABOLIC;
    if !a.is_hyperbolic(eps) {
        return Err(Error::NotHyperbolic(a.trace().abs()));
    }
    if !b.is_hyperbolic(eps) {
        return Err(Error::NotHyperbolic(b.trace().abs()));
    }
    let frame = a.eigenframe();
    let frame_inv = frame.inverse_unimodular();
    let seg_len = a.translation_length();
    let bound = seg_len + cfg.margin;

    // generators of the group in the segment frame, with inverses
    let mut gens: Vec<Mat2<f64>> = Vec::new();
    for g in h.generator_matrices() {
        let gg = frame_inv * *g * frame;
        gens.push(gg);
        gens.push(gg.inverse_unimodular());
    }
    let b_hat = frame_inv * b * frame;
    let (bu, bv) = b_hat.axis_endpoints();

    let axis_of = |m: &Mat2<f64>| -> (BPoint, BPoint) {
        (moebius_boundary(m, bu), moebius_boundary(m, bv))
    };

    // greedy descent to a nearby lift, so the walk starts close to the axis
    let mut start = Mat2::identity();
    let (mut su, mut sv) = axis_of(&start);
    let mut best = sinh_dist_to_i(su, sv);
    loop {
        let mut improved = false;
        for g in &gens {
            let cand = *g * start;
            let (cu, cv) = axis_of(&cand);
            let d = sinh_dist_to_i(cu, cv);
            if d < best * 0.999 {
                start = cand;
                (su, sv) = (cu, cv);
                best = d;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }

    let key_of = |u: BPoint, v: BPoint| -> (i64, i64) {
        let mut x = (boundary_angle(u) * 4e8).round() as i64;
        let mut y = (boundary_angle(v) * 4e8).round() as i64;
        // infinity wraps: +pi/2 and -pi/2 are the same boundary point
        let wrap = (std::f64::consts::FRAC_PI_2 * 4e8).round() as i64;
        if x == -wrap {
            x = wrap;
        }
        if y == -wrap {
            y = wrap;
        }
        if x > y {
            std::mem::swap(&mut x, &mut y);
        }
        (x, y)
    };

    let near_key = |key: (i64, i64), visited: &HashMap<(i64, i64), ()>| -> bool {
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                if visited.contains_key(&(key.0 + dx, key.1 + dy)) {
                    return true;
                }
            }
        }
        false
    };

    let mut visited: HashMap<(i64, i64), ()> = HashMap::new();
    let mut queue: std::collections::VecDeque<Translate> = Default::default();
    visited.insert(key_of(su, sv), ());
    queue.push_back(Translate {
        rep: start,
        u: su,
        v: sv,
        depth: 0,
    });

    let mut out = Enumeration {
        crossings: Vec::new(),
        certified: false,
        max_dist_seen: 0.0,
    };
    // a crossing translate passes within seg_len of the segment base point;
    // the walk expands everything within the extra safety margin
    let sinh_explore = bound.sinh();
    let mut frontier_cut = false;

    while let Some(t) = queue.pop_front() {
        let dist = sinh_dist_to_i(t.u, t.v);
        out.max_dist_seen = out.max_dist_seen.max(dist.asinh());

        // crossing test against the fundamental segment on the imaginary axis
        if let (Some(u), Some(v)) = (t.u, t.v) {
            if u * v < 0.0 {
                if u.abs().min(v.abs()) < 1e-13 {
                    return Err(Error::TangencyAmbiguity);
                }
                let s = 0.5 * (-u * v).ln();
                let m = (s / seg_len).floor();
                let s_norm = s - m * seg_len;
                if s_norm < cfg.tangency_tol || (seg_len - s_norm) < cfg.tangency_tol {
                    return Err(Error::TangencyAmbiguity);
                }
                // identify the crossing modulo the segment period; distinct
                // crossings of two closed geodesics are far apart, numeric
                // echoes of one crossing are not
                let scale = (-m * seg_len).exp();
                let neg = u.min(v) * scale;
                let tag = (-neg).ln();
                let mut duplicate = false;
                for &(cs, ct) in &out.crossings {
                    let d = (cs - s_norm).abs().max((ct - tag).abs());
                    if d < 1e-5 {
                        duplicate = true;
                        break;
                    }
                    if d < 1e-3 {
                        return Err(Error::TangencyAmbiguity);
                    }
                }
                if !duplicate {
                    out.crossings.push((s_norm, tag));
                    if early_stop {
                        return Ok(out);
                    }
                }
            }
        }

        // expand only translates inside the exploration collar
        if dist > sinh_explore {
            continue;
        }
        if t.depth >= cfg.word_cap || visited.len() >= cfg.node_cap {
            frontier_cut = true;
            continue;
        }
        for g in &gens {
            let cand = *g * t.rep;
            let (cu, cv) = axis_of(&cand);
            let key = key_of(cu, cv);
            if !near_key(key, &visited) {
                visited.insert(key, ());
                queue.push_back(Translate {
                    rep: cand.renormalized(),
                    u: cu,
                    v: cv,
                    depth: t.depth + 1,
                });
            }
        }
    }

    // certified when every translate within the collar was expanded and none
    // of the caps cut a pending near node
    if !frontier_cut {
        out.certified = true;
        out.max_dist_seen = bound;
    }
    Ok(out)
}

/// Geometric intersection number of two curve classes.
///
/// The enumeration runs in the frame of the shorter curve. `certified`
/// reports whether the walk provably covered the crossing region.
pub fn geometric_intersection(
    h: &Holonomy<f64>,
    x: &CurveClass,
    y: &CurveClass,
    cfg: &EngineConfig,
) -> Result<IntersectionResult> {
    if x == y {
        return Ok(IntersectionResult {
            count: 0,
            certified: true,
            radius_used: 0.0,
        });
    }
    let (lx, ly) = (h.length(x)?, h.length(y)?);
    let (seg, other) = if lx <= ly { (x, y) } else { (y, x) };
    let e = enumerate_crossings(h, seg.word(), other.word(), cfg, false)?;
    Ok(IntersectionResult {
        count: e.crossings.len() as u64,
        certified: e.certified,
        radius_used: e.max_dist_seen,
    })
}

/// Minimal self-crossing number of a (primitive) curve class.
///
/// Each self-crossing point of the closed geodesic appears twice along one
/// fundamental period, once per branch, so the translate count halves.
pub fn self_intersection(
    h: &Holonomy<f64>,
    x: &CurveClass,
    cfg: &EngineConfig,
) -> Result<IntersectionResult> {
    let e = enumerate_crossings(h, x.word(), x.word(), cfg, false)?;
    let n = e.crossings.len() as u64;
    if n % 2 != 0 {
        return Err(Error::Internal(format!(
            "odd self-crossing translate count {n}"
        )));
    }
    Ok(IntersectionResult {
        count: n / 2,
        certified: e.certified,
        radius_used: e.max_dist_seen,
    })
}

/// Simplicity certificate: zero certified self-crossings.
pub fn is_simple(h: &Holonomy<f64>, x: &CurveClass, cfg: &EngineConfig) -> Result<bool> {
    let r = self_intersection(h, x, cfg)?;
    if !r.certified {
        return Err(Error::WindowTooSmall(
            "self-intersection enumeration hit its caps".into(),
        ));
    }
    Ok(r.count == 0)
}

/// Fast disjointness verdict: `Some(true)` when certified disjoint,
/// `Some(false)` as soon as one genuine crossing is found (sound without
/// full certification), `None` when the caps were reached first.
pub fn certified_disjoint(
    h: &Holonomy<f64>,
    x: &CurveClass,
    y: &CurveClass,
    cfg: &EngineConfig,
) -> Result<Option<bool>> {
    if x == y {
        return Ok(Some(true));
    }
    let (lx, ly) = (h.length(x)?, h.length(y)?);
    let (seg, other) = if lx <= ly { (x, y) } else { (y, x) };
    let quick = enumerate_crossings(h, seg.word(), other.word(), cfg, true)?;
    if !quick.crossings.is_empty() {
        return Ok(Some(false));
    }
    if quick.certified {
        return Ok(Some(true));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_class;
    use crate::holonomy::{holonomy_from_fn, reference_holonomy, FNCoordinates};
    use crate::mapping::{humphries_curve, twist_power, TwistTarget};
    use crate::word::{Genus, GroupWord};

    fn g2() -> Genus {
        Genus::new(2).unwrap()
    }

    fn href() -> std::sync::Arc<Holonomy<f64>> {
        reference_holonomy(g2()).unwrap()
    }

    #[test]
    fn chain_pattern_is_reproduced() {
        let h = href();
        let cfg = EngineConfig::default();
        for j in 1..=5usize {
            for k in j..=5usize {
                let cj = humphries_curve(g2(), j).unwrap();
                let ck = humphries_curve(g2(), k).unwrap();
                let r = geometric_intersection(&h, &cj, &ck, &cfg).unwrap();
                let want = if k == j + 1 { 1 } else { 0 };
                assert!(r.certified, "({j},{k}) not certified");
                assert_eq!(r.count, want, "i(c{j}, c{k})");
            }
        }
    }

    #[test]
    fn chain_curves_are_simple() {
        let h = href();
        let cfg = EngineConfig::default();
        for j in 1..=5usize {
            let c = humphries_curve(g2(), j).unwrap();
            let r = self_intersection(&h, &c, &cfg).unwrap();
            assert!(r.certified);
            assert_eq!(r.count, 0, "chain curve {j}");
        }
    }

    #[test]
    fn twist_identity_matches_torus_slope_oracle() {
        // In the one-holed torus around two curves meeting once, twist
        // powers act on slopes, and intersection numbers are determinants:
        // i(T^k beta, beta) = |det((1,k),(1,0))| = |k|.
        let h = href();
        let cfg = EngineConfig::default();
        let c2 = humphries_curve(g2(), 2).unwrap();
        let t = TwistTarget::chain(1);
        for k in -3i64..=3 {
            let twisted = twist_power(g2(), &t, k, &c2).unwrap();
            let r = geometric_intersection(&h, &twisted, &c2, &cfg).unwrap();
            let slope_det = k.unsigned_abs();
            assert!(r.certified, "k={k} uncertified");
            assert_eq!(r.count, slope_det, "k={k}");
        }
    }

    #[test]
    fn commutator_class_is_separating_and_simple() {
        let h = href();
        let cfg = EngineConfig::default();
        let w = GroupWord::from_letters([1, 2, -1, -2]);
        let c = canonical_class(&w, g2()).unwrap();
        assert!(c.is_null_homologous());
        let r = self_intersection(&h, &c, &cfg).unwrap();
        assert!(r.certified);
        assert_eq!(r.count, 0, "handle boundary must be simple");
    }

    #[test]
    fn nonprimitive_homology_class_is_not_simple() {
        // a1 b1 a1^{-1} b1 has homology 2 b1, which no simple closed curve
        // carries.
        let h = href();
        let cfg = EngineConfig::default();
        let c = canonical_class(&GroupWord::from_letters([1, 2, -1, 2]), g2()).unwrap();
        let r = self_intersection(&h, &c, &cfg).unwrap();
        assert!(r.certified);
        assert!(r.count > 0);
    }

    #[test]
    fn metric_independence_on_sample_pairs() {
        let cfg = EngineConfig::default();
        let h1 = href();
        let fn2 =
            FNCoordinates::new(g2(), vec![1.4, 2.9, 2.2], vec![-0.8, 0.55, 1.3]).unwrap();
        let h2 = holonomy_from_fn::<f64>(&fn2).unwrap();
        let t = TwistTarget::chain(2);
        let mut pairs = Vec::new();
        for j in 1..=5usize {
            for k in 1..=5usize {
                let x = humphries_curve(g2(), j).unwrap();
                let y = twist_power(g2(), &t, 1, &humphries_curve(g2(), k).unwrap()).unwrap();
                pairs.push((x, y));
            }
        }
        for (x, y) in pairs {
            let a = geometric_intersection(&h1, &x, &y, &cfg).unwrap();
            let b = geometric_intersection(&h2, &x, &y, &cfg).unwrap();
            assert!(a.certified && b.certified);
            assert_eq!(a.count, b.count);
        }
    }

    #[test]
    fn symmetry_and_self_conventions() {
        let h = href();
        let cfg = EngineConfig::default();
        let x = humphries_curve(g2(), 1).unwrap();
        let y = humphries_curve(g2(), 2).unwrap();
        let a = geometric_intersection(&h, &x, &y, &cfg).unwrap();
        let b = geometric_intersection(&h, &y, &x, &cfg).unwrap();
        assert_eq!(a.count, b.count);
        // a class against itself (and its inverse) is 0 by convention
        let same = geometric_intersection(&h, &x, &x, &cfg).unwrap();
        assert_eq!(same.count, 0);
        let inv = canonical_class(&x.word().inverse(), g2()).unwrap();
        let r = geometric_intersection(&h, &x, &inv, &cfg).unwrap();
        assert_eq!(r.count, 0);
    }
}
