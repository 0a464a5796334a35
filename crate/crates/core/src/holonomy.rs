//! Holonomy representations from Fenchel-Nielsen data on the chain pants
//! decomposition.
//!
//! The decomposition cuts the surface along the g+1 odd chain curves into
//! two planar sheets, each split linearly into pants by g-2 further curves
//! (the sheet splitters). Each pants is realized as an explicit two-generator
//! group with prescribed boundary traces; pants are glued by crossing
//! matrices that align boundary axes with opposite orientations and insert
//! the twist translation. The chain generators u_k acquire matrices through
//! the stable-letter identities
//!
//! ```text
//! u_{2k-1} = boundary loop of chain curve k (tree-embedded)
//! u_{2k}   = u_{2k-1}^{-1} tau_k tau_{k+1}^{-1}
//! ```
//!
//! where tau_k is the loop entering the lower sheet through chain curve k
//! and returning through chain curve 1. The marking generators are then
//! evaluated from their chain words and checked against the surface relator.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::canonical::CurveClass;
use crate::error::{Error, Result};
use crate::marking::{marking_tables, MarkingTables};
use crate::mat::Mat2;
use crate::scalar::Real;
use crate::word::{Genus, GroupWord};

/// Default cap on matrix entry magnitude before a product reports
/// `PrecisionOverflow`.
pub const DEFAULT_ENTRY_CAP: f64 = 1e300;
/// Margin separating hyperbolic traces from parabolic ones.
pub const EPS_PARABOLIC: f64 = 1e-8;
/// Acceptable distance of the relator image from +/- identity.
pub const RELATOR_TOL: f64 = 1e-9;
/// Acceptable mismatch between a pants-curve length and its input.
pub const PANTS_LENGTH_TOL: f64 = 1e-6;

/// Fenchel-Nielsen coordinates over the chain pants decomposition.
///
/// Curve order: the g+1 odd chain curves, then for j = 2..g-1 the upper and
/// lower sheet splitters. Twists are in length units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FNCoordinates {
    pub genus: Genus,
    #[serde(rename = "fn")]
    pub data: FNData,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FNData {
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

impl FNCoordinates {
    pub fn new(genus: Genus, lengths: Vec<f64>, twists: Vec<f64>) -> Result<Self> {
        let fnc = FNCoordinates {
            genus,
            data: FNData { lengths, twists },
        };
        fnc.validate()?;
        Ok(fnc)
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.genus.pants_count();
        if self.data.lengths.len() != want || self.data.twists.len() != want {
            return Err(Error::InvalidInput(format!(
                "expected {want} lengths and twists for genus {}",
                self.genus.get()
            )));
        }
        for (i, &l) in self.data.lengths.iter().enumerate() {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::ConstructionFailure(
                    format!("pants curve {i} has non-positive length {l}"),
                    0.0,
                ));
            }
        }
        if self.data.twists.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("twists must be finite".into()));
        }
        Ok(())
    }

    pub fn lengths(&self) -> &[f64] {
        &self.data.lengths
    }

    pub fn twists(&self) -> &[f64] {
        &self.data.twists
    }
}

/// Axis of a hyperbolic isometry: boundary fixed points and translation
/// length. `None` encodes the point at infinity.
#[derive(Clone, Copy, Debug)]
pub struct Axis<R: Real> {
    pub attracting: Option<R>,
    pub repelling: Option<R>,
    pub translation_length: R,
}

impl<R: Real> Axis<R> {
    pub fn of(m: &Mat2<R>) -> Result<Axis<R>> {
        if !m.is_hyperbolic(R::from_f64(EPS_PARABOLIC)) {
            return Err(Error::NotHyperbolic(m.trace().abs().to_f64()));
        }
        let (att, rep) = m.axis_endpoints();
        Ok(Axis {
            attracting: att,
            repelling: rep,
            translation_length: m.translation_length(),
        })
    }
}

/// A pair of pants with prescribed boundary lengths, in its local frame.
///
/// Boundary words are X, Y and Z = (XY)^{-1}; the boundary traces are
/// 2 cosh(l1/2), 2 cosh(l2/2) and -2 cosh(l3/2), the discrete triple.
struct PantsBlock<R: Real> {
    boundary: [Mat2<R>; 3],
    /// Eigenframe of each boundary matrix: conjugates it to the diagonal
    /// with the attracting eigenvalue first. The frame fixes the twist
    /// origin on each curve.
    frame: [Mat2<R>; 3],
}

impl<R: Real> PantsBlock<R> {
    fn new(l1: R, l2: R, l3: R) -> Result<Self> {
        let two = R::from_f64(2.0);
        let (h1, h2, h3) = (l1 / two, l2 / two, l3 / two);
        let x = Mat2::new(h1.exp(), R::zero(), R::zero(), (-h1).exp());
        // seam length between boundaries 1 and 2 from the right-angled
        // hexagon relation
        let cosh_seam = (h3.cosh() + h1.cosh() * h2.cosh()) / (h1.sinh() * h2.sinh());
        let s = cosh_seam.acosh() / two;
        let g = Mat2::new(s.cosh(), s.sinh(), s.sinh(), s.cosh());
        let y_diag = Mat2::new((-h2).exp(), R::zero(), R::zero(), h2.exp());
        let y = g * y_diag * g.inverse_unimodular();
        let z = (x * y).inverse_unimodular();
        let want = -two * h3.cosh();
        if ((z.trace() - want) / want).abs().to_f64() > 1e-9 {
            return Err(Error::ConstructionFailure(
                "pants block trace identity failed".into(),
                (z.trace() - want).abs().to_f64(),
            ));
        }
        let frame = [x.eigenframe(), y.eigenframe(), z.eigenframe()];
        Ok(PantsBlock {
            boundary: [x, y, z],
            frame,
        })
    }
}

/// Vertex of the pants graph: sheet 0 is upper, 1 is lower; position is the
/// 1-based index along the sheet (1..=g-1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct PantsId {
    sheet: usize,
    pos: usize,
}

/// (pants, slot) location of one side of a decomposition curve.
#[derive(Clone, Copy, Debug)]
struct SlotRef {
    pants: PantsId,
    slot: usize,
}

/// Combinatorics of the chain decomposition: which pants carry which curve.
struct PantsGraph {
    genus: Genus,
}

impl PantsGraph {
    /// Edge index of chain curve gamma_i (1-based).
    fn gamma_edge(&self, i: usize) -> usize {
        i - 1
    }

    /// Edge index of the sheet splitter j (2..=g-1) on the given sheet.
    fn splitter_edge(&self, sheet: usize, j: usize) -> usize {
        let g = self.genus.get() as usize;
        g + 1 + 2 * (j - 2) + sheet
    }

    /// Boundary edges (slot order X, Y, Z) of a pants.
    fn slots(&self, p: PantsId) -> [usize; 3] {
        let g = self.genus.get() as usize;
        let last = g - 1;
        let x = if p.pos == 1 {
            self.gamma_edge(1)
        } else {
            self.splitter_edge(p.sheet, p.pos)
        };
        let y = self.gamma_edge(p.pos + 1);
        let z = if p.pos == last {
            self.gamma_edge(g + 1)
        } else {
            self.splitter_edge(p.sheet, p.pos + 1)
        };
        [x, y, z]
    }

    /// Both sides of chain curve gamma_i.
    fn gamma_sides(&self, i: usize) -> (SlotRef, SlotRef) {
        let g = self.genus.get() as usize;
        let (pos, slot) = if i == 1 {
            (1, 0)
        } else if i <= g {
            (i - 1, 1)
        } else {
            (g - 1, 2)
        };
        (
            SlotRef {
                pants: PantsId { sheet: 0, pos },
                slot,
            },
            SlotRef {
                pants: PantsId { sheet: 1, pos },
                slot,
            },
        )
    }
}

/// Holonomy representation of the surface group: one matrix per marking
/// generator, validated against the relator and the pants-curve lengths.
#[derive(Clone, Debug)]
pub struct Holonomy<R: Real = f64> {
    genus: Genus,
    gens: Vec<Mat2<R>>,
    relator_residual: f64,
    entry_cap: R,
    marking: Arc<MarkingTables>,
}

impl<R: Real> Holonomy<R> {
    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn relator_residual(&self) -> f64 {
        self.relator_residual
    }

    pub fn generator_matrices(&self) -> &[Mat2<R>] {
        &self.gens
    }

    pub fn marking(&self) -> &Arc<MarkingTables> {
        &self.marking
    }

    pub fn with_entry_cap(mut self, cap: f64) -> Self {
        self.entry_cap = R::from_f64(cap);
        self
    }

    /// Matrix of a word: the product of generator images in word order.
    pub fn evaluate(&self, w: &GroupWord) -> Result<Mat2<R>> {
        let mut m = Mat2::identity();
        for &l in w.letters() {
            let gm = &self.gens[(l.unsigned_abs() as usize) - 1];
            let gm = if l > 0 { *gm } else { gm.inverse_unimodular() };
            m = m * gm;
            if m.max_abs_entry() > self.entry_cap {
                return Err(Error::PrecisionOverflow(self.entry_cap.to_f64()));
            }
        }
        Ok(m)
    }

    /// Geodesic length of the free homotopy class of a word.
    pub fn length_of_word(&self, w: &GroupWord) -> Result<R> {
        let m = self.evaluate(w)?;
        let tr = m.trace().abs();
        if tr <= R::from_f64(2.0 + EPS_PARABOLIC) {
            return Err(Error::NotHyperbolic(tr.to_f64()));
        }
        Ok(m.translation_length())
    }

    /// Geodesic length of a curve class.
    pub fn length(&self, c: &CurveClass) -> Result<R> {
        self.length_of_word(c.word())
    }

    /// Axis data of a word's image.
    pub fn axis_of_word(&self, w: &GroupWord) -> Result<Axis<R>> {
        Axis::of(&self.evaluate(w)?)
    }
}

fn local_crossing<R: Real>(
    blocks: &HashMap<PantsId, PantsBlock<R>>,
    from: SlotRef,
    to: SlotRef,
    twist: R,
) -> Mat2<R> {
    let nf = blocks[&from.pants].frame[from.slot];
    let nt = blocks[&to.pants].frame[to.slot];
    nf * Mat2::axis_translation(twist) * Mat2::half_turn_at_i() * nt.inverse_unimodular()
}

/// Build the holonomy of a Fenchel-Nielsen point.
///
/// The assembly and its validation always run in extended precision: the
/// marking generators of higher genus have large matrix entries, and
/// certifying the relator residual at 1e-9 needs more than binary64. The
/// result is rounded into the requested scalar.
pub fn holonomy_from_fn<R: Real>(fnc: &FNCoordinates) -> Result<Holonomy<R>> {
    let dd = assemble::<crate::scalar::Dd>(fnc)?;
    let gens = dd
        .gens
        .iter()
        .map(|m| {
            Mat2::new(
                R::from_dd(m.a.hi, m.a.lo),
                R::from_dd(m.b.hi, m.b.lo),
                R::from_dd(m.c.hi, m.c.lo),
                R::from_dd(m.d.hi, m.d.lo),
            )
        })
        .collect();
    Ok(Holonomy {
        genus: dd.genus,
        gens,
        relator_residual: dd.relator_residual,
        entry_cap: R::from_f64(DEFAULT_ENTRY_CAP),
        marking: dd.marking.clone(),
    })
}

fn assemble<R: Real>(fnc: &FNCoordinates) -> Result<Holonomy<R>> {
    fnc.validate()?;
    let genus = fnc.genus;
    let g = genus.get() as usize;
    let marking = marking_tables(genus)?;
    let graph = PantsGraph { genus };
    let len = |e: usize| R::from_f64(fnc.data.lengths[e]);
    let twist = |e: usize| R::from_f64(fnc.data.twists[e]);

    // pants blocks in local frames
    let mut blocks: HashMap<PantsId, PantsBlock<R>> = HashMap::new();
    for sheet in 0..2 {
        for pos in 1..=g - 1 {
            let p = PantsId { sheet, pos };
            let [e1, e2, e3] = graph.slots(p);
            blocks.insert(p, PantsBlock::new(len(e1), len(e2), len(e3))?);
        }
    }

    // tree frames: root is the first upper pants; the lower chain hangs off
    // chain curve 1
    let mut frames: HashMap<PantsId, Mat2<R>> = HashMap::new();
    frames.insert(PantsId { sheet: 0, pos: 1 }, Mat2::identity());
    for sheet in 0..2 {
        if sheet == 1 {
            let (top, bot) = graph.gamma_sides(1);
            let c = local_crossing(&blocks, top, bot, twist(graph.gamma_edge(1)));
            frames.insert(bot.pants, frames[&top.pants] * c);
        }
        for pos in 2..=g - 1 {
            let prev = PantsId { sheet, pos: pos - 1 };
            let here = PantsId { sheet, pos };
            let e = graph.splitter_edge(sheet, pos);
            let c = local_crossing(
                &blocks,
                SlotRef { pants: prev, slot: 2 },
                SlotRef { pants: here, slot: 0 },
                twist(e),
            );
            let f = frames[&prev] * c;
            frames.insert(here, f);
        }
    }

    let embed = |p: PantsId, m: &Mat2<R>| -> Mat2<R> {
        frames[&p] * *m * frames[&p].inverse_unimodular()
    };

    // chain boundary loops u_{2i-1} and stable letters tau_i
    let mut u_odd: Vec<Mat2<R>> = Vec::with_capacity(g + 1);
    let mut tau: Vec<Mat2<R>> = Vec::with_capacity(g + 2);
    tau.push(Mat2::identity()); // unused slot 0
    for i in 1..=g + 1 {
        let (top, bot) = graph.gamma_sides(i);
        u_odd.push(embed(top.pants, &blocks[&top.pants].boundary[top.slot]));
        let c = local_crossing(&blocks, top, bot, twist(graph.gamma_edge(i)));
        tau.push(frames[&top.pants] * c * frames[&bot.pants].inverse_unimodular());
    }

    // u_{2k} = u_{2k-1}^{-1} tau_k tau_{k+1}^{-1}
    let mut u_mats: Vec<Mat2<R>> = Vec::with_capacity(2 * g + 1);
    for k in 1..=g {
        u_mats.push(u_odd[k - 1]);
        u_mats.push(u_odd[k - 1].inverse_unimodular() * tau[k] * tau[k + 1].inverse_unimodular());
    }
    u_mats.push(u_odd[g]);

    // marking generators from their chain words
    let u_mats: Vec<Mat2<R>> = u_mats.iter().map(|m| m.renormalized()).collect();
    let mut gens: Vec<Mat2<R>> = Vec::with_capacity(2 * g);
    for l in 1..=(2 * g) as i32 {
        let mut m = Mat2::identity();
        for ul in marking.generator_as_u(l) {
            let um = &u_mats[(ul.unsigned_abs() as usize) - 1];
            m = m * if ul > 0 { *um } else { um.inverse_unimodular() };
        }
        gens.push(m.renormalized());
    }

    let holonomy = Holonomy {
        genus,
        gens,
        relator_residual: 0.0,
        entry_cap: R::from_f64(DEFAULT_ENTRY_CAP),
        marking: marking.clone(),
    };

    // validation: unimodularity, relator residual, pants-curve lengths
    for m in &holonomy.gens {
        if (m.det() - R::one()).abs().to_f64() > 1e-10 {
            return Err(Error::ConstructionFailure(
                "generator determinant drifted from 1".into(),
                (m.det() - R::one()).abs().to_f64(),
            ));
        }
    }
    let relator_image = holonomy.evaluate(&genus.relator())?;
    let residual = relator_image.dist_to_pm_identity().to_f64();
    if residual > RELATOR_TOL {
        return Err(Error::ConstructionFailure(
            "relator image is not +/- identity".into(),
            residual,
        ));
    }
    for (i, w) in crate::marking::pants_curve_words(genus)?.iter().enumerate() {
        let got = holonomy.length_of_word(w)?.to_f64();
        let want = fnc.data.lengths[i];
        if (got - want).abs() > PANTS_LENGTH_TOL {
            return Err(Error::ConstructionFailure(
                format!("pants curve {i} has length {got}, expected {want}"),
                (got - want).abs(),
            ));
        }
    }

    Ok(Holonomy {
        relator_residual: residual,
        ..holonomy
    })
}

static REFERENCE: Lazy<RwLock<HashMap<u32, Arc<Holonomy<f64>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Deterministic generic Fenchel-Nielsen point used for fingerprint traces.
pub fn reference_fn(genus: Genus) -> FNCoordinates {
    let n = genus.pants_count();
    let lengths = (0..n).map(|i| 1.5 + 0.37 * ((i % 6) as f64)).collect();
    let twists = (0..n).map(|i| 0.2 + 0.13 * ((i % 5) as f64)).collect();
    FNCoordinates {
        genus,
        data: FNData { lengths, twists },
    }
}

/// Shared holonomy at the reference point of a genus.
pub fn reference_holonomy(genus: Genus) -> Result<Arc<Holonomy<f64>>> {
    if let Some(h) = REFERENCE.read().unwrap().get(&genus.get()) {
        return Ok(h.clone());
    }
    let built = Arc::new(holonomy_from_fn::<f64>(&reference_fn(genus))?);
    let mut map = REFERENCE.write().unwrap();
    Ok(map.entry(genus.get()).or_insert(built).clone())
}

/// |trace| of a class under the shared reference holonomy; the numeric half
/// of the canonical-form fingerprint.
pub fn trace_tag(c: &CurveClass) -> Result<f64> {
    let h = reference_holonomy(c.genus())?;
    Ok(h.evaluate(c.word())?.trace().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marking::pants_curve_words;

    fn g2() -> Genus {
        Genus::new(2).unwrap()
    }

    fn base_fn() -> FNCoordinates {
        FNCoordinates::new(g2(), vec![2.0, 2.0, 2.0], vec![0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn pants_block_traces() {
        let b: PantsBlock<f64> = PantsBlock::new(2.0, 2.5, 3.0).unwrap();
        assert!((b.boundary[0].trace() - 2.0 * (1.0f64).cosh()).abs() < 1e-12);
        assert!((b.boundary[1].trace() - 2.0 * (1.25f64).cosh()).abs() < 1e-12);
        assert!((b.boundary[2].trace() + 2.0 * (1.5f64).cosh()).abs() < 1e-12);
        for m in &b.boundary {
            assert!((m.det() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn base_fixture_builds_with_tiny_residual() {
        let h = holonomy_from_fn::<f64>(&base_fn()).unwrap();
        assert!(h.relator_residual() < 1e-11, "residual {}", h.relator_residual());
    }

    #[test]
    fn pants_lengths_match_inputs() {
        let fnc = FNCoordinates::new(g2(), vec![2.0, 2.6, 1.3], vec![0.4, -0.7, 1.1]).unwrap();
        let h = holonomy_from_fn::<f64>(&fnc).unwrap();
        for (i, w) in pants_curve_words(g2()).unwrap().iter().enumerate() {
            let l = h.length_of_word(w).unwrap();
            assert!(
                (l - fnc.data.lengths[i]).abs() < 1e-9,
                "curve {i}: {l} vs {}",
                fnc.data.lengths[i]
            );
        }
    }

    #[test]
    fn genus_three_random_points_build() {
        let g3 = Genus::new(3).unwrap();
        let fnc = FNCoordinates::new(
            g3,
            vec![2.0, 1.1, 3.3, 0.8, 2.2, 1.7],
            vec![0.3, -1.2, 0.0, 1.9, -0.4, 0.7],
        )
        .unwrap();
        let h = holonomy_from_fn::<f64>(&fnc).unwrap();
        assert!(h.relator_residual() < 1e-9);
    }

    #[test]
    fn twist_changes_transverse_length() {
        let twisted = FNCoordinates::new(g2(), vec![2.0, 2.0, 2.0], vec![0.5, 0.0, 0.0]).unwrap();
        let h0 = holonomy_from_fn::<f64>(&base_fn()).unwrap();
        let h1 = holonomy_from_fn::<f64>(&twisted).unwrap();
        // a transverse curve: chain curve 2 meets chain curve 1
        let w = crate::marking::chain_curve_word(g2(), 2).unwrap();
        let l0 = h0.length_of_word(&w).unwrap();
        let l1 = h1.length_of_word(&w).unwrap();
        assert!((l0 - l1).abs() > 1e-3, "twist did not move the metric: {l0} vs {l1}");
        // pants curves keep their lengths
        for pw in pants_curve_words(g2()).unwrap() {
            let a = h0.length_of_word(&pw).unwrap();
            let b = h1.length_of_word(&pw).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_length_is_rejected() {
        let bad = FNCoordinates::new(g2(), vec![0.0, 2.0, 2.0], vec![0.0; 3]);
        assert!(matches!(bad, Err(Error::ConstructionFailure(_, _))));
    }

    #[test]
    fn evaluate_basics() {
        let h = holonomy_from_fn::<f64>(&base_fn()).unwrap();
        let id = h.evaluate(&GroupWord::empty()).unwrap();
        assert_eq!(id, Mat2::identity());
        let w = GroupWord::from_letters([1, 2, -3]);
        let m = h.evaluate(&w.concat(&w.inverse())).unwrap();
        assert!(m.dist_to_pm_identity() < 1e-12);
        let r = h.evaluate(&g2().relator()).unwrap();
        assert!(r.dist_to_pm_identity() < 1e-11);
    }

    #[test]
    fn length_from_trace_matches_closed_form() {
        let h = holonomy_from_fn::<f64>(&base_fn()).unwrap();
        // first pants curve has length 2 by construction
        let w = crate::marking::chain_curve_word(g2(), 1).unwrap();
        let m = h.evaluate(&w).unwrap();
        assert!((m.trace().abs() - 2.0 * (1.0f64).cosh()).abs() < 1e-10);
        assert!((h.length_of_word(&w).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn conjugation_invariance_of_length() {
        let h = holonomy_from_fn::<f64>(&base_fn()).unwrap();
        let w = GroupWord::from_letters([1, 2]);
        let conj = w.conjugate_by(&GroupWord::from_letters([3, -2, 4]));
        let a = h.length_of_word(&w).unwrap();
        let b = h.length_of_word(&conj).unwrap();
        assert!((a - b).abs() < 1e-9);
        let c = h.length_of_word(&w.inverse()).unwrap();
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn extended_precision_matches_f64() {
        use crate::scalar::Dd;
        let fnc = base_fn();
        let h64 = holonomy_from_fn::<f64>(&fnc).unwrap();
        let hdd = holonomy_from_fn::<Dd>(&fnc).unwrap();
        let w = GroupWord::from_letters([1, 2, 3, 4, -1, 2]);
        let a = h64.length_of_word(&w).unwrap();
        let b = hdd.length_of_word(&w).unwrap().to_f64();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn reference_holonomy_builds_for_small_genus() {
        for g in 2..=4 {
            let h = reference_holonomy(Genus::new(g).unwrap()).unwrap();
            assert!(h.relator_residual() < 1e-9);
        }
    }
}
