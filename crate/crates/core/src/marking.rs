//! The chain marking of the genus-g surface group and its twist tables,
//! derived in the hyperelliptic model.
//!
//! The surface double-covers the sphere branched over 2g+2 points lying on a
//! line. Downstairs lives the orbifold group on involution letters x_1, ...,
//! x_{2g+2} (one per branch point, each its own inverse, with global relation
//! x_1 x_2 ... x_{2g+2} = 1); the surface group is its even-length subgroup,
//! freely generated by the chain loops u_k = x_k x_{k+1} (k <= 2g+1) modulo
//! two relations:
//!
//! ```text
//! R1: u_1 u_3 ... u_{2g+1} = 1
//! R2: (u_2 u_4 ... u_2g) (u_1 u_3 ... u_{2g-1}) = u_1 u_2 ... u_2g
//! ```
//!
//! Chain curve j is the class of u_j; consecutive chain curves meet once and
//! all other pairs are disjoint. Eliminating u_{2g+1} by R1 leaves the single
//! relation R2, which a tracked sequence of Nielsen moves rewrites as the
//! standard one-relator surface presentation: with p_t = u_{2t+1},
//! e_t = u_{2t+2} u_{2t+4} ... u_2g and K_t = p_1 p_2 ... p_t, the relation
//! R2 telescopes into [a_1,b_1]...[a_g,b_g] for the basis
//!
//! ```text
//! a_1 = p_0^-1            b_1 = e_0^-1
//! a_i = K_{i-2} p_{i-1}^-1 K_{i-2}^-1     b_i = K_{i-1} e_{i-1}^-1 K_{i-1}^-1   (1 < i < g)
//! a_g = K_{g-2} e_{g-1}^-1 K_{g-2}^-1     b_g = K_{g-2} p_{g-1} K_{g-2}^-1
//! ```
//!
//! Both directions of this basis change are verified symbolically in the
//! free group at construction time. The Dehn twist along chain curve j is
//! the lift of the braid half-twist swapping branch points j, j+1, acting on
//! involution letters by x_j -> x_j x_{j+1} x_j, x_{j+1} -> x_j; its
//! generator images are rewritten into the marking mechanically (pair up
//! letters and telescope x_p x_q through the u-generators) and validated
//! before use.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::canonical::{canonical_class, is_identity, CurveClass};
use crate::error::{Error, Result};
use crate::word::{Genus, GroupWord, Letter};

/// Involution letter: 1..=2g+2.
pub type XLetter = u32;

/// Signed index into the chain generators u_1..u_{2g+1}.
type ULetter = i32;

/// Cancel adjacent equal letters (each x is its own inverse).
pub fn x_reduce(mut w: Vec<XLetter>) -> Vec<XLetter> {
    let mut out: Vec<XLetter> = Vec::with_capacity(w.len());
    for l in w.drain(..) {
        if out.last() == Some(&l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn u_inverse(w: &[ULetter]) -> Vec<ULetter> {
    w.iter().rev().map(|l| -l).collect()
}

fn u_reduce(w: Vec<ULetter>) -> Vec<ULetter> {
    let mut out: Vec<ULetter> = Vec::with_capacity(w.len());
    for l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// The marking basis and its inverse, fixed per genus.
#[derive(Debug)]
pub struct MarkingTables {
    genus: Genus,
    /// marking generators as chain words: index 2i-2 is a_i, 2i-1 is b_i
    gen_u: Vec<Vec<ULetter>>,
    /// chain generators u_1..u_{2g+1} as marking words
    u_ab: Vec<GroupWord>,
}

impl MarkingTables {
    fn build(genus: Genus) -> Result<Self> {
        let g = genus.get() as usize;
        let p = |t: usize| -> ULetter { (2 * t + 1) as ULetter };
        let e = |t: usize| -> Vec<ULetter> {
            ((2 * t + 2)..=2 * g).step_by(2).map(|k| k as ULetter).collect()
        };
        let k_conj = |t: usize| -> Vec<ULetter> { (1..=t).map(p).collect() };

        let conj = |h: &[ULetter], w: Vec<ULetter>| -> Vec<ULetter> {
            let mut out = h.to_vec();
            out.extend(w);
            out.extend(u_inverse(h));
            u_reduce(out)
        };

        let mut gen_u: Vec<Vec<ULetter>> = Vec::with_capacity(2 * g);
        // a_1, b_1
        gen_u.push(vec![-p(0)]);
        gen_u.push(u_inverse(&e(0)));
        for i in 2..g {
            let kp = k_conj(i - 2);
            let kk = k_conj(i - 1);
            gen_u.push(conj(&kp, vec![-p(i - 1)]));
            gen_u.push(conj(&kk, u_inverse(&e(i - 1))));
        }
        if g >= 2 {
            let kp = k_conj(g - 2);
            gen_u.push(conj(&kp, u_inverse(&e(g - 1))));
            gen_u.push(conj(&kp, vec![p(g - 1)]));
        }
        // interleave into (a_1, b_1, a_2, b_2, ...) order
        let gen_u: Vec<Vec<ULetter>> = {
            let mut v = Vec::with_capacity(2 * g);
            for i in 0..g {
                v.push(gen_u[2 * i].clone());
                v.push(gen_u[2 * i + 1].clone());
            }
            v
        };

        // Inverse direction: chain generators as marking words.
        let ab = |l: Letter| GroupWord::from_letters([l]);
        let mut u_ab: Vec<GroupWord> = vec![GroupWord::empty(); 2 * g + 1];
        // u_1 = a_1^{-1}
        u_ab[0] = ab(-genus.a(1));
        // odd letters u_3..u_{2g-3} from a_2..a_{g-1}; u_{2g-1} from b_g
        let mut kw = GroupWord::empty(); // K_0
        let mut kws: Vec<GroupWord> = vec![kw.clone()];
        for i in 2..g {
            let v = ab(-genus.a(i)).conjugate_by(&kw.inverse());
            u_ab[2 * i - 2] = v.clone();
            kw = kw.concat(&v);
            kws.push(kw.clone());
        }
        let k_top = kws[g - 2].clone();
        u_ab[2 * g - 2] = ab(genus.b(g)).conjugate_by(&k_top.inverse());
        // even letters via the suffix products e_t
        let mut e_words: Vec<GroupWord> = Vec::with_capacity(g);
        e_words.push(ab(-genus.b(1)));
        for t in 1..g - 1 {
            e_words.push(ab(-genus.b(t + 1)).conjugate_by(&kws[t].inverse()));
        }
        e_words.push(ab(-genus.a(g)).conjugate_by(&k_top.inverse()));
        for t in 0..g - 1 {
            u_ab[2 * t + 1] = e_words[t].concat(&e_words[t + 1].inverse());
        }
        u_ab[2 * g - 1] = e_words[g - 1].clone();
        // u_{2g+1} = (u_1 u_3 ... u_{2g-1})^{-1}
        let mut odd_prod = GroupWord::empty();
        for i in 1..=g {
            odd_prod = odd_prod.concat(&u_ab[2 * i - 2]);
        }
        u_ab[2 * g] = odd_prod.inverse();

        let tables = MarkingTables { genus, gen_u, u_ab };
        tables.verify()?;
        Ok(tables)
    }

    /// Symbolic verification in the free group on u_1..u_2g: the basis
    /// change round-trips on every generator, and the standard relator maps
    /// to (a conjugate of) the defining relation R2.
    fn verify(&self) -> Result<()> {
        let g = self.genus.get() as usize;
        // round trip: substituting u_ab into gen_u yields single letters
        for (idx, uw) in self.gen_u.iter().enumerate() {
            let got = self.u_word_to_ab(uw);
            let want = GroupWord::from_letters([(idx + 1) as Letter]);
            if got != want {
                return Err(Error::Internal(format!(
                    "marking basis round-trip failed on generator {} of genus {}",
                    idx + 1,
                    g
                )));
            }
        }
        // relator: prod [a_i, b_i] written in u-letters must be a conjugate
        // of R2 (or its inverse) in the free group on u_1..u_2g
        let mut prod: Vec<ULetter> = Vec::new();
        for i in 0..g {
            let a = &self.gen_u[2 * i];
            let b = &self.gen_u[2 * i + 1];
            prod.extend(a.iter().copied());
            prod.extend(b.iter().copied());
            prod.extend(u_inverse(a));
            prod.extend(u_inverse(b));
        }
        let mut prod = u_reduce(prod);
        // cyclic reduction
        while prod.len() >= 2 && prod[0] == -*prod.last().unwrap() {
            prod.remove(0);
            prod.pop();
            prod = u_reduce(prod);
        }
        let m = 2 * g as ULetter;
        let mut r2: Vec<ULetter> = (2..=m).step_by(2).collect();
        r2.extend((1..=m - 1).step_by(2));
        r2.extend((1..=m).rev().map(|k| -k));
        let rot_eq = |a: &[ULetter], b: &[ULetter]| -> bool {
            if a.len() != b.len() {
                return false;
            }
            let doubled: Vec<ULetter> = b.iter().chain(b.iter()).copied().collect();
            (0..b.len()).any(|s| doubled[s..s + a.len()] == *a)
        };
        if !rot_eq(&prod, &r2) && !rot_eq(&prod, &u_inverse(&r2)) {
            return Err(Error::Internal(format!(
                "marking relator is not the defining relation for genus {g}"
            )));
        }
        Ok(())
    }

    /// Substitute chain generators by their marking words.
    fn u_word_to_ab(&self, w: &[ULetter]) -> GroupWord {
        let mut letters: Vec<Letter> = Vec::new();
        for &l in w {
            let img = &self.u_ab[(l.unsigned_abs() as usize) - 1];
            if l > 0 {
                letters.extend_from_slice(img.letters());
            } else {
                letters.extend(img.letters().iter().rev().map(|x| -x));
            }
        }
        GroupWord::from_letters(letters)
    }

    /// Marking word of the chain generator u_j, 1-based.
    pub fn chain_word(&self, j: usize) -> &GroupWord {
        &self.u_ab[j - 1]
    }

    /// u-letter word of a marking generator (1-based letter index).
    pub fn generator_as_u(&self, letter: Letter) -> Vec<i32> {
        self.gen_as_u(letter)
    }

    fn gen_as_u(&self, letter: Letter) -> Vec<ULetter> {
        let base = &self.gen_u[(letter.unsigned_abs() as usize) - 1];
        if letter > 0 {
            base.clone()
        } else {
            u_inverse(base)
        }
    }

    /// Involution word of a marking word.
    pub fn x_word_of(&self, w: &GroupWord) -> Vec<XLetter> {
        let mut xs: Vec<XLetter> = Vec::new();
        for &l in w.letters() {
            for ul in self.gen_as_u(l) {
                let k = ul.unsigned_abs();
                // u_k = x_k x_{k+1}; self-inverse letters make the inverse
                // the reversed pair
                if ul > 0 {
                    xs.push(k);
                    xs.push(k + 1);
                } else {
                    xs.push(k + 1);
                    xs.push(k);
                }
            }
        }
        x_reduce(xs)
    }

    /// Rewrite an even word of the orbifold group into the marking.
    ///
    /// Pairs up consecutive letters and telescopes each pair x_p x_q through
    /// the chain generators (x_p x_q = u_p u_{p+1} ... u_{q-1} for p < q).
    pub fn even_x_to_word(&self, xs: &[XLetter]) -> Result<GroupWord> {
        let genus = self.genus;
        let top = (2 * genus.get() + 2) as XLetter;
        // eliminate the top letter via x_{2g+2} = x_{2g+1} ... x_1
        let mut elim: Vec<XLetter> = Vec::new();
        for &l in &x_reduce(xs.to_vec()) {
            if l == top {
                elim.extend((1..top).rev());
            } else {
                elim.push(l);
            }
        }
        let xs = x_reduce(elim);
        if xs.len() % 2 != 0 {
            return Err(Error::Internal(format!(
                "odd-length involution word cannot lie in the surface group: {xs:?}"
            )));
        }
        let mut u_word: Vec<ULetter> = Vec::new();
        for pair in xs.chunks(2) {
            let (p, q) = (pair[0] as ULetter, pair[1] as ULetter);
            if p < q {
                u_word.extend(p..q);
            } else if p > q {
                u_word.extend((q..p).rev().map(|k| -k));
            }
        }
        Ok(self.u_word_to_ab(&u_reduce(u_word)))
    }
}

static MARKINGS: Lazy<RwLock<HashMap<u32, Arc<MarkingTables>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Shared marking tables for a genus, built and verified on first use.
pub fn marking_tables(genus: Genus) -> Result<Arc<MarkingTables>> {
    if let Some(t) = MARKINGS.read().unwrap().get(&genus.get()) {
        return Ok(t.clone());
    }
    let built = Arc::new(MarkingTables::build(genus)?);
    let mut map = MARKINGS.write().unwrap();
    Ok(map.entry(genus.get()).or_insert(built).clone())
}

/// Image of an involution word under the half-twist swapping points j, j+1.
fn braid_image(w: &[XLetter], j: XLetter, positive: bool) -> Vec<XLetter> {
    let mut out = Vec::with_capacity(3 * w.len());
    for &l in w {
        if positive {
            if l == j {
                out.extend_from_slice(&[j, j + 1, j]);
            } else if l == j + 1 {
                out.push(j);
            } else {
                out.push(l);
            }
        } else if l == j {
            out.push(j + 1);
        } else if l == j + 1 {
            out.extend_from_slice(&[j + 1, j, j + 1]);
        } else {
            out.push(l);
        }
    }
    x_reduce(out)
}

/// Generator-image tables for the twists along the 2g+1 chain curves.
#[derive(Debug)]
pub struct TwistTables {
    genus: Genus,
    /// `pos[j-1][k]` = image of generator k+1 under the left twist along
    /// chain curve j; `neg` is the inverse twist.
    pos: Vec<Vec<GroupWord>>,
    neg: Vec<Vec<GroupWord>>,
}

impl TwistTables {
    fn build(genus: Genus) -> Result<Self> {
        let marking = marking_tables(genus)?;
        let g = genus.get() as usize;
        let mut pos = Vec::with_capacity(2 * g + 1);
        let mut neg = Vec::with_capacity(2 * g + 1);
        for j in 1..=(2 * g + 1) as XLetter {
            let mut row_p = Vec::with_capacity(2 * g);
            let mut row_n = Vec::with_capacity(2 * g);
            for gen in 1..=(2 * g) as Letter {
                let xw = marking.x_word_of(&GroupWord::from_letters([gen]));
                row_p.push(marking.even_x_to_word(&braid_image(&xw, j, true))?);
                row_n.push(marking.even_x_to_word(&braid_image(&xw, j, false))?);
            }
            pos.push(row_p);
            neg.push(row_n);
        }
        let tables = TwistTables { genus, pos, neg };
        tables.validate()?;
        Ok(tables)
    }

    /// Construction-time consistency checks: each table defines an
    /// endomorphism preserving the relator, the two signs invert each other,
    /// and each twist fixes the class of its own curve.
    fn validate(&self) -> Result<()> {
        let genus = self.genus;
        let relator = genus.relator();
        for j in 1..=genus.chain_count() {
            for (sign, row) in [(1i32, &self.pos[j - 1]), (-1, &self.neg[j - 1])] {
                let image = substitute(row, &relator);
                if !is_identity(&image, genus) {
                    return Err(Error::ConstructionFailure(
                        format!("twist {j} sign {sign} does not preserve the relator"),
                        f64::NAN,
                    ));
                }
            }
            // inverse composition returns every generator
            for gen in 1..=genus.rank() as Letter {
                let w = GroupWord::from_letters([gen]);
                let roundtrip = substitute(&self.neg[j - 1], &substitute(&self.pos[j - 1], &w));
                let diff = roundtrip.concat(&w.inverse());
                if !is_identity(&diff, genus) {
                    return Err(Error::ConstructionFailure(
                        format!("twist {j} inverse table is not inverse on generator {gen}"),
                        f64::NAN,
                    ));
                }
            }
            // fixes its own curve
            let c = chain_curve_word(genus, j)?;
            let image = canonical_class(&substitute(&self.pos[j - 1], &c), genus)?;
            let orig = canonical_class(&c, genus)?;
            if image != orig {
                return Err(Error::ConstructionFailure(
                    format!("twist {j} moves its own chain curve"),
                    f64::NAN,
                ));
            }
        }
        Ok(())
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    /// Generator images of the twist along chain curve `j` (1-based), left
    /// twist for `positive`.
    pub fn images(&self, j: usize, positive: bool) -> &[GroupWord] {
        if positive {
            &self.pos[j - 1]
        } else {
            &self.neg[j - 1]
        }
    }
}

/// Apply a generator-image table to a word.
pub fn substitute(images: &[GroupWord], w: &GroupWord) -> GroupWord {
    let mut out: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        let img = &images[(l.unsigned_abs() as usize) - 1];
        if l > 0 {
            out.extend_from_slice(img.letters());
        } else {
            out.extend(img.letters().iter().rev().map(|x| -x));
        }
    }
    GroupWord::from_letters(out)
}

static TABLES: Lazy<RwLock<HashMap<u32, Arc<TwistTables>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Shared twist tables for a genus, built and validated on first use.
pub fn twist_tables(genus: Genus) -> Result<Arc<TwistTables>> {
    if let Some(t) = TABLES.read().unwrap().get(&genus.get()) {
        return Ok(t.clone());
    }
    let built = Arc::new(TwistTables::build(genus)?);
    let mut map = TABLES.write().unwrap();
    Ok(map.entry(genus.get()).or_insert(built).clone())
}

/// Marking word of chain curve j (1-based, j <= 2g+1).
pub fn chain_curve_word(genus: Genus, j: usize) -> Result<GroupWord> {
    Ok(marking_tables(genus)?.chain_word(j).clone())
}

/// Canonical class of chain curve j.
pub fn chain_curve(genus: Genus, j: usize) -> Result<CurveClass> {
    canonical_class(&chain_curve_word(genus, j)?, genus)
}

/// Boundary word of the one-holed torus around handle i: the commutator
/// [a_i, b_i], a separating simple curve.
pub fn handle_boundary_word(genus: Genus, i: usize) -> GroupWord {
    let (a, b) = (genus.a(i), genus.b(i));
    GroupWord::from_letters([a, b, -a, -b])
}

/// Words of the 3g-3 pants curves of the chain decomposition, in the file
/// order: the g+1 odd chain curves, then for each j = 2..g-1 the two sheet
/// splitters (upper then lower).
pub fn pants_curve_words(genus: Genus) -> Result<Vec<GroupWord>> {
    let marking = marking_tables(genus)?;
    let g = genus.get() as usize;
    let mut out = Vec::with_capacity(genus.pants_count());
    for i in 1..=g + 1 {
        out.push(marking.chain_word(2 * i - 1).clone());
    }
    for j in 2..g {
        // upper splitter: u_1 u_3 ... u_{2j-1}
        let uw: Vec<ULetter> = (1..=(2 * j - 1) as ULetter).step_by(2).collect();
        out.push(marking.u_word_to_ab(&uw));
        // lower splitter: the other lift, x_2 x_3 ... x_{2j} x_1
        let mut xs: Vec<XLetter> = (2..=2 * j as XLetter).collect();
        xs.push(1);
        out.push(marking.even_x_to_word(&xs)?);
    }
    Ok(out)
}
