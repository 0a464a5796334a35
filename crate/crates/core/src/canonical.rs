//! Dehn's algorithm and canonical conjugacy forms.
//!
//! The genus-g relator together with its cyclic rotations and inverses is a
//! small-cancellation family (all pieces are single letters), so a freely
//! reduced word equal to the identity contains more than half of some relator
//! rotation, and greedy replacement terminates. Conjugacy canonicalization
//! works on cyclic words: after cyclic Dehn reduction only the half-relator
//! ambiguity remains, which is resolved by closing under half-relator
//! rewrites and taking the lexicographic minimum over the closure, all
//! rotations, and inversion.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Genus, GroupWord, Letter};

/// Hard cap on the half-relator closure; exceeding it is an internal error,
/// never a silently non-canonical form.
const CLOSURE_CAP: usize = 20_000;

/// All cyclic rotations of the relator and of its inverse.
fn relator_variants(genus: Genus) -> Vec<Vec<Letter>> {
    let r = genus.relator();
    let mut out = Vec::new();
    for base in [r.letters().to_vec(), r.inverse().letters().to_vec()] {
        let n = base.len();
        for s in 0..n {
            let mut rot = Vec::with_capacity(n);
            rot.extend_from_slice(&base[s..]);
            rot.extend_from_slice(&base[..s]);
            out.push(rot);
        }
    }
    out
}

/// Longest match of `w[i..]` against a prefix of `variant`.
fn match_len(w: &[Letter], i: usize, variant: &[Letter]) -> usize {
    let mut k = 0;
    while i + k < w.len() && k < variant.len() && w[i + k] == variant[k] {
        k += 1;
    }
    k
}

/// One pass of linear Dehn reduction: replace the leftmost-longest subword
/// exceeding half a relator by the shorter complement. Returns None when no
/// such subword exists.
fn dehn_step(w: &[Letter], variants: &[Vec<Letter>], half: usize) -> Option<Vec<Letter>> {
    let mut best: Option<(usize, usize, usize)> = None; // (i, len, variant)
    for i in 0..w.len() {
        for (vi, v) in variants.iter().enumerate() {
            let k = match_len(w, i, v);
            if k > half {
                match best {
                    Some((_, blen, _)) if blen >= k => {}
                    _ => best = Some((i, k, vi)),
                }
            }
        }
    }
    let (i, k, vi) = best?;
    let v = &variants[vi];
    // v = s t with s the matched part; s = t^{-1} in the group.
    let t = &v[k..];
    let mut out: Vec<Letter> = Vec::with_capacity(w.len() - k + t.len());
    out.extend_from_slice(&w[..i]);
    out.extend(t.iter().rev().map(|l| -l));
    out.extend_from_slice(&w[i + k..]);
    Some(out)
}

/// Dehn-reduce a linear word to a shortest representative of its element.
pub fn dehn_reduce(w: &GroupWord, genus: Genus) -> GroupWord {
    let variants = relator_variants(genus);
    let half = 2 * genus.get() as usize;
    let mut cur = w.clone();
    loop {
        match dehn_step(cur.letters(), &variants, half) {
            Some(next) => cur = GroupWord::from_letters(next),
            None => return cur,
        }
    }
}

/// Word problem: true iff `w` represents the identity.
pub fn is_identity(w: &GroupWord, genus: Genus) -> bool {
    dehn_reduce(w, genus).is_empty()
}

/// Least rotation of a cyclic word (plain lexicographic scan).
fn least_rotation(w: &[Letter]) -> Vec<Letter> {
    if w.is_empty() {
        return Vec::new();
    }
    let n = w.len();
    let mut best = 0usize;
    for cand in 1..n {
        for k in 0..n {
            let a = w[(cand + k) % n];
            let b = w[(best + k) % n];
            if a < b {
                best = cand;
                break;
            }
            if a > b {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&w[best..]);
    out.extend_from_slice(&w[..best]);
    out
}

/// Free + cyclic reduction of a cyclic word held as a plain vector.
fn cyclic_reduce_vec(mut w: Vec<Letter>) -> Vec<Letter> {
    w = GroupWord::from_letters(w).letters().to_vec();
    while w.len() >= 2 && w[0] == -*w.last().unwrap() {
        w.remove(0);
        w.pop();
        w = GroupWord::from_letters(w).letters().to_vec();
    }
    w
}

/// Cyclic Dehn reduction: reduce until no cyclic subword exceeds half of a
/// relator rotation.
fn cyclic_dehn_reduce(mut w: Vec<Letter>, variants: &[Vec<Letter>], half: usize) -> Vec<Letter> {
    'outer: loop {
        w = cyclic_reduce_vec(w);
        if w.is_empty() {
            return w;
        }
        let n = w.len();
        let doubled: Vec<Letter> = w.iter().chain(w.iter()).copied().collect();
        for i in 0..n {
            for v in variants {
                let k = match_len(&doubled, i, v).min(n);
                if k > half {
                    // rotate so the match is a prefix, then replace
                    let mut rot: Vec<Letter> = Vec::with_capacity(n);
                    rot.extend_from_slice(&w[i..]);
                    rot.extend_from_slice(&w[..i]);
                    let t = &v[k..];
                    let mut next: Vec<Letter> = Vec::with_capacity(n - k + t.len());
                    next.extend(t.iter().rev().map(|l| -l));
                    next.extend_from_slice(&rot[k..]);
                    w = next;
                    continue 'outer;
                }
            }
        }
        return w;
    }
}

/// All half-relator rewrites of a cyclic word (matches of length exactly
/// half), as raw successor cyclic words.
fn half_rewrites(w: &[Letter], variants: &[Vec<Letter>], half: usize) -> Vec<Vec<Letter>> {
    let n = w.len();
    if n < half {
        return Vec::new();
    }
    let doubled: Vec<Letter> = w.iter().chain(w.iter()).copied().collect();
    let mut out = Vec::new();
    for i in 0..n {
        for v in variants {
            if match_len(&doubled, i, v) >= half {
                let t = &v[half..];
                let mut rot: Vec<Letter> = Vec::with_capacity(n);
                rot.extend_from_slice(&w[i..]);
                rot.extend_from_slice(&w[..i]);
                let mut next: Vec<Letter> = Vec::with_capacity(n - half + t.len());
                next.extend(t.iter().rev().map(|l| -l));
                next.extend_from_slice(&rot[half..]);
                out.push(next);
            }
        }
    }
    out
}

/// Canonical cyclic word of the unoriented conjugacy class of `w`.
///
/// Empty output means `w` is trivial in the group.
pub fn conjugacy_canonical(w: &GroupWord, genus: Genus) -> Result<GroupWord> {
    let variants = relator_variants(genus);
    let half = 2 * genus.get() as usize;

    let mut seed = cyclic_dehn_reduce(w.letters().to_vec(), &variants, half);
    // Closing under half rewrites can expose further shortening; restart from
    // any strictly shorter word found.
    'restart: loop {
        if seed.is_empty() {
            return Ok(GroupWord::empty());
        }
        let len = seed.len();
        let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
        let mut queue: Vec<Vec<Letter>> = Vec::new();
        for start in [seed.clone(), cyclic_reduce_vec(GroupWord::from_letters(seed.clone()).inverse().letters().to_vec())] {
            let key = least_rotation(&start);
            if seen.insert(key.clone()) {
                queue.push(key);
            }
        }
        let mut qi = 0usize;
        while qi < queue.len() {
            let cur = queue[qi].clone();
            qi += 1;
            for succ in half_rewrites(&cur, &variants, half) {
                let red = cyclic_dehn_reduce(succ, &variants, half);
                if red.len() < len {
                    seed = red;
                    continue 'restart;
                }
                let key = least_rotation(&red);
                if seen.len() >= CLOSURE_CAP {
                    return Err(Error::ClosureBudget(CLOSURE_CAP));
                }
                if seen.insert(key.clone()) {
                    queue.push(key);
                }
            }
        }
        let min = seen.into_iter().next().expect("nonempty closure");
        return Ok(GroupWord::from_letters(min));
    }
}

/// Canonical unoriented free-isotopy class of an essential curve word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveClass {
    word: GroupWord,
    genus: Genus,
    homology: Vec<i64>,
    /// |trace| under a shared reference holonomy, filled in by callers that
    /// have one; used only to cross-check canonical-form collisions.
    trace_tag: Option<u64>,
}

impl CurveClass {
    pub fn word(&self) -> &GroupWord {
        &self.word
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    /// Exponent-sum vector with deterministic sign (first nonzero positive);
    /// well defined on unoriented classes.
    pub fn homology(&self) -> &[i64] {
        &self.homology
    }

    pub fn is_null_homologous(&self) -> bool {
        self.homology.iter().all(|&e| e == 0)
    }

    pub fn trace_tag(&self) -> Option<f64> {
        self.trace_tag.map(f64::from_bits)
    }

    pub fn set_trace_tag(&mut self, t: f64) {
        self.trace_tag = Some(t.to_bits());
    }
}

fn normalize_homology(mut v: Vec<i64>) -> Vec<i64> {
    if let Some(first) = v.iter().find(|&&e| e != 0) {
        if *first < 0 {
            for e in v.iter_mut() {
                *e = -*e;
            }
        }
    }
    v
}

/// Canonicalize a word into its curve class.
///
/// Conjugate inputs and inverse inputs map to identical outputs; trivial
/// words are rejected.
pub fn canonical_class(w: &GroupWord, genus: Genus) -> Result<CurveClass> {
    let canon = conjugacy_canonical(w, genus)?;
    if canon.is_empty() {
        return Err(Error::TrivialClass);
    }
    let homology = normalize_homology(canon.exponent_sums(genus));
    Ok(CurveClass {
        word: canon,
        genus,
        homology,
        trace_tag: None,
    })
}

/// Conjugacy-invariant homology vector of a word (normalized sign).
pub fn homology_class(w: &GroupWord, genus: Genus) -> Vec<i64> {
    normalize_homology(w.exponent_sums(genus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> Genus {
        Genus::new(2).unwrap()
    }

    #[test]
    fn relator_is_identity() {
        let g = g2();
        assert!(is_identity(&g.relator(), g));
        assert!(!is_identity(&GroupWord::from_letters([1]), g));
        let conj = g.relator().conjugate_by(&GroupWord::from_letters([4, -2, 3]));
        assert!(is_identity(&conj, g));
    }

    #[test]
    fn canonical_is_conjugation_invariant() {
        let g = g2();
        let w = GroupWord::from_letters([1, 2]);
        let h = GroupWord::from_letters([4, 3]);
        let a = canonical_class(&w, g).unwrap();
        let b = canonical_class(&w.conjugate_by(&h), g).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_identifies_rotation_and_inverse() {
        let g = g2();
        let ab = canonical_class(&GroupWord::from_letters([1, 2]), g).unwrap();
        let ba = canonical_class(&GroupWord::from_letters([2, 1]), g).unwrap();
        let inv = canonical_class(&GroupWord::from_letters([-2, -1]), g).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab, inv);
    }

    #[test]
    fn relator_word_is_trivial_class() {
        let g = g2();
        assert!(matches!(canonical_class(&g.relator(), g), Err(Error::TrivialClass)));
    }

    #[test]
    fn half_relator_words_collide() {
        let g = g2();
        // [a1,b1] and [a2,b2]^{-1} are the two halves of the relator.
        let h1 = canonical_class(&GroupWord::from_letters([1, 2, -1, -2]), g).unwrap();
        let h2 = canonical_class(&GroupWord::from_letters([4, 3, -4, -3]), g).unwrap();
        assert_eq!(h1, h2);
        assert!(h1.is_null_homologous());
    }

    #[test]
    fn canonical_is_idempotent() {
        let g = g2();
        let w = GroupWord::from_letters([1, 2, 3, -1, 4, 3]);
        let c = canonical_class(&w, g).unwrap();
        let c2 = canonical_class(c.word(), g).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn homology_is_sign_normalized() {
        let g = g2();
        let c = canonical_class(&GroupWord::from_letters([-1]), g).unwrap();
        assert_eq!(c.homology(), &[1, 0, 0, 0]);
    }

    #[test]
    fn dehn_reduce_shortens_padded_relator() {
        let g = g2();
        // w = a1 * relator: reduces to a1
        let w = GroupWord::from_letters([1]).concat(&g.relator());
        let red = dehn_reduce(&w, g);
        assert_eq!(red.letters(), &[1]);
    }
}
