//! Mapping classes as compositions of chain-curve Dehn twists, acting on
//! curve classes through the validated generator-image tables.

use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_class, CurveClass};
use crate::error::{Error, Result};
use crate::marking::{chain_curve, substitute, twist_tables};
use crate::word::{Genus, GroupWord};

/// Composition of signed twist generators along the chain curves.
///
/// Entries are nonzero indices in +-(1..=2g+1); the empty word is the
/// identity mapping class. Twists apply left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MappingClassWord(pub Vec<i32>);

impl MappingClassWord {
    pub fn identity() -> Self {
        MappingClassWord(Vec::new())
    }

    pub fn single(index: i32) -> Self {
        MappingClassWord(vec![index])
    }

    pub fn inverse(&self) -> Self {
        MappingClassWord(self.0.iter().rev().map(|t| -t).collect())
    }

    pub fn compose(&self, then: &MappingClassWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&then.0);
        MappingClassWord(v)
    }

    pub fn validate(&self, genus: Genus) -> Result<()> {
        let max = genus.chain_count() as i32;
        for &t in &self.0 {
            if t == 0 || t.abs() > max {
                return Err(Error::InvalidInput(format!(
                    "twist index {t} out of range for genus {}",
                    genus.get()
                )));
            }
        }
        Ok(())
    }
}

/// Twist along any curve in the mapping-class orbit of a chain curve:
/// T_{w(c_base)} = w o T_base o w^{-1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistTarget {
    pub base: usize,
    #[serde(default, rename = "conj")]
    pub conjugator: MappingClassWord,
}

impl TwistTarget {
    pub fn chain(base: usize) -> Self {
        TwistTarget {
            base,
            conjugator: MappingClassWord::identity(),
        }
    }

    /// The curve the twist is performed along.
    pub fn curve(&self, genus: Genus) -> Result<CurveClass> {
        let c = chain_curve(genus, self.base)?;
        apply(genus, &self.conjugator, &c)
    }

    pub fn validate(&self, genus: Genus) -> Result<()> {
        if self.base < 1 || self.base > genus.chain_count() {
            return Err(Error::InvalidInput(format!(
                "twist base {} out of range for genus {}",
                self.base,
                genus.get()
            )));
        }
        self.conjugator.validate(genus)
    }
}

/// Chain curve ("Humphries curve") by 1-based index.
pub fn humphries_curve(genus: Genus, index: usize) -> Result<CurveClass> {
    if index < 1 || index > genus.chain_count() {
        return Err(Error::InvalidInput(format!(
            "chain index {index} out of range for genus {}",
            genus.get()
        )));
    }
    chain_curve(genus, index)
}

/// Generator-image table of the twist along chain curve `index`; negative
/// index gives the inverse twist.
pub fn twist_automorphism(genus: Genus, index: i32) -> Result<Vec<GroupWord>> {
    let tables = twist_tables(genus)?;
    let j = index.unsigned_abs() as usize;
    if j < 1 || j > genus.chain_count() {
        return Err(Error::InvalidInput(format!(
            "twist index {index} out of range for genus {}",
            genus.get()
        )));
    }
    Ok(tables.images(j, index > 0).to_vec())
}

/// Image of a word under a mapping class, without canonicalization.
pub fn apply_to_word(genus: Genus, mc: &MappingClassWord, w: &GroupWord) -> Result<GroupWord> {
    mc.validate(genus)?;
    let tables = twist_tables(genus)?;
    let mut cur = w.clone();
    for &t in &mc.0 {
        cur = substitute(tables.images(t.unsigned_abs() as usize, t > 0), &cur);
    }
    Ok(cur)
}

/// Action of a mapping class on a curve class.
pub fn apply(genus: Genus, mc: &MappingClassWord, c: &CurveClass) -> Result<CurveClass> {
    let image = apply_to_word(genus, mc, c.word())?;
    canonical_class(&image, genus)
}

/// Word image of the n-th twist power along a target curve.
pub fn twist_power_word(
    genus: Genus,
    target: &TwistTarget,
    n: i64,
    w: &GroupWord,
) -> Result<GroupWord> {
    target.validate(genus)?;
    let tables = twist_tables(genus)?;
    let inv = target.conjugator.inverse();
    // f o T^n o f^{-1} applied to w
    let mut cur = apply_to_word(genus, &inv, w)?;
    let images = tables.images(target.base, n > 0);
    for _ in 0..n.unsigned_abs() {
        cur = substitute(images, &cur);
    }
    apply_to_word(genus, &target.conjugator, &cur)
}

/// T_target^n acting on a curve class.
pub fn twist_power(genus: Genus, target: &TwistTarget, n: i64, c: &CurveClass) -> Result<CurveClass> {
    let image = twist_power_word(genus, target, n, c.word())?;
    canonical_class(&image, genus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> Genus {
        Genus::new(2).unwrap()
    }

    #[test]
    fn identity_mapping_class_fixes_curves() {
        let g = g2();
        let c = humphries_curve(g, 2).unwrap();
        let img = apply(g, &MappingClassWord::identity(), &c).unwrap();
        assert_eq!(img, c);
    }

    #[test]
    fn mapping_class_inverse_undoes_action() {
        let g = g2();
        let mc = MappingClassWord(vec![1, -3, 2, 2]);
        let c = humphries_curve(g, 4).unwrap();
        let there = apply(g, &mc, &c).unwrap();
        let back = apply(g, &mc.compose(&mc.inverse()), &c).unwrap();
        assert_eq!(back, c);
        assert_ne!(there, c, "this mapping class should move c_4");
    }

    #[test]
    fn twist_fixes_its_own_curve_and_disjoint_curves() {
        let g = g2();
        // chain curves 1 and 3 are disjoint, so T_1 fixes c_3
        let c3 = humphries_curve(g, 3).unwrap();
        let img = apply(g, &MappingClassWord::single(1), &c3).unwrap();
        assert_eq!(img, c3);
        let c1 = humphries_curve(g, 1).unwrap();
        let img = apply(g, &MappingClassWord::single(1), &c1).unwrap();
        assert_eq!(img, c1);
    }

    #[test]
    fn twist_moves_adjacent_curve() {
        let g = g2();
        let c2 = humphries_curve(g, 2).unwrap();
        let img = apply(g, &MappingClassWord::single(1), &c2).unwrap();
        assert_ne!(img, c2);
    }

    #[test]
    fn twist_power_zero_is_identity() {
        let g = g2();
        let c = humphries_curve(g, 2).unwrap();
        let t = TwistTarget::chain(1);
        assert_eq!(twist_power(g, &t, 0, &c).unwrap(), c);
    }

    #[test]
    fn twist_powers_compose() {
        let g = g2();
        let c = humphries_curve(g, 2).unwrap();
        let t = TwistTarget::chain(1);
        let two = twist_power(g, &t, 2, &c).unwrap();
        let one_one = twist_power(g, &t, 1, &twist_power(g, &t, 1, &c).unwrap()).unwrap();
        assert_eq!(two, one_one);
        let back = twist_power(g, &t, -2, &two).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn conjugated_twist_matches_conjugation_formula() {
        let g = g2();
        let conj = MappingClassWord(vec![2, -4]);
        let t = TwistTarget {
            base: 1,
            conjugator: conj.clone(),
        };
        let x = humphries_curve(g, 3).unwrap();
        let lhs = twist_power(g, &t, 3, &x).unwrap();
        // w o T^3 o w^{-1} step by step
        let step = apply(g, &conj.inverse(), &x).unwrap();
        let step = twist_power(g, &TwistTarget::chain(1), 3, &step).unwrap();
        let rhs = apply(g, &conj, &step).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn distinct_twist_powers_give_distinct_classes() {
        let g = g2();
        let c2 = humphries_curve(g, 2).unwrap();
        let t = TwistTarget::chain(1);
        let mut seen = std::collections::HashSet::new();
        for k in -5..=5 {
            let img = twist_power(g, &t, k, &c2).unwrap();
            assert!(seen.insert(img), "twist power {k} repeats a class");
        }
    }
}
