//! Words in the surface group presentation
//! `<a_1, b_1, ..., a_g, b_g | [a_1,b_1]...[a_g,b_g]>`.
//!
//! Letters are nonzero integers: generator k in 1..=2g is `k`, its inverse is
//! `-k`, with a_i = 2i-1 and b_i = 2i. This encoding is also the wire format.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Signed generator index.
pub type Letter = i32;

/// Genus of the closed surface; the whole toolkit assumes g >= 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genus(u32);

impl Genus {
    pub fn new(g: u32) -> Result<Self, Error> {
        if g < 2 {
            return Err(Error::InvalidGenus(g));
        }
        Ok(Genus(g))
    }

    pub fn get(&self) -> u32 {
        self.0
    }

    /// Number of generators (2g).
    pub fn rank(&self) -> usize {
        2 * self.0 as usize
    }

    /// Number of chain curves (2g + 1).
    pub fn chain_count(&self) -> usize {
        2 * self.0 as usize + 1
    }

    /// Number of pants curves (3g - 3).
    pub fn pants_count(&self) -> usize {
        3 * self.0 as usize - 3
    }

    /// Letter for a_i (1-based handle index).
    pub fn a(&self, i: usize) -> Letter {
        debug_assert!(1 <= i && i <= self.0 as usize);
        (2 * i - 1) as Letter
    }

    /// Letter for b_i (1-based handle index).
    pub fn b(&self, i: usize) -> Letter {
        debug_assert!(1 <= i && i <= self.0 as usize);
        (2 * i) as Letter
    }

    /// The defining relator [a_1,b_1]...[a_g,b_g].
    pub fn relator(&self) -> GroupWord {
        let mut w = Vec::with_capacity(4 * self.0 as usize);
        for i in 1..=self.0 as usize {
            let (a, b) = (self.a(i), self.b(i));
            w.extend_from_slice(&[a, b, -a, -b]);
        }
        GroupWord::from_letters(w)
    }
}

/// Freely reduced word in the surface group generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord { letters: Vec::new() }
    }

    /// Build from raw letters, freely reducing.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            debug_assert!(l != 0, "letters are nonzero signed indices");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        GroupWord::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn conjugate_by(&self, h: &GroupWord) -> GroupWord {
        h.concat(self).concat(&h.inverse())
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = GroupWord::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Remove matching prefix/suffix inverse pairs: the cyclic reduction.
    /// Returns (reduced cyclic word, conjugator h) with self = h w h^-1.
    pub fn cyclic_reduce(&self) -> (GroupWord, GroupWord) {
        let mut w = self.letters.clone();
        let mut prefix: Vec<Letter> = Vec::new();
        while w.len() >= 2 && *w.first().unwrap() == -*w.last().unwrap() {
            prefix.push(w[0]);
            w.remove(0);
            w.pop();
        }
        (GroupWord { letters: w }, GroupWord { letters: prefix })
    }

    /// Exponent-sum vector over the 2g generators, unnormalized.
    pub fn exponent_sums(&self, genus: Genus) -> Vec<i64> {
        let mut v = vec![0i64; genus.rank()];
        for &l in &self.letters {
            let idx = (l.unsigned_abs() as usize) - 1;
            assert!(idx < v.len(), "letter {l} out of range for genus {}", genus.get());
            v[idx] += l.signum() as i64;
        }
        v
    }
}

/// Freely reduce a raw letter sequence.
pub fn free_reduce(letters: &[Letter]) -> GroupWord {
    GroupWord::from_letters(letters.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduce_cancels_adjacent_inverses() {
        assert_eq!(free_reduce(&[1, -1, 4]).letters(), &[4]);
        assert_eq!(free_reduce(&[]).letters(), &[] as &[Letter]);
        assert_eq!(free_reduce(&[1, 2, -2, -1]).letters(), &[] as &[Letter]);
    }

    #[test]
    fn cyclic_reduce_strips_conjugation() {
        let w = GroupWord::from_letters([3, 1, 2, -3]);
        let (red, h) = w.cyclic_reduce();
        assert_eq!(red.letters(), &[1, 2]);
        assert_eq!(h.letters(), &[3]);
        assert_eq!(red.conjugate_by(&h), w);
    }

    #[test]
    fn relator_has_zero_exponent_sums() {
        let g = Genus::new(2).unwrap();
        let r = g.relator();
        assert_eq!(r.len(), 8);
        assert!(r.exponent_sums(g).iter().all(|&e| e == 0));
    }

    #[test]
    fn exponent_sums_match_letter_convention() {
        let g = Genus::new(2).unwrap();
        // a1 * b2 -> (1, 0, 0, 1)
        let w = GroupWord::from_letters([1, 4]);
        assert_eq!(w.exponent_sums(g), vec![1, 0, 0, 1]);
    }
}
