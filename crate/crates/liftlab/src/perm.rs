//! Permutations of `{0, …, n-1}` stored as image tables.
//!
//! Composition convention, fixed project-wide: the right factor acts
//! first, `(a ∘ b)(i) = a(b(i))`. Walk products accumulate edge labels in
//! walk order with the newest step composed on the left, so that lifting a
//! walk from fiber index `i` ends at index `walk_product(i)`.

use std::fmt;

use rand::Rng;

use crate::{Error, Result};

/// An element of the symmetric group S_n as an image table:
/// `images[i] = π(i)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Validates that `images` is a bijection on `{0, …, n-1}`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n {
                return Err(Error::OutOfRange { point: x, bound: n });
            }
            if seen[x] {
                return Err(Error::InvalidParameter(format!(
                    "image table is not a bijection: {x} repeats"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Convenience constructor from disjoint cycles; points not mentioned
    /// are fixed. `from_cycles(4, &[&[0, 1]])` is the transposition (0 1).
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for (k, &p) in cyc.iter().enumerate() {
                if p >= n {
                    return Err(Error::OutOfRange { point: p, bound: n });
                }
                images[p] = cyc[(k + 1) % cyc.len()];
            }
        }
        Permutation::from_images(images)
    }

    /// Uniform over S_n via the unbiased Fisher–Yates shuffle. Identical
    /// seed streams produce identical output.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            images.swap(i, j);
        }
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// True for odd permutations (sign -1), via cycle counting.
    pub fn is_odd(&self) -> bool {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p];
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 1
    }

    /// Smallest point moved, or `None` for the identity.
    pub fn smallest_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i != x)
            .map(|(i, _)| i)
    }
}

impl fmt::Display for Permutation {
    /// One-line image list `[p(0) p(1) … p(n-1)]`, the form used in
    /// experiment logs and golden files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// All permutations of degree `n` in lexicographic image-table order.
/// Intended for exhaustive small-case oracles; errors when `n! > budget`.
pub fn all_permutations(n: usize, budget: u128) -> Result<Vec<Permutation>> {
    let size = factorial(n);
    if size > budget {
        return Err(Error::BudgetExceeded {
            needed: size,
            budget,
        });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation {
            images: images.clone(),
        });
        if !next_lex(&mut images) {
            break;
        }
    }
    Ok(out)
}

/// Saturating factorial; budget comparisons treat saturation as "too big".
pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

fn next_lex(arr: &mut [usize]) -> bool {
    let n = arr.len();
    if n <= 1 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}
